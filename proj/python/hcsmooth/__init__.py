"""Landscape-smoothing iterated local search for UBQP and TSP."""

from ._core import (
    ConfigError,
    CostGuardError,
    DimensionError,
    Error,
    ParseError,
    TspInstance,
    UbqpInstance,
    gh,
    global_optima,
    ils,
    is_kbit_optimal,
    lambda_sweep,
    load_orlib,
    load_tsplib,
    local_search,
    lsils,
    magnitude_scaled_lambda_max,
    parse_orlib,
    parse_tsplib,
    pc_lsils,
    pi_run,
    random_tsp,
    random_ubqp,
    sample_landscape,
    smoothed_fitness,
    ssa,
    three_opt,
    toy_entry,
    toy_fitness,
    verify_unimodal,
)

__all__ = [
    "ConfigError",
    "CostGuardError",
    "DimensionError",
    "Error",
    "ParseError",
    "TspInstance",
    "UbqpInstance",
    "gh",
    "global_optima",
    "ils",
    "is_kbit_optimal",
    "lambda_sweep",
    "load_orlib",
    "load_tsplib",
    "local_search",
    "lsils",
    "magnitude_scaled_lambda_max",
    "parse_orlib",
    "parse_tsplib",
    "pc_lsils",
    "pi_run",
    "random_tsp",
    "random_ubqp",
    "sample_landscape",
    "smoothed_fitness",
    "ssa",
    "three_opt",
    "toy_entry",
    "toy_fitness",
    "verify_unimodal",
]
