#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hcsmooth/landscape.hpp"
#include "hcsmooth/parallel.hpp"
#include "hcsmooth/trace.hpp"

namespace hcsmooth {

enum class Algorithm { ils, lsils, gh, ssa, pi_ils, pi_lsils, pi_gh, pi_ssa, pc_lsils };

Algorithm parse_algorithm(std::string_view name);
std::string_view algorithm_name(Algorithm algorithm);
bool is_parallel(Algorithm algorithm);

enum class ProblemKind { ubqp, tsp };

/// ".tsp" files are TSPLIB; anything else is read as ORLIB UBQP.
ProblemKind detect_problem(const std::filesystem::path& path);

BudgetKind parse_budget_kind(std::string_view name);
std::string_view budget_kind_name(BudgetKind kind);

struct ExperimentConfig {
    std::filesystem::path problem;
    int instance_index = -1;  ///< ORLIB files: -1 runs every instance
    Algorithm algorithm = Algorithm::lsils;
    Budget budget;
    std::optional<double> lambda;           ///< constant lambda
    std::optional<double> lambda_step;      ///< stepped schedule
    std::optional<double> lambda_max;
    std::optional<double> lambda_interval;  ///< defaults to budget / (max / step + 1)
    std::optional<std::string> topology;    ///< "RxC"; PC requires it, PI uses rows*cols workers
    int workers = 0;                        ///< PI worker count when no topology is given
    double toy_scale = 5.0;
    int perturbation_strength = 0;
    int neighbor_k = 0;
    std::vector<int> alphas;
    std::vector<std::uint64_t> seeds;
    int runs = 0;  ///< when no seeds are given, seeds 1..runs
    std::optional<std::int64_t> best_known;
    std::filesystem::path out_dir = ".";
    ExecutionMode mode = ExecutionMode::threaded;
    bool plot_script = false;
};

/// Resolved lambda schedule: explicit flags, else the problem default.
LambdaSchedule resolve_schedule(const ExperimentConfig& config, ProblemKind problem);
std::vector<std::uint64_t> resolve_seeds(const ExperimentConfig& config);
/// Rejects incompatible algorithm/problem pairs and missing topology.
void validate_config(const ExperimentConfig& config, ProblemKind problem);

/// Reads "<stem>.best" next to the problem file: one integer per instance.
std::vector<std::int64_t> read_best_known_sidecar(const std::filesystem::path& problem);

struct ExperimentSummary {
    std::vector<std::filesystem::path> files;
    std::vector<std::string> warnings;
};

/// Runs every (instance, seed) pair and writes
///   <instance>_<algo>_<seed>.csv          per run (aggregate over workers when parallel)
///   <instance>_<algo>_<seed>_workers.csv  per worker, parallel algorithms only
///   <instance>_<algo>_agg.csv             mean over runs per log point
ExperimentSummary run_experiment(const ExperimentConfig& config);

/// CSV text for a trace; the phase column is written only when `with_phase`.
void write_trace_csv(std::ostream& out, const std::vector<TracePoint>& points, bool with_phase);
std::string format_number(double value);

struct VerifyConfig {
    int n_min = 4;
    int n_max = 12;
    int trials = 50;
    std::uint64_t seed = 1;
};

/// Random anchors through verify_unimodal; prints one line per trial and a
/// summary. Returns true when every trial passes.
bool verify_command(const VerifyConfig& config, std::ostream& out);

struct AnalyzeConfig {
    std::filesystem::path problem;
    int instance_index = 0;
    std::vector<double> lambdas = {0.0, 0.25, 0.5, 0.75, 1.0};
    bool scale_lambdas = true;  ///< multiply the grid by magnitude_scaled_lambda_max
    AnchorSource anchor_source = AnchorSource::local_optimum;
    std::optional<std::filesystem::path> anchor_file;  ///< 0/1 characters, global mode
    std::int64_t move_budget = 100000;
    int repetitions = 20;
    double toy_scale = 5.0;
    int perturbation_strength = 0;
    std::uint64_t seed = 1;
};

/// Writes "lambda,mean_density,mean_escaping_rate,repetitions" rows.
void analyze_command(const AnalyzeConfig& config, std::ostream& out);

BitString read_bit_string(const std::filesystem::path& path);

}  // namespace hcsmooth
