#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hcsmooth/instances.hpp"
#include "hcsmooth/random.hpp"
#include "hcsmooth/smoothing.hpp"

namespace hcsmooth {

struct LandscapeSample {
    std::int64_t moves = 0;       ///< LS moves; perturbations count as zero moves
    std::int64_t n_lo = 0;        ///< distinct local optima reached
    std::int64_t n_descents = 0;  ///< completed descents, revisits included
    std::int64_t n_pert = 0;      ///< perturbations followed by a completed descent
    std::int64_t n_succ = 0;  ///< of those, descents ending at a different bit vector
    double lambda = 0.0;
    std::uint64_t seed = 0;
};

/// ILS-style walk on `objective`: descend, shake the local optimum, descend
/// again, until `move_budget` moves are spent. A descent cut short by the
/// budget is not counted. Returning to an optimum seen before adds a descent
/// but not a local optimum. The walk also stops after `move_budget`
/// perturbations so that flat landscapes, where descents make no moves,
/// terminate. `strength` 0 means n/4.
LandscapeSample sample_landscape(const UbqpObjective& objective, std::int64_t move_budget, Rng& rng,
                                 int strength = 0);

struct LandscapeMetrics {
    std::optional<double> density;        ///< n_lo / moves
    std::optional<double> escaping_rate;  ///< n_succ / n_pert
};

LandscapeMetrics density_and_rate(const LandscapeSample& sample);

enum class AnchorSource { global_optimum, local_optimum };

struct SweepRow {
    double lambda = 0.0;
    std::optional<double> mean_density;
    std::optional<double> mean_escaping_rate;
    int repetitions = 0;
};

struct SweepOptions {
    AnchorSource anchor_source = AnchorSource::local_optimum;
    /// Required for AnchorSource::global_optimum.
    std::optional<BitString> global_optimum;
    std::vector<double> lambdas;
    std::int64_t move_budget = 100000;
    int repetitions = 20;
    double toy_scale = 5.0;
    int strength = 0;
    std::uint64_t seed = 0;
};

/// Builds the toy from the chosen anchor, smooths at each lambda and averages
/// the metrics over `repetitions` samples. Repetition r uses the same seed at
/// every lambda, so rows differ only by the smoothing level.
std::vector<SweepRow> lambda_sweep(const UbqpInstance& instance, const SweepOptions& options);

/// lambda at which the scaled toy entries match the largest |q_ij|:
/// (1 - lambda) * max|q| = toy_scale * lambda.
double magnitude_scaled_lambda_max(const UbqpInstance& instance, double toy_scale);

}  // namespace hcsmooth
