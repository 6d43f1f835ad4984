#include "hcsmooth/landscape.hpp"

#include <set>

#include "hcsmooth/errors.hpp"
#include "hcsmooth/localsearch.hpp"

namespace hcsmooth {

LandscapeSample sample_landscape(const UbqpObjective& objective, std::int64_t move_budget, Rng& rng, int strength) {
    if (move_budget < 1) throw ConfigError("move budget must be >= 1");
    const int n = objective.size();
    if (strength == 0) strength = std::max(1, n / 4);

    LandscapeSample s;
    BitString x = random_bits(n, rng);
    std::optional<BitString> previous;
    std::set<BitString> seen;
    while (s.moves < move_budget && s.n_pert < move_budget) {
        LsLimits limits;
        limits.max_moves = move_budget - s.moves;
        auto res = ubqp_best_improvement_ls(objective, x, {}, limits);
        s.moves += res.moves;
        if (!res.completed) break;
        ++s.n_descents;
        if (seen.insert(res.local_opt).second) ++s.n_lo;
        if (previous) {
            ++s.n_pert;
            if (res.local_opt != *previous) ++s.n_succ;
        }
        previous = std::move(res.local_opt);
        x = perturb_bits(*previous, strength, rng);
    }
    return s;
}

LandscapeMetrics density_and_rate(const LandscapeSample& sample) {
    LandscapeMetrics m;
    if (sample.moves > 0) m.density = static_cast<double>(sample.n_lo) / static_cast<double>(sample.moves);
    if (sample.n_pert > 0) m.escaping_rate = static_cast<double>(sample.n_succ) / static_cast<double>(sample.n_pert);
    return m;
}

std::vector<SweepRow> lambda_sweep(const UbqpInstance& instance, const SweepOptions& options) {
    if (options.repetitions < 1) throw ConfigError("repetitions must be >= 1");
    for (double l : options.lambdas) check_lambda(l);

    BitString anchor;
    if (options.anchor_source == AnchorSource::global_optimum) {
        if (!options.global_optimum) throw ConfigError("global anchor mode needs a best-known solution");
        if (static_cast<int>(options.global_optimum->size()) != instance.size())
            throw DimensionError("best-known solution length differs from instance size");
        anchor = *options.global_optimum;
    } else {
        Rng rng(derive_seed(options.seed, 0xa5c0ULL));
        anchor = ubqp_best_improvement_ls(UbqpObjective::raw(instance), random_bits(instance.size(), rng)).local_opt;
    }

    std::vector<SweepRow> rows;
    for (double lambda : options.lambdas) {
        const auto objective = UbqpObjective::hc(instance, ToyUbqp(anchor), lambda, options.toy_scale);
        SweepRow row;
        row.lambda = lambda;
        row.repetitions = options.repetitions;
        double density_sum = 0.0;
        double rate_sum = 0.0;
        int density_count = 0;
        int rate_count = 0;
        for (int r = 0; r < options.repetitions; ++r) {
            Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(r)));
            auto sample = sample_landscape(objective, options.move_budget, rng, options.strength);
            const auto m = density_and_rate(sample);
            if (m.density) {
                density_sum += *m.density;
                ++density_count;
            }
            if (m.escaping_rate) {
                rate_sum += *m.escaping_rate;
                ++rate_count;
            }
        }
        if (density_count > 0) row.mean_density = density_sum / density_count;
        if (rate_count > 0) row.mean_escaping_rate = rate_sum / rate_count;
        rows.push_back(row);
    }
    return rows;
}

double magnitude_scaled_lambda_max(const UbqpInstance& instance, double toy_scale) {
    if (!(toy_scale > 0.0)) throw ConfigError("toy scale must be positive");
    const double m = static_cast<double>(instance.max_abs());
    return m / (m + toy_scale);
}

}  // namespace hcsmooth
