#include "hcsmooth/metaheuristics.hpp"

#include <cmath>
#include <string>

#include "hcsmooth/errors.hpp"

namespace hcsmooth {

std::string Smoothing::label() const {
    switch (kind) {
        case Kind::none: return "ils";
        case Kind::hc: return "hc";
        case Kind::gh: return "gh-a" + std::to_string(alpha);
        case Kind::ssa: return std::string(mode == SsaMode::convex ? "convex-a" : "concave-a") + std::to_string(alpha);
    }
    return {};
}

UbqpDomain::UbqpDomain(const UbqpInstance& instance, const SolverOptions& options)
    : instance_(&instance), toy_scale_(options.toy_scale), strength_(options.perturbation_strength) {
    if (strength_ == 0) strength_ = std::max(1, instance.size() / 4);
    if (strength_ < 1 || strength_ > instance.size()) throw ConfigError("perturbation strength must lie in [1, n]");
    if (!(toy_scale_ >= 0.0) || !std::isfinite(toy_scale_)) throw ConfigError("toy scale must be a finite value >= 0");
}

UbqpLsResult UbqpDomain::search(const Smoothing& smoothing, const Solution* anchor, const Solution& start,
                                Incumbent<Solution> incumbent) {
    switch (smoothing.kind) {
        case Smoothing::Kind::none:
            return ubqp_best_improvement_ls(UbqpObjective::raw(*instance_), start, incumbent);
        case Smoothing::Kind::hc: {
            if (smoothing.lambda == 0.0)
                return ubqp_best_improvement_ls(UbqpObjective::raw(*instance_), start, incumbent);
            if (anchor == nullptr) throw ConfigError("HC smoothing needs an anchor solution");
            const auto objective = UbqpObjective::hc(*instance_, ToyUbqp(*anchor), smoothing.lambda, toy_scale_);
            return ubqp_best_improvement_ls(objective, start, incumbent);
        }
        case Smoothing::Kind::gh:
            if (cached_gh_alpha_ != smoothing.alpha) {
                cached_gh_ = UbqpObjective::gh(*instance_, smoothing.alpha);
                cached_gh_alpha_ = smoothing.alpha;
            }
            return ubqp_best_improvement_ls(cached_gh_, start, incumbent);
        case Smoothing::Kind::ssa: break;
    }
    throw ConfigError("SSA smoothing is defined for TSP only");
}

TspDomain::TspDomain(const TspInstance& instance, const SolverOptions& options)
    : instance_(&instance),
      three_opt_(options.three_opt),
      mean_distance_(mean_distance(instance)),
      raw_(raw_distances(instance)) {
    if (three_opt_.neighbor_k < 0) throw ConfigError("neighbour list size must be >= 0");
    if (three_opt_.neighbor_k > 0) candidates_ = nearest_neighbors(instance, three_opt_.neighbor_k);
}

const DistanceTable& TspDomain::table_for(const Smoothing& smoothing, const Solution* anchor) {
    if (smoothing.kind == Smoothing::Kind::none) return raw_;
    if (smoothing.kind == Smoothing::Kind::hc && smoothing.lambda == 0.0) return raw_;
    if (smoothing.kind == Smoothing::Kind::gh && smoothing.alpha == 1) return raw_;

    const bool same_key = cached_key_ && cached_key_->kind == smoothing.kind && cached_key_->lambda == smoothing.lambda &&
                          cached_key_->alpha == smoothing.alpha && cached_key_->mode == smoothing.mode;
    if (smoothing.kind == Smoothing::Kind::hc) {
        if (anchor == nullptr) throw ConfigError("HC smoothing needs an anchor tour");
        if (same_key && cached_anchor_ == *anchor) return cached_;
        ConvexHullToy toy(*anchor, mean_distance_);
        cached_ = SmoothedTsp(*instance_, std::move(toy), smoothing.lambda).table();
        cached_anchor_ = *anchor;
    } else {
        if (same_key) return cached_;
        cached_ = smoothing.kind == Smoothing::Kind::gh ? gh_smooth_tsp(*instance_, smoothing.alpha)
                                                        : ssa_smooth_tsp(*instance_, smoothing.alpha, smoothing.mode);
    }
    cached_key_ = smoothing;
    return cached_;
}

TourLsResult TspDomain::search(const Smoothing& smoothing, const Solution* anchor, const Solution& start,
                               Incumbent<Solution> incumbent) {
    const DistanceTable& active = table_for(smoothing, anchor);
    return three_opt_first_improvement(active, start, *instance_, incumbent, three_opt_,
                                       candidates_.empty() ? nullptr : &candidates_);
}

namespace {

template <class Domain>
RunTrace<typename Domain::Solution> run_ils(Domain domain, const SolverOptions& options, std::uint64_t seed) {
    using Solution = typename Domain::Solution;
    Rng rng(seed);
    BudgetMeter meter(options.budget);
    TraceRecorder recorder(options.budget, Domain::orientation, domain.best_known(), options.sink);

    Solution start = domain.random_solution(rng);
    auto res = domain.search(Smoothing::none(), nullptr, start, {});
    meter.charge(res.evaluations, res.moves);
    Solution current = std::move(res.local_opt);
    Solution best = std::move(res.best);
    std::int64_t best_value = res.best_value;
    recorder.record(meter.elapsed(), best_value);

    std::int64_t iterations = 0;
    while (!meter.exhausted()) {
        Solution shaken = domain.perturb(current, rng);
        auto step = domain.search(Smoothing::none(), nullptr, shaken, {&best, best_value});
        meter.charge(step.evaluations, step.moves);
        current = std::move(step.local_opt);
        if (Domain::better(step.best_value, best_value)) {
            best = std::move(step.best);
            best_value = step.best_value;
        }
        ++iterations;
        recorder.record(meter.elapsed(), best_value);
    }
    recorder.finish(best_value);

    RunTrace<Solution> trace;
    trace.points = recorder.take();
    trace.final_best = std::move(best);
    trace.final_value = best_value;
    trace.seed = seed;
    trace.iterations = iterations;
    return trace;
}

template <class Domain>
RunTrace<typename Domain::Solution> run_lsils(Domain domain, const SolverOptions& options, std::uint64_t seed,
                                              IterationObserver<typename Domain::Solution> observer) {
    LsilsWorker<Domain> worker(std::move(domain), options, seed);
    worker.set_observer(std::move(observer));
    worker.initialize();
    while (!worker.exhausted()) {
        const auto anchor = worker.incumbent();
        worker.iterate(anchor);
    }
    return worker.finish();
}

/// Staged smoothing: one descent per stage (shaking between stages), starting
/// from a random solution; once the stages are used up, plain ILS on f_o.
template <class Domain>
RunTrace<typename Domain::Solution> run_staged(Domain domain, const std::vector<Smoothing>& stages,
                                               const SolverOptions& options, std::uint64_t seed) {
    using Solution = typename Domain::Solution;
    Rng rng(seed);
    BudgetMeter meter(options.budget);
    TraceRecorder recorder(options.budget, Domain::orientation, domain.best_known(), options.sink);

    Solution current = domain.random_solution(rng);
    Solution best;
    std::int64_t best_value = 0;
    std::int64_t descents = 0;
    std::size_t stage = 0;

    do {
        const Smoothing active = stage < stages.size() ? stages[stage] : Smoothing::none();
        if (descents > 0) current = domain.perturb(current, rng);
        Incumbent<Solution> inc;
        if (descents > 0) inc = {&best, best_value};
        auto res = domain.search(active, nullptr, current, inc);
        meter.charge(res.evaluations, res.moves);
        current = std::move(res.local_opt);
        if (descents == 0 || Domain::better(res.best_value, best_value)) {
            best = std::move(res.best);
            best_value = res.best_value;
        }
        ++descents;
        if (stage < stages.size()) ++stage;
        recorder.record(meter.elapsed(), best_value, active.label());
    } while (!meter.exhausted());
    recorder.finish(best_value, stage < stages.size() ? stages[stage].label() : Smoothing::none().label());

    RunTrace<Solution> trace;
    trace.points = recorder.take();
    trace.final_best = std::move(best);
    trace.final_value = best_value;
    trace.seed = seed;
    trace.iterations = descents - 1;
    return trace;
}

std::vector<Smoothing> gh_stages(const std::vector<int>& alphas) {
    std::vector<Smoothing> stages;
    for (int a : alphas) stages.push_back(Smoothing::gh(a));
    return stages;
}

std::vector<Smoothing> ssa_stages(const std::vector<int>& alphas) {
    std::vector<Smoothing> stages;
    for (int a : alphas) {
        stages.push_back(Smoothing::ssa(a, SsaMode::convex));
        stages.push_back(Smoothing::ssa(a, SsaMode::concave));
    }
    return stages;
}

std::vector<int> alphas_or(const SolverOptions& options, std::vector<int> fallback) {
    auto alphas = options.alpha_sequence.empty() ? std::move(fallback) : options.alpha_sequence;
    validate_alpha_sequence(alphas);
    return alphas;
}

}  // namespace

RunTrace<BitString> ils_run(const UbqpInstance& instance, const SolverOptions& options, std::uint64_t seed) {
    return run_ils(UbqpDomain(instance, options), options, seed);
}

RunTrace<Tour> ils_run(const TspInstance& instance, const SolverOptions& options, std::uint64_t seed) {
    return run_ils(TspDomain(instance, options), options, seed);
}

RunTrace<BitString> lsils_run(const UbqpInstance& instance, const SolverOptions& options, std::uint64_t seed,
                              IterationObserver<BitString> observer) {
    return run_lsils(UbqpDomain(instance, options), options, seed, std::move(observer));
}

RunTrace<Tour> lsils_run(const TspInstance& instance, const SolverOptions& options, std::uint64_t seed,
                         IterationObserver<Tour> observer) {
    return run_lsils(TspDomain(instance, options), options, seed, std::move(observer));
}

RunTrace<BitString> gh_run(const UbqpInstance& instance, const SolverOptions& options, std::uint64_t seed) {
    return run_staged(UbqpDomain(instance, options), gh_stages(alphas_or(options, default_gh_alphas())), options, seed);
}

RunTrace<Tour> gh_run(const TspInstance& instance, const SolverOptions& options, std::uint64_t seed) {
    return run_staged(TspDomain(instance, options), gh_stages(alphas_or(options, default_gh_alphas())), options, seed);
}

RunTrace<Tour> ssa_run(const TspInstance& instance, const SolverOptions& options, std::uint64_t seed) {
    return run_staged(TspDomain(instance, options), ssa_stages(alphas_or(options, default_ssa_alphas())), options,
                      seed);
}

RunTrace<BitString> ssa_run(const UbqpInstance&, const SolverOptions&, std::uint64_t) {
    throw ConfigError("SSA is defined for TSP only");
}

std::vector<int> default_gh_alphas() { return {6, 5, 4, 3, 2, 1}; }
std::vector<int> default_ssa_alphas() { return {7, 5, 3, 1}; }

void validate_alpha_sequence(const std::vector<int>& alphas) {
    if (alphas.empty()) throw ConfigError("alpha sequence must not be empty");
    for (int a : alphas)
        if (a < 1) throw ConfigError("alpha values must be >= 1");
    if (alphas.back() != 1) throw ConfigError("alpha sequence must end with 1");
}

LambdaSchedule ubqp_default_schedule(double budget_limit) {
    return LambdaSchedule::stepped(0.001, budget_limit / 5.0, 0.004);
}

LambdaSchedule tsp_dynamic_schedule(double budget_limit) {
    return LambdaSchedule::stepped(0.01, budget_limit / 10.0, 0.09);
}

}  // namespace hcsmooth
