#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hcsmooth/instances.hpp"
#include "hcsmooth/localsearch.hpp"
#include "hcsmooth/random.hpp"
#include "hcsmooth/smoothing.hpp"
#include "hcsmooth/trace.hpp"

namespace hcsmooth {

struct SolverOptions {
    Budget budget;
    LambdaSchedule schedule = LambdaSchedule::constant(0.0);
    double toy_scale = 5.0;          ///< UBQP toy multiplier
    int perturbation_strength = 0;   ///< UBQP bits per shake; 0 means n/4
    ThreeOptOptions three_opt;       ///< TSP local search
    std::vector<int> alpha_sequence; ///< GH/SSA stages; empty means the default
    TraceSink sink;
};

/// How the local search objective is formed for one descent.
struct Smoothing {
    enum class Kind { none, hc, gh, ssa };
    Kind kind = Kind::none;
    double lambda = 0.0;
    int alpha = 1;
    SsaMode mode = SsaMode::convex;

    static Smoothing none() { return {}; }
    static Smoothing hc(double lambda) { return {Kind::hc, lambda, 1, SsaMode::convex}; }
    static Smoothing gh(int alpha) { return {Kind::gh, 0.0, alpha, SsaMode::convex}; }
    static Smoothing ssa(int alpha, SsaMode mode) { return {Kind::ssa, 0.0, alpha, mode}; }

    std::string label() const;
};

/// UBQP plumbing for the generic drivers: random starts, n/4 bit shakes,
/// best-improvement 1-flip descent.
class UbqpDomain {
public:
    using Solution = BitString;
    static constexpr Orientation orientation = Orientation::maximize;

    UbqpDomain(const UbqpInstance& instance, const SolverOptions& options);

    const UbqpInstance& instance() const noexcept { return *instance_; }
    std::optional<std::int64_t> best_known() const noexcept { return instance_->best_known(); }
    int perturbation_strength() const noexcept { return strength_; }

    Solution random_solution(Rng& rng) const { return random_bits(instance_->size(), rng); }
    Solution perturb(const Solution& x, Rng& rng) const { return perturb_bits(x, strength_, rng); }
    std::int64_t evaluate(const Solution& x) const { return evaluate_ubqp(*instance_, x); }
    static bool better(std::int64_t a, std::int64_t b) noexcept { return a > b; }

    /// One descent. `anchor` is required for Smoothing::Kind::hc.
    UbqpLsResult search(const Smoothing& smoothing, const Solution* anchor, const Solution& start,
                        Incumbent<Solution> incumbent);

private:
    const UbqpInstance* instance_;
    double toy_scale_;
    int strength_;
    std::optional<int> cached_gh_alpha_;
    UbqpObjective cached_gh_;
};

/// TSP plumbing: random tours, double-bridge shakes, first-improvement 3-Opt.
/// Caches the last smoothed distance table, so one domain per thread.
class TspDomain {
public:
    using Solution = Tour;
    static constexpr Orientation orientation = Orientation::minimize;

    TspDomain(const TspInstance& instance, const SolverOptions& options);

    const TspInstance& instance() const noexcept { return *instance_; }
    std::optional<std::int64_t> best_known() const noexcept { return instance_->best_known(); }

    Solution random_solution(Rng& rng) const { return random_tour(instance_->size(), rng); }
    Solution perturb(const Solution& t, Rng& rng) const { return double_bridge(t, rng); }
    std::int64_t evaluate(const Solution& t) const { return evaluate_tour(*instance_, t); }
    static bool better(std::int64_t a, std::int64_t b) noexcept { return a < b; }

    TourLsResult search(const Smoothing& smoothing, const Solution* anchor, const Solution& start,
                        Incumbent<Solution> incumbent);

private:
    const DistanceTable& table_for(const Smoothing& smoothing, const Solution* anchor);

    const TspInstance* instance_;
    ThreeOptOptions three_opt_;
    std::vector<std::vector<int>> candidates_;
    double mean_distance_;
    DistanceTable raw_;
    DistanceTable cached_;
    std::optional<Smoothing> cached_key_;
    Tour cached_anchor_;
};

template <class Solution>
struct IterationEvent {
    std::int64_t iteration;
    double lambda;
    const Solution& anchor;
    const Solution& incumbent;
    std::int64_t incumbent_value;
};

template <class Solution>
using IterationObserver = std::function<void(const IterationEvent<Solution>&)>;

/// State of one LSILS search. Sequential LSILS drives it with its own
/// incumbent as the toy anchor; cooperative workers pass in an elite that may
/// come from a neighbour.
template <class Domain>
class LsilsWorker {
public:
    using Solution = typename Domain::Solution;

    LsilsWorker(Domain domain, const SolverOptions& options, std::uint64_t seed)
        : domain_(std::move(domain)),
          schedule_(options.schedule),
          rng_(seed),
          seed_(seed),
          meter_(options.budget),
          recorder_(options.budget, Domain::orientation, domain_.best_known(), options.sink) {
        schedule_.validate();
    }

    /// Random start, one descent on the original objective, incumbent := result.
    void initialize() {
        Solution start = domain_.random_solution(rng_);
        auto res = domain_.search(Smoothing::none(), nullptr, start, {});
        meter_.charge(res.evaluations, res.moves);
        current_ = std::move(res.local_opt);
        best_ = std::move(res.best);
        best_value_ = res.best_value;
        recorder_.record(meter_.elapsed(), best_value_);
    }

    bool exhausted() const noexcept { return meter_.exhausted(); }

    /// Rebuild the toy around `anchor`, shake the current solution, descend on
    /// the smoothed objective while tracking the original incumbent.
    void iterate(const Solution& anchor) {
        const double lambda = update_lambda(schedule_, meter_.elapsed());
        if (observer_) observer_({iterations_, lambda, anchor, best_, best_value_});
        Solution shaken = domain_.perturb(current_, rng_);
        auto res = domain_.search(Smoothing::hc(lambda), &anchor, shaken, {&best_, best_value_});
        meter_.charge(res.evaluations, res.moves);
        current_ = std::move(res.local_opt);
        if (Domain::better(res.best_value, best_value_)) {
            best_ = std::move(res.best);
            best_value_ = res.best_value;
        }
        ++iterations_;
        recorder_.record(meter_.elapsed(), best_value_);
    }

    RunTrace<Solution> finish() {
        recorder_.finish(best_value_);
        RunTrace<Solution> trace;
        trace.points = recorder_.take();
        trace.final_best = best_;
        trace.final_value = best_value_;
        trace.seed = seed_;
        trace.iterations = iterations_;
        return trace;
    }

    const Solution& incumbent() const noexcept { return best_; }
    std::int64_t incumbent_value() const noexcept { return best_value_; }
    const Solution& current() const noexcept { return current_; }
    const Domain& domain() const noexcept { return domain_; }
    std::int64_t iterations() const noexcept { return iterations_; }
    void set_observer(IterationObserver<Solution> observer) { observer_ = std::move(observer); }

private:
    Domain domain_;
    LambdaSchedule schedule_;
    Rng rng_;
    std::uint64_t seed_;
    BudgetMeter meter_;
    TraceRecorder recorder_;
    Solution current_;
    Solution best_;
    std::int64_t best_value_ = 0;
    std::int64_t iterations_ = 0;
    IterationObserver<Solution> observer_;
};

/// Plain iterated local search: descent, then {shake current; descent} until
/// the budget is spent. The current solution always follows the last descent.
RunTrace<BitString> ils_run(const UbqpInstance& instance, const SolverOptions& options, std::uint64_t seed);
RunTrace<Tour> ils_run(const TspInstance& instance, const SolverOptions& options, std::uint64_t seed);

/// Landscape-smoothing ILS: each iteration anchors the toy at the incumbent.
RunTrace<BitString> lsils_run(const UbqpInstance& instance, const SolverOptions& options, std::uint64_t seed,
                              IterationObserver<BitString> observer = {});
RunTrace<Tour> lsils_run(const TspInstance& instance, const SolverOptions& options, std::uint64_t seed,
                         IterationObserver<Tour> observer = {});

/// GH schedule: one descent per alpha (shaking between stages), then plain ILS.
RunTrace<BitString> gh_run(const UbqpInstance& instance, const SolverOptions& options, std::uint64_t seed);
RunTrace<Tour> gh_run(const TspInstance& instance, const SolverOptions& options, std::uint64_t seed);

/// SSA schedule: per alpha a convex then a concave descent, then plain ILS. TSP only.
RunTrace<Tour> ssa_run(const TspInstance& instance, const SolverOptions& options, std::uint64_t seed);
/// Always throws ConfigError; SSA smooths distances and has no UBQP form.
RunTrace<BitString> ssa_run(const UbqpInstance& instance, const SolverOptions& options, std::uint64_t seed);

std::vector<int> default_gh_alphas();   // 6 5 4 3 2 1
std::vector<int> default_ssa_alphas();  // 7 5 3 1
void validate_alpha_sequence(const std::vector<int>& alphas);

/// Staircase reaching `max_value` after `steps` equal intervals of the budget.
/// UBQP: 0.001 every budget/5 up to 0.004. TSP: 0.01 every budget/10 up to 0.09.
LambdaSchedule ubqp_default_schedule(double budget_limit);
LambdaSchedule tsp_dynamic_schedule(double budget_limit);
inline constexpr double kTspConstantLambda = 0.05;

}  // namespace hcsmooth
