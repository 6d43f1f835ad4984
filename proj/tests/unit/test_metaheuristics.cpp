#include <doctest.h>

#include "hcsmooth/errors.hpp"
#include "hcsmooth/metaheuristics.hpp"

using namespace hcsmooth;

namespace {

SolverOptions eval_budget(double limit, double interval) {
    SolverOptions o;
    o.budget = {BudgetKind::evaluation_count, limit, interval};
    return o;
}

template <class Trace>
void check_same_trace(const Trace& a, const Trace& b) {
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t k = 0; k < a.points.size(); ++k) {
        CHECK(a.points[k].elapsed == b.points[k].elapsed);
        CHECK(a.points[k].best == b.points[k].best);
    }
    CHECK(a.final_best == b.final_best);
    CHECK(a.final_value == b.final_value);
}

template <class Trace>
void check_monotone(const Trace& t, Orientation o) {
    for (std::size_t k = 1; k < t.points.size(); ++k) {
        if (o == Orientation::maximize) CHECK(t.points[k].best >= t.points[k - 1].best);
        else CHECK(t.points[k].best <= t.points[k - 1].best);
    }
}

}  // namespace

TEST_CASE("lambda 0 LSILS reproduces ILS on UBQP") {
    Rng rng(1);
    const auto q = random_ubqp(80, 0.2, 100, rng);
    const auto opts = eval_budget(200000, 5000);
    const auto ils = ils_run(q, opts, 42);
    const auto ls = lsils_run(q, opts, 42);
    check_same_trace(ils, ls);
    CHECK(ils.iterations == ls.iterations);
}

TEST_CASE("lambda 0 LSILS reproduces ILS on TSP") {
    Rng rng(2);
    const auto t = random_tsp(30, 1000.0, rng);
    const auto opts = eval_budget(400000, 20000);
    check_same_trace(ils_run(t, opts, 7), lsils_run(t, opts, 7));
}

TEST_CASE("runs are seed-deterministic and monotone") {
    Rng rng(3);
    const auto q = random_ubqp(60, 0.3, 100, rng);
    auto opts = eval_budget(100000, 2000);
    opts.schedule = ubqp_default_schedule(100000);
    const auto a = lsils_run(q, opts, 9);
    const auto b = lsils_run(q, opts, 9);
    check_same_trace(a, b);
    check_monotone(a, Orientation::maximize);
    CHECK(a.final_value == evaluate_ubqp(q, a.final_best));
    CHECK(a.points.size() == 51);
}

TEST_CASE("zero budget trace holds only the initial descent") {
    Rng rng(4);
    const auto q = random_ubqp(40, 0.3, 100, rng);
    const auto t = lsils_run(q, eval_budget(0, 10), 5);
    REQUIRE(t.points.size() == 1);
    CHECK(t.iterations == 0);
    CHECK(t.points[0].best == static_cast<double>(t.final_value));
}

TEST_CASE("observer sees the incumbent as anchor") {
    Rng rng(5);
    const auto q = random_ubqp(50, 0.3, 100, rng);
    auto opts = eval_budget(50000, 5000);
    opts.schedule = LambdaSchedule::constant(0.01);
    int calls = 0;
    const auto t = lsils_run(q, opts, 3, [&](const IterationEvent<BitString>& e) {
        CHECK(e.anchor == e.incumbent);
        CHECK(e.incumbent_value == evaluate_ubqp(q, e.incumbent));
        CHECK(e.lambda == 0.01);
        ++calls;
    });
    CHECK(calls == t.iterations);
}

TEST_CASE("lambda 1 LSILS returns to the anchor every iteration") {
    Rng rng(6);
    const auto q = random_ubqp(12, 0.5, 50, rng);
    auto opts = eval_budget(5000, 500);
    opts.schedule = LambdaSchedule::constant(1.0);
    UbqpDomain domain(q, opts);
    LsilsWorker<UbqpDomain> w(domain, opts, 11);
    w.initialize();
    for (int k = 0; k < 10 && !w.exhausted(); ++k) {
        const auto anchor = w.incumbent();
        w.iterate(anchor);
        CHECK(w.current() == anchor);
    }
}

TEST_CASE("GH driver labels its stages") {
    Rng rng(7);
    const auto q = random_ubqp(50, 0.3, 100, rng);
    auto opts = eval_budget(60000, 500);
    const auto t = gh_run(q, opts, 1);
    REQUIRE_FALSE(t.points.empty());
    CHECK(t.points.front().phase == "gh-a6");
    bool saw_ils = false;
    for (const auto& p : t.points) saw_ils |= p.phase == "ils";
    CHECK(saw_ils);
    check_monotone(t, Orientation::maximize);
    CHECK(t.final_value == evaluate_ubqp(q, t.final_best));
}

TEST_CASE("SSA driver on TSP and its UBQP refusal") {
    Rng rng(8);
    const auto inst = random_tsp(25, 1000.0, rng);
    const auto t = ssa_run(inst, eval_budget(300000, 10000), 2);
    CHECK(t.points.front().phase == "convex-a7");
    check_monotone(t, Orientation::minimize);
    CHECK(t.final_value == evaluate_tour(inst, t.final_best));

    const auto q = random_ubqp(10, 0.5, 10, rng);
    CHECK_THROWS_AS(ssa_run(q, eval_budget(100, 10), 1), ConfigError);
}

TEST_CASE("TSP LSILS with the stepped schedule improves on the start") {
    Rng rng(9);
    const auto inst = random_tsp(40, 1000.0, rng);
    auto opts = eval_budget(2e6, 1e5);
    opts.schedule = tsp_dynamic_schedule(2e6);
    const auto t = lsils_run(inst, opts, 4);
    check_monotone(t, Orientation::minimize);
    CHECK(is_valid_tour(t.final_best, 40));
    CHECK(t.final_value == evaluate_tour(inst, t.final_best));
}

TEST_CASE("alpha sequence validation") {
    CHECK_THROWS_AS((validate_alpha_sequence({})), ConfigError);
    CHECK_THROWS_AS((validate_alpha_sequence({3, 2})), ConfigError);
    CHECK_THROWS_AS((validate_alpha_sequence({2, 0, 1})), ConfigError);
    CHECK_NOTHROW(validate_alpha_sequence({1}));
}

TEST_CASE("default schedules") {
    const auto u = ubqp_default_schedule(1000);
    CHECK(update_lambda(u, 450) == doctest::Approx(0.002));
    CHECK(update_lambda(u, 999) == doctest::Approx(0.004));
    const auto t = tsp_dynamic_schedule(1000);
    CHECK(update_lambda(t, 999) == doctest::Approx(0.09));
    CHECK(update_lambda(t, 0) == 0.0);
}

TEST_CASE("bad options are rejected") {
    Rng rng(10);
    const auto q = random_ubqp(10, 0.5, 10, rng);
    auto opts = eval_budget(100, 10);
    opts.perturbation_strength = 11;
    CHECK_THROWS_AS(ils_run(q, opts, 1), ConfigError);
    opts.perturbation_strength = 0;
    opts.schedule = LambdaSchedule::constant(2.0);
    CHECK_THROWS_AS(lsils_run(q, opts, 1), ConfigError);
}
