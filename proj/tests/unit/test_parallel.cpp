#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <thread>
#include <tuple>

#include "hcsmooth/errors.hpp"
#include "hcsmooth/parallel.hpp"

using namespace hcsmooth;

namespace {

ParallelOptions eval_options(double limit, double interval, ExecutionMode mode) {
    ParallelOptions o;
    o.solver.budget = {BudgetKind::evaluation_count, limit, interval};
    o.mode = mode;
    return o;
}

void check_same(const RunTrace<BitString>& a, const RunTrace<BitString>& b) {
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t k = 0; k < a.points.size(); ++k) {
        CHECK(a.points[k].elapsed == b.points[k].elapsed);
        CHECK(a.points[k].best == b.points[k].best);
    }
    CHECK(a.final_best == b.final_best);
    CHECK(a.final_value == b.final_value);
}

}  // namespace

TEST_CASE("torus neighbours") {
    const TorusTopology t(4, 4);
    CHECK(t.size() == 16);
    CHECK(t.neighbors(0) == std::array<int, 4>{1, 3, 4, 12});
    CHECK(t.neighbors(5) == std::array<int, 4>{1, 4, 6, 9});
    CHECK_THROWS_AS(t.neighbors(16), BoundsError);
    CHECK_THROWS_AS(t.neighbors(-1), BoundsError);
}

TEST_CASE("torus adjacency is symmetric with four distinct neighbours") {
    for (auto [r, c] : {std::pair{3, 3}, std::pair{3, 5}, std::pair{4, 4}, std::pair{6, 3}}) {
        const TorusTopology t(r, c);
        for (int a = 0; a < t.size(); ++a) {
            const auto nb = t.neighbors(a);
            CHECK(std::set<int>(nb.begin(), nb.end()).size() == 4);
            for (int b : nb) {
                CHECK(b != a);
                const auto back = t.neighbors(b);
                CHECK(std::find(back.begin(), back.end(), a) != back.end());
            }
        }
    }
}

TEST_CASE("torus rejects small grids and bad text") {
    CHECK_THROWS_AS(TorusTopology(2, 4), ConfigError);
    CHECK_THROWS_AS(TorusTopology(3, 2), ConfigError);
    CHECK(TorusTopology::parse("4x4").size() == 16);
    CHECK(TorusTopology::parse("3X5").cols() == 5);
    CHECK_THROWS_AS(TorusTopology::parse("4-4"), ConfigError);
    CHECK_THROWS_AS(TorusTopology::parse("4x"), ConfigError);
    CHECK_THROWS_AS(TorusTopology::parse("2x8"), ConfigError);
}

TEST_CASE("mailbox drops the oldest message when full") {
    Mailbox<int> box(3);
    for (int k = 0; k < 5; ++k) CHECK(box.push({k, k, k, static_cast<std::uint64_t>(k)}));
    CHECK(box.size() == 3);
    CHECK(box.dropped() == 2);
    const auto msgs = box.drain();
    REQUIRE(msgs.size() == 3);
    CHECK(msgs[0].sender == 2);
    CHECK(msgs[2].sender == 4);
    CHECK(box.size() == 0);
    box.close();
    CHECK_FALSE(box.push({9, 9, 9, 9}));
    CHECK(box.closed());
}

TEST_CASE("mailbox under concurrent producers keeps at most its capacity") {
    Mailbox<int> box;
    {
        std::vector<std::jthread> producers;
        for (int p = 0; p < 4; ++p)
            producers.emplace_back([&box, p] {
                for (int k = 0; k < 1000; ++k) box.push({p, k, k, static_cast<std::uint64_t>(k)});
            });
    }
    CHECK(box.size() == Mailbox<int>::kDefaultCapacity);
    CHECK(box.dropped() == 4000 - Mailbox<int>::kDefaultCapacity);
}

TEST_CASE("worker seeds are distinct and reproducible") {
    const auto a = worker_seeds(7, 16);
    CHECK(a == worker_seeds(7, 16));
    CHECK(std::set<std::uint64_t>(a.begin(), a.end()).size() == 16);
    CHECK(a != worker_seeds(8, 16));
}

TEST_CASE("PC-LSILS without cooperation equals independent LSILS") {
    Rng rng(21);
    const auto q = random_ubqp(60, 0.3, 100, rng);
    const TorusTopology topo(3, 3);
    const auto seeds = worker_seeds(5, topo.size());
    for (auto mode : {ExecutionMode::round_robin, ExecutionMode::threaded}) {
        auto opts = eval_options(40000, 2000, mode);
        opts.solver.schedule = LambdaSchedule::constant(0.002);
        opts.cooperation = false;
        const auto pc = pc_lsils_run(q, topo, opts, seeds);
        const auto pi = pi_run(Variant::lsils, q, opts, seeds);
        REQUIRE(pc.workers.size() == pi.workers.size());
        for (std::size_t w = 0; w < pc.workers.size(); ++w) check_same(pc.workers[w], pi.workers[w]);
        CHECK(pc.best_value == pi.best_value);
    }
}

TEST_CASE("single-worker PI equals the sequential run") {
    Rng rng(22);
    const auto q = random_ubqp(50, 0.3, 100, rng);
    const auto opts = eval_options(30000, 1000, ExecutionMode::threaded);
    const std::vector<std::uint64_t> seeds{13};
    for (auto v : {Variant::ils, Variant::lsils, Variant::gh}) {
        const auto pi = pi_run(v, q, opts, seeds);
        REQUIRE(pi.workers.size() == 1);
        const auto seq = v == Variant::ils ? ils_run(q, opts.solver, 13)
                         : v == Variant::lsils ? lsils_run(q, opts.solver, 13)
                                               : gh_run(q, opts.solver, 13);
        check_same(pi.workers[0], seq);
        REQUIRE(pi.aggregate.size() == seq.points.size());
        for (std::size_t k = 0; k < seq.points.size(); ++k) CHECK(pi.aggregate[k].best == seq.points[k].best);
    }
    CHECK_THROWS_AS(pi_run(Variant::ssa, q, opts, seeds), ConfigError);
}

TEST_CASE("aggregate dominates every worker and ignores order") {
    Rng rng(23);
    const auto q = random_ubqp(60, 0.3, 100, rng);
    const TorusTopology topo(3, 3);
    auto opts = eval_options(30000, 1500, ExecutionMode::round_robin);
    opts.solver.schedule = LambdaSchedule::constant(0.002);
    const auto res = pc_lsils_run(q, topo, opts, worker_seeds(9, topo.size()));
    for (const auto& w : res.workers) {
        REQUIRE(w.points.size() == res.aggregate.size());
        for (std::size_t k = 0; k < w.points.size(); ++k) CHECK(res.aggregate[k].best >= w.points[k].best);
        CHECK(res.best_value >= w.final_value);
    }
    CHECK(res.best_value == evaluate_ubqp(q, res.best));

    std::vector<std::vector<TracePoint>> traces;
    for (const auto& w : res.workers) traces.push_back(w.points);
    const auto forward = aggregate_traces(traces, Orientation::maximize, 1000);
    std::reverse(traces.begin(), traces.end());
    std::swap(traces[0], traces[4]);
    const auto shuffled = aggregate_traces(traces, Orientation::maximize, 1000);
    REQUIRE(forward.size() == shuffled.size());
    for (std::size_t k = 0; k < forward.size(); ++k) {
        CHECK(forward[k].best == shuffled[k].best);
        CHECK(forward[k].excess == shuffled[k].excess);
    }
}

TEST_CASE("aggregate of hand-made traces") {
    const std::vector<std::vector<TracePoint>> traces{
        {{0, 10, {}, ""}, {1, 12, {}, ""}},
        {{0, 11, {}, ""}, {1, 11, {}, ""}, {2, 15, {}, ""}},
    };
    const auto agg = aggregate_traces(traces, Orientation::minimize, 10);
    REQUIRE(agg.size() == 3);
    CHECK(agg[0].best == 10);
    CHECK(agg[1].best == 11);
    CHECK(agg[2].best == 15);
    CHECK(*agg[2].excess == doctest::Approx(0.5));
}

TEST_CASE("3x3 with zero budget keeps only the initial descents") {
    Rng rng(24);
    const auto q = random_ubqp(30, 0.3, 100, rng);
    int calls = 0;
    const auto res = pc_lsils_run(q, TorusTopology(3, 3), eval_options(0, 10, ExecutionMode::round_robin),
                                  worker_seeds(1, 9),
                                  [&](int, std::int64_t, const BitString&, std::int64_t, bool) { ++calls; });
    CHECK(calls == 0);
    REQUIRE(res.workers.size() == 9);
    for (const auto& w : res.workers) {
        CHECK(w.points.size() == 1);
        CHECK(w.iterations == 0);
    }
}

TEST_CASE("seed count must match the grid") {
    Rng rng(25);
    const auto q = random_ubqp(10, 0.3, 10, rng);
    CHECK_THROWS_AS(pc_lsils_run(q, TorusTopology(3, 3), eval_options(10, 1, ExecutionMode::round_robin),
                                 worker_seeds(1, 8)),
                    ConfigError);
}

TEST_CASE("round-robin elite exchange replays exactly and only ever improves") {
    Rng rng(26);
    const auto q = random_ubqp(80, 0.2, 100, rng);
    const TorusTopology topo(3, 3);
    auto opts = eval_options(60000, 3000, ExecutionMode::round_robin);
    opts.solver.schedule = LambdaSchedule::constant(0.002);
    const auto seeds = worker_seeds(3, topo.size());

    using Event = std::tuple<int, std::int64_t, std::int64_t, bool>;
    auto run = [&](std::vector<Event>& log, std::map<int, std::vector<BitString>>& elites) {
        return pc_lsils_run(q, topo, opts, seeds,
                            [&](int rank, std::int64_t it, const BitString& elite, std::int64_t value, bool nb) {
                                log.emplace_back(rank, it, value, nb);
                                elites[rank].push_back(elite);
                            });
    };
    std::vector<Event> first, second;
    std::map<int, std::vector<BitString>> elites_a, elites_b;
    const auto a = run(first, elites_a);
    const auto b = run(second, elites_b);
    CHECK(first == second);
    CHECK(elites_a == elites_b);
    CHECK(a.best_value == b.best_value);

    // Per worker, the anchor value never gets worse: it is the better of the
    // worker's own incumbent and the best elite it has ever received.
    std::map<int, std::int64_t> last;
    std::size_t received = 0;
    for (std::size_t k = 0; k < first.size(); ++k) {
        const auto& [rank, it, value, nb] = first[k];
        if (last.count(rank)) CHECK(value >= last[rank]);
        last[rank] = value;
        received += nb ? 1 : 0;
    }
    for (const auto& [rank, list] : elites_a) {
        std::size_t idx = 0;
        for (const auto& [r, it, value, nb] : first) {
            if (r != rank) continue;
            CHECK(evaluate_ubqp(q, list[idx]) == value);
            ++idx;
        }
    }
    CHECK(received > 0);
}

TEST_CASE("threaded PC-LSILS on TSP produces valid tours") {
    Rng rng(27);
    const auto inst = random_tsp(30, 1000.0, rng);
    ParallelOptions opts;
    opts.solver.budget = {BudgetKind::evaluation_count, 200000, 20000};
    opts.solver.schedule = LambdaSchedule::constant(0.05);
    const auto res = pc_lsils_run(inst, TorusTopology(3, 3), opts, worker_seeds(4, 9));
    CHECK(is_valid_tour(res.best, 30));
    CHECK(res.best_value == evaluate_tour(inst, res.best));
    for (const auto& w : res.workers) CHECK(res.best_value <= w.final_value);
}
