#include "hcsmooth/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <string>
#include <thread>

#include "hcsmooth/errors.hpp"

namespace hcsmooth {

TorusTopology::TorusTopology(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 3 || cols < 3) throw ConfigError("torus needs at least 3 rows and 3 columns");
}

TorusTopology TorusTopology::parse(std::string_view text) {
    const auto x = text.find_first_of("xX");
    if (x == std::string_view::npos) throw ConfigError("topology must look like RxC: " + std::string(text));
    int rows = 0;
    int cols = 0;
    const auto r = std::from_chars(text.data(), text.data() + x, rows);
    const auto c = std::from_chars(text.data() + x + 1, text.data() + text.size(), cols);
    if (r.ec != std::errc{} || r.ptr != text.data() + x || c.ec != std::errc{} ||
        c.ptr != text.data() + text.size())
        throw ConfigError("topology must look like RxC: " + std::string(text));
    return TorusTopology(rows, cols);
}

std::array<int, 4> TorusTopology::neighbors(int rank) const {
    if (rank < 0 || rank >= size()) throw BoundsError("rank out of range");
    const int r = rank / cols_;
    const int c = rank % cols_;
    std::array<int, 4> out = {
        ((r + rows_ - 1) % rows_) * cols_ + c,
        ((r + 1) % rows_) * cols_ + c,
        r * cols_ + (c + cols_ - 1) % cols_,
        r * cols_ + (c + 1) % cols_,
    };
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::uint64_t> worker_seeds(std::uint64_t base, int count) {
    std::vector<std::uint64_t> seeds;
    seeds.reserve(static_cast<std::size_t>(count));
    for (int w = 0; w < count; ++w) seeds.push_back(derive_seed(base, static_cast<std::uint64_t>(w)));
    return seeds;
}

std::vector<TracePoint> aggregate_traces(std::span<const std::vector<TracePoint>> traces, Orientation orientation,
                                         std::optional<std::int64_t> best_known) {
    std::size_t length = 0;
    for (const auto& t : traces) length = std::max(length, t.size());
    std::vector<TracePoint> out;
    out.reserve(length);
    for (std::size_t k = 0; k < length; ++k) {
        std::optional<TracePoint> best;
        for (const auto& t : traces) {
            if (k >= t.size()) continue;
            if (!best || (orientation == Orientation::maximize ? t[k].best > best->best : t[k].best < best->best))
                best = t[k];
        }
        TracePoint p = *best;
        p.phase.clear();
        p.excess.reset();
        if (best_known && *best_known != 0) p.excess = compute_excess(p.best, static_cast<double>(*best_known), orientation);
        out.push_back(std::move(p));
    }
    return out;
}

namespace {

template <class Domain>
class CooperativeWorker {
public:
    using Solution = typename Domain::Solution;

    CooperativeWorker(int rank, Domain domain, const SolverOptions& options, std::uint64_t seed,
                      std::array<int, 4> neighbors, std::vector<Mailbox<Solution>>& boxes, bool cooperation,
                      const EliteObserver<Solution>* observer)
        : rank_(rank),
          core_(std::move(domain), options, seed),
          neighbors_(neighbors),
          boxes_(&boxes),
          cooperation_(cooperation),
          observer_(observer) {}

    void initialize() {
        core_.initialize();
        unsent_ = true;
    }

    bool done() const { return core_.exhausted() || (*boxes_)[static_cast<std::size_t>(rank_)].closed(); }

    void step() {
        bool from_neighbor = false;
        if (cooperation_) {
            if (unsent_) {
                for (int nb : neighbors_)
                    (*boxes_)[static_cast<std::size_t>(nb)].push(
                        {rank_, core_.incumbent(), core_.incumbent_value(), ++sequence_});
                unsent_ = false;
            }
            for (auto& msg : (*boxes_)[static_cast<std::size_t>(rank_)].drain())
                if (!received_ || Domain::better(msg.value, received_->value)) received_ = std::move(msg);
            from_neighbor = received_ && Domain::better(received_->value, core_.incumbent_value());
        }
        const std::int64_t before = core_.incumbent_value();
        const Solution elite = from_neighbor ? received_->solution : core_.incumbent();
        if (observer_ && *observer_)
            (*observer_)(rank_, core_.iterations(), elite, from_neighbor ? received_->value : before, from_neighbor);
        core_.iterate(elite);
        if (Domain::better(core_.incumbent_value(), before)) unsent_ = true;
    }

    RunTrace<Solution> finish() { return core_.finish(); }

private:
    int rank_;
    LsilsWorker<Domain> core_;
    std::array<int, 4> neighbors_;
    std::vector<Mailbox<Solution>>* boxes_;
    bool cooperation_;
    const EliteObserver<Solution>* observer_;
    bool unsent_ = true;
    std::uint64_t sequence_ = 0;
    std::optional<EliteMessage<Solution>> received_;
};

template <class Solution>
ParallelResult<Solution> collect(std::vector<RunTrace<Solution>> runs, Orientation orientation,
                                 std::optional<std::int64_t> best_known) {
    ParallelResult<Solution> result;
    std::vector<std::vector<TracePoint>> traces;
    traces.reserve(runs.size());
    for (const auto& r : runs) traces.push_back(r.points);
    result.aggregate = aggregate_traces(traces, orientation, best_known);
    for (std::size_t w = 0; w < runs.size(); ++w) {
        const bool better = orientation == Orientation::maximize ? runs[w].final_value > result.best_value
                                                                 : runs[w].final_value < result.best_value;
        if (w == 0 || better) {
            result.best = runs[w].final_best;
            result.best_value = runs[w].final_value;
            result.best_worker = static_cast<int>(w);
        }
    }
    result.workers = std::move(runs);
    return result;
}

/// Runs `body(w)` for every worker, either on its own thread or inline.
/// Exceptions from threads are rethrown on the caller.
template <class Body>
void run_workers(std::size_t count, ExecutionMode mode, Body body) {
    if (mode == ExecutionMode::round_robin || count <= 1) {
        for (std::size_t w = 0; w < count; ++w) body(w);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    {
        std::vector<std::jthread> threads;
        threads.reserve(count);
        for (std::size_t w = 0; w < count; ++w)
            threads.emplace_back([&, w] {
                try {
                    body(w);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

template <class Domain, class Instance>
ParallelResult<typename Domain::Solution> run_pc(const Instance& instance, const TorusTopology& topology,
                                                 const ParallelOptions& options, std::span<const std::uint64_t> seeds,
                                                 const EliteObserver<typename Domain::Solution>& observer) {
    using Solution = typename Domain::Solution;
    const auto m = static_cast<std::size_t>(topology.size());
    if (seeds.size() != m) throw ConfigError("need exactly one seed per worker");

    // Per-worker sinks would be called concurrently; traces are collected instead.
    SolverOptions solver = options.solver;
    solver.sink = {};

    std::vector<Mailbox<Solution>> boxes(m);
    std::vector<CooperativeWorker<Domain>> workers;
    workers.reserve(m);
    for (std::size_t w = 0; w < m; ++w)
        workers.emplace_back(static_cast<int>(w), Domain(instance, solver), solver, seeds[w],
                             topology.neighbors(static_cast<int>(w)), boxes, options.cooperation, &observer);

    std::vector<RunTrace<Solution>> runs(m);
    if (options.mode == ExecutionMode::round_robin) {
        for (auto& w : workers) w.initialize();
        for (bool active = true; active;) {
            active = false;
            for (auto& w : workers) {
                if (w.done()) continue;
                w.step();
                active = true;
            }
        }
        for (std::size_t w = 0; w < m; ++w) runs[w] = workers[w].finish();
    } else {
        run_workers(m, options.mode, [&](std::size_t w) {
            auto& worker = workers[w];
            worker.initialize();
            while (!worker.done()) worker.step();
            runs[w] = worker.finish();
        });
    }
    return collect(std::move(runs), Domain::orientation, instance.best_known());
}

template <class Instance>
auto run_variant(Variant variant, const Instance& instance, const SolverOptions& options, std::uint64_t seed) {
    switch (variant) {
        case Variant::ils: return ils_run(instance, options, seed);
        case Variant::lsils: return lsils_run(instance, options, seed);
        case Variant::gh: return gh_run(instance, options, seed);
        case Variant::ssa: return ssa_run(instance, options, seed);
    }
    throw ConfigError("unknown variant");
}

template <class Solution, class Instance>
ParallelResult<Solution> run_pi(Variant variant, const Instance& instance, const ParallelOptions& options,
                                std::span<const std::uint64_t> seeds, Orientation orientation) {
    if (seeds.empty()) throw ConfigError("need at least one worker seed");
    SolverOptions solver = options.solver;
    solver.sink = {};
    std::vector<RunTrace<Solution>> runs(seeds.size());
    run_workers(seeds.size(), options.mode,
                [&](std::size_t w) { runs[w] = run_variant(variant, instance, solver, seeds[w]); });
    return collect(std::move(runs), orientation, instance.best_known());
}

}  // namespace

ParallelResult<BitString> pc_lsils_run(const UbqpInstance& instance, const TorusTopology& topology,
                                       const ParallelOptions& options, std::span<const std::uint64_t> seeds,
                                       EliteObserver<BitString> observer) {
    return run_pc<UbqpDomain>(instance, topology, options, seeds, observer);
}

ParallelResult<Tour> pc_lsils_run(const TspInstance& instance, const TorusTopology& topology,
                                  const ParallelOptions& options, std::span<const std::uint64_t> seeds,
                                  EliteObserver<Tour> observer) {
    return run_pc<TspDomain>(instance, topology, options, seeds, observer);
}

ParallelResult<BitString> pi_run(Variant variant, const UbqpInstance& instance, const ParallelOptions& options,
                                 std::span<const std::uint64_t> seeds) {
    if (variant == Variant::ssa) throw ConfigError("SSA is defined for TSP only");
    return run_pi<BitString>(variant, instance, options, seeds, Orientation::maximize);
}

ParallelResult<Tour> pi_run(Variant variant, const TspInstance& instance, const ParallelOptions& options,
                            std::span<const std::uint64_t> seeds) {
    return run_pi<Tour>(variant, instance, options, seeds, Orientation::minimize);
}

}  // namespace hcsmooth
