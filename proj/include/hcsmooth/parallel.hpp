#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hcsmooth/metaheuristics.hpp"

namespace hcsmooth {

/// rows x cols grid with wrap-around; rank r sits at (r / cols, r % cols).
class TorusTopology {
public:
    TorusTopology(int rows, int cols);
    /// Parses "RxC", e.g. "4x4".
    static TorusTopology parse(std::string_view text);

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    int size() const noexcept { return rows_ * cols_; }

    /// Up, down, left, right neighbours, sorted ascending.
    std::array<int, 4> neighbors(int rank) const;

private:
    int rows_;
    int cols_;
};

template <class Solution>
struct EliteMessage {
    int sender = 0;
    Solution solution;
    std::int64_t value = 0;
    std::uint64_t sequence = 0;
};

/// Bounded multi-producer inbox. When full, the oldest message is dropped.
template <class Solution>
class Mailbox {
public:
    static constexpr std::size_t kDefaultCapacity = 16;

    explicit Mailbox(std::size_t capacity = kDefaultCapacity) : capacity_(capacity) {}

    /// Returns false if the mailbox has been closed.
    bool push(EliteMessage<Solution> message) {
        std::lock_guard lock(mutex_);
        if (closed_) return false;
        if (queue_.size() >= capacity_) {
            queue_.pop_front();
            ++dropped_;
        }
        queue_.push_back(std::move(message));
        return true;
    }

    std::vector<EliteMessage<Solution>> drain() {
        std::lock_guard lock(mutex_);
        std::vector<EliteMessage<Solution>> out(std::make_move_iterator(queue_.begin()),
                                                std::make_move_iterator(queue_.end()));
        queue_.clear();
        return out;
    }

    void close() {
        std::lock_guard lock(mutex_);
        closed_ = true;
    }
    bool closed() const {
        std::lock_guard lock(mutex_);
        return closed_;
    }
    std::size_t size() const {
        std::lock_guard lock(mutex_);
        return queue_.size();
    }
    std::size_t dropped() const {
        std::lock_guard lock(mutex_);
        return dropped_;
    }

private:
    mutable std::mutex mutex_;
    std::deque<EliteMessage<Solution>> queue_;
    std::size_t capacity_;
    std::size_t dropped_ = 0;
    bool closed_ = false;
};

enum class ExecutionMode {
    threaded,     ///< one thread per worker
    round_robin,  ///< one iteration per worker in rank order; deterministic
};

struct ParallelOptions {
    SolverOptions solver;
    ExecutionMode mode = ExecutionMode::threaded;
    bool cooperation = true;  ///< false turns PC-LSILS into independent LSILS workers
};

template <class Solution>
struct ParallelResult {
    std::vector<RunTrace<Solution>> workers;
    std::vector<TracePoint> aggregate;  ///< best over workers at each log point
    Solution best{};
    std::int64_t best_value = 0;
    int best_worker = 0;
};

/// Called before each cooperative iteration with the elite the worker will
/// anchor on. Invoked from worker threads in threaded mode.
template <class Solution>
using EliteObserver = std::function<void(int rank, std::int64_t iteration, const Solution& elite,
                                         std::int64_t elite_value, bool from_neighbor)>;

/// Per-worker seeds derived from one base seed.
std::vector<std::uint64_t> worker_seeds(std::uint64_t base, int count);

ParallelResult<BitString> pc_lsils_run(const UbqpInstance& instance, const TorusTopology& topology,
                                       const ParallelOptions& options, std::span<const std::uint64_t> seeds,
                                       EliteObserver<BitString> observer = {});
ParallelResult<Tour> pc_lsils_run(const TspInstance& instance, const TorusTopology& topology,
                                  const ParallelOptions& options, std::span<const std::uint64_t> seeds,
                                  EliteObserver<Tour> observer = {});

enum class Variant { ils, lsils, gh, ssa };

/// Independent runs of a sequential algorithm, one per seed.
ParallelResult<BitString> pi_run(Variant variant, const UbqpInstance& instance, const ParallelOptions& options,
                                 std::span<const std::uint64_t> seeds);
ParallelResult<Tour> pi_run(Variant variant, const TspInstance& instance, const ParallelOptions& options,
                            std::span<const std::uint64_t> seeds);

/// Best value across workers at each log point; excess uses `best_known` when given.
std::vector<TracePoint> aggregate_traces(std::span<const std::vector<TracePoint>> traces, Orientation orientation,
                                         std::optional<std::int64_t> best_known);

}  // namespace hcsmooth
