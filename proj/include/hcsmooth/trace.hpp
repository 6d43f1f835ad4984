#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hcsmooth/instances.hpp"

namespace hcsmooth {

enum class BudgetKind { wall_clock_seconds, evaluation_count, move_count };

/// Stopping rule and logging cadence of a run, in units of `kind`.
struct Budget {
    BudgetKind kind = BudgetKind::evaluation_count;
    double limit = 0.0;
    double log_interval = 1.0;

    void validate() const;
};

/// Measures elapsed budget. Wall-clock meters start at construction.
class BudgetMeter {
public:
    explicit BudgetMeter(Budget budget);

    const Budget& budget() const noexcept { return budget_; }
    void charge(std::int64_t evaluations, std::int64_t moves) noexcept {
        evaluations_ += evaluations;
        moves_ += moves;
    }
    double elapsed() const noexcept;
    bool exhausted() const noexcept { return elapsed() >= budget_.limit; }
    std::int64_t evaluations() const noexcept { return evaluations_; }
    std::int64_t moves() const noexcept { return moves_; }

private:
    Budget budget_;
    std::chrono::steady_clock::time_point start_;
    std::int64_t evaluations_ = 0;
    std::int64_t moves_ = 0;
};

/// lambda as a function of elapsed budget: a constant, or a staircase
/// step_size * floor(elapsed / step_interval) capped at max_value.
struct LambdaSchedule {
    enum class Mode { constant, stepped };
    Mode mode = Mode::constant;
    double value = 0.0;
    double step_size = 0.0;
    double step_interval = 1.0;
    double max_value = 0.0;

    static LambdaSchedule constant(double lambda);
    static LambdaSchedule stepped(double step_size, double step_interval, double max_value);

    /// Throws ConfigError if any produced value could leave [0,1].
    void validate() const;
};

double update_lambda(const LambdaSchedule& schedule, double elapsed);

/// Relative gap to the best known value, as a nonnegative magnitude:
/// (known - best)/|known| when maximizing, (best - known)/|known| when minimizing.
double compute_excess(double best, double best_known, Orientation orientation);

struct TracePoint {
    double elapsed = 0.0;
    double best = 0.0;
    std::optional<double> excess;
    std::string phase;  ///< active smoothing stage for staged drivers, else empty
};

template <class Solution>
struct RunTrace {
    std::vector<TracePoint> points;
    Solution final_best{};
    std::int64_t final_value = 0;
    std::uint64_t seed = 0;
    std::int64_t iterations = 0;
};

using TraceSink = std::function<void(const TracePoint&)>;

/// Emits one point per multiple of the log interval that elapsed budget has
/// passed, carrying the incumbent at the moment the point was crossed.
class TraceRecorder {
public:
    TraceRecorder(const Budget& budget, Orientation orientation, std::optional<std::int64_t> best_known,
                  TraceSink sink = {});

    void record(double elapsed, std::int64_t best, const std::string& phase = {});
    /// Flushes every remaining point up to the budget limit.
    void finish(std::int64_t best, const std::string& phase = {});

    std::vector<TracePoint> take() { return std::move(points_); }

private:
    void emit(double at, std::int64_t best, const std::string& phase);

    Budget budget_;
    Orientation orientation_;
    std::optional<std::int64_t> best_known_;
    TraceSink sink_;
    std::int64_t next_ = 0;
    std::vector<TracePoint> points_;
};

}  // namespace hcsmooth
