#include "hcsmooth/trace.hpp"

#include <cmath>

#include "hcsmooth/errors.hpp"

namespace hcsmooth {

void Budget::validate() const {
    if (!(limit >= 0.0) || !std::isfinite(limit)) throw ConfigError("budget limit must be a finite value >= 0");
    if (!(log_interval > 0.0)) throw ConfigError("log interval must be positive");
}

BudgetMeter::BudgetMeter(Budget budget) : budget_(budget), start_(std::chrono::steady_clock::now()) {
    budget_.validate();
}

double BudgetMeter::elapsed() const noexcept {
    switch (budget_.kind) {
        case BudgetKind::wall_clock_seconds:
            return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        case BudgetKind::evaluation_count: return static_cast<double>(evaluations_);
        case BudgetKind::move_count: return static_cast<double>(moves_);
    }
    return 0.0;
}

LambdaSchedule LambdaSchedule::constant(double lambda) {
    LambdaSchedule s;
    s.mode = Mode::constant;
    s.value = lambda;
    s.max_value = lambda;
    return s;
}

LambdaSchedule LambdaSchedule::stepped(double step_size, double step_interval, double max_value) {
    LambdaSchedule s;
    s.mode = Mode::stepped;
    s.step_size = step_size;
    s.step_interval = step_interval;
    s.max_value = max_value;
    return s;
}

void LambdaSchedule::validate() const {
    if (mode == Mode::constant) {
        if (!(value >= 0.0 && value <= 1.0)) throw ConfigError("constant lambda must lie in [0,1]");
        return;
    }
    if (!(step_size >= 0.0)) throw ConfigError("lambda step must be >= 0");
    if (!(step_interval > 0.0)) throw ConfigError("lambda step interval must be positive");
    if (!(max_value >= 0.0 && max_value <= 1.0)) throw ConfigError("lambda max must lie in [0,1]");
}

double update_lambda(const LambdaSchedule& schedule, double elapsed) {
    if (schedule.mode == LambdaSchedule::Mode::constant) return schedule.value;
    const double steps = std::floor(std::max(0.0, elapsed) / schedule.step_interval);
    return std::min(schedule.max_value, schedule.step_size * steps);
}

double compute_excess(double best, double best_known, Orientation orientation) {
    if (best_known == 0.0) throw ConfigError("excess is undefined for a best-known value of 0");
    const double gap = orientation == Orientation::maximize ? best_known - best : best - best_known;
    return gap / std::fabs(best_known);
}

TraceRecorder::TraceRecorder(const Budget& budget, Orientation orientation, std::optional<std::int64_t> best_known,
                             TraceSink sink)
    : budget_(budget), orientation_(orientation), best_known_(best_known), sink_(std::move(sink)) {}

void TraceRecorder::emit(double at, std::int64_t best, const std::string& phase) {
    TracePoint p;
    p.elapsed = at;
    p.best = static_cast<double>(best);
    if (best_known_ && *best_known_ != 0) p.excess = compute_excess(p.best, static_cast<double>(*best_known_), orientation_);
    p.phase = phase;
    if (sink_) sink_(p);
    points_.push_back(std::move(p));
}

void TraceRecorder::record(double elapsed, std::int64_t best, const std::string& phase) {
    for (;;) {
        const double at = static_cast<double>(next_) * budget_.log_interval;
        if (at > elapsed || at > budget_.limit) break;
        emit(at, best, phase);
        ++next_;
    }
}

void TraceRecorder::finish(std::int64_t best, const std::string& phase) { record(budget_.limit, best, phase); }

}  // namespace hcsmooth
