#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "hcsmooth/instances.hpp"
#include "hcsmooth/random.hpp"
#include "hcsmooth/smoothing.hpp"

namespace hcsmooth {

/// Flip gains of a UBQP objective at the current solution, maintained
/// incrementally. For every bit i it keeps
///   field[i] = sum_{j != i} q_ij x_j
/// for the original matrix (and the GH replacement when present), plus the two
/// sums the toy fitness needs. A flip costs O(row nonzeros); a gain costs O(1).
class GainTable {
public:
    GainTable(const UbqpObjective& objective, BitString x);

    int size() const noexcept { return static_cast<int>(x_.size()); }
    const BitString& solution() const noexcept { return x_; }

    /// Change of the active objective g when bit i flips.
    double gain(int i) const noexcept {
        const auto k = static_cast<std::size_t>(i);
        const double sign = x_[k] ? -1.0 : 1.0;
        double base;
        if (alt_field_.empty())
            base = static_cast<double>(original_gain(i));
        else
            base = sign * (objective_.replacement->diag(i) + 2.0 * alt_field_[k]);
        double g = objective_.base_weight * base;
        if (objective_.toy) g += objective_.toy_weight * static_cast<double>(objective_.toy->flip_gain(i, x_[k], overlap_, ones_));
        return g;
    }

    /// Change of the original objective f_o when bit i flips (exact).
    std::int64_t original_gain(int i) const noexcept {
        const auto k = static_cast<std::size_t>(i);
        const std::int64_t g = objective_.original->diag(i) + 2 * field_[k];
        return x_[k] ? -g : g;
    }

    std::vector<double> gains() const;

    void flip(int i);

    std::int64_t original_value() const noexcept { return original_value_; }
    /// Value of g at the current solution, assembled from the tracked parts.
    double value() const noexcept;

private:
    UbqpObjective objective_;  // copied; the instance it points to must outlive the table
    BitString x_;
    std::vector<std::int64_t> field_;
    std::vector<double> alt_field_;
    std::int64_t original_value_ = 0;
    double alt_value_ = 0.0;
    std::int64_t overlap_ = 0;
    std::int64_t ones_ = 0;
};

/// Result of a local search on a (possibly smoothed) objective that also
/// tracks the best solution under the original objective along the trajectory.
template <class Solution, class Value>
struct DualTrackedResult {
    Solution local_opt;        ///< local optimum of the active objective
    double local_value = 0.0;  ///< active-objective value of local_opt
    Solution best;             ///< best visited (or inherited) solution under f_o
    Value best_value{};
    std::int64_t moves = 0;
    std::int64_t evaluations = 0;
    bool completed = true;     ///< false when stopped by max_moves before convergence
};

using UbqpLsResult = DualTrackedResult<BitString, std::int64_t>;
using TourLsResult = DualTrackedResult<Tour, std::int64_t>;

template <class Solution>
struct Incumbent {
    const Solution* solution = nullptr;
    std::int64_t value = 0;
};

struct LsLimits {
    std::int64_t max_moves = std::numeric_limits<std::int64_t>::max();
};

/// Best-improvement 1-bit-flip ascent on `objective`. Ties go to the lowest
/// index. Stops when no gain is strictly positive (or at limits.max_moves).
UbqpLsResult ubqp_best_improvement_ls(const UbqpObjective& objective, const BitString& start,
                                      Incumbent<BitString> incumbent = {}, LsLimits limits = {});

/// Flips exactly `strength` distinct uniformly chosen positions.
BitString perturb_bits(const BitString& x, int strength, Rng& rng);

struct ThreeOptOptions {
    /// 0 scans every (i,j,k); k > 0 restricts the scan to k-nearest-neighbour candidates.
    int neighbor_k = 0;
};

/// Candidate lists for the restricted 3-Opt scan.
std::vector<std::vector<int>> nearest_neighbors(const TspInstance& instance, int k);

/// First-improvement 3-Opt under `active` distances over all seven
/// reconnections of each 3-edge removal, scanned lexicographically by
/// (i, j, k) and move type. Repeats full passes until one finds no improving
/// move; the original-length incumbent is tracked across every visited tour.
TourLsResult three_opt_first_improvement(const DistanceTable& active, const Tour& start, const TspInstance& original,
                                         Incumbent<Tour> incumbent = {}, const ThreeOptOptions& options = {},
                                         const std::vector<std::vector<int>>* candidates = nullptr);

/// Segments S1 S2 S3 S4 split at 0 < a < b < c < n, reconnected as S1 S3 S2 S4.
Tour double_bridge_at(const Tour& tour, int a, int b, int c);
Tour double_bridge(const Tour& tour, Rng& rng);

}  // namespace hcsmooth
