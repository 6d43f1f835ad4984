#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "hcsmooth/instances.hpp"

namespace hcsmooth {

/// Unimodal toy UBQP built around an anchor solution a:
/// entry(i,j) = +1 if a_i = a_j = 1, otherwise -1.
///
/// The matrix is never stored. Since entry(i,j) = 2 a_i a_j - 1, the quadratic
/// form collapses to y^T Q y = 2 (a.y)^2 - (sum y)^2, so fitness and single-flip
/// gains only need the two running sums.
class ToyUbqp {
public:
    explicit ToyUbqp(BitString anchor);

    int size() const noexcept { return static_cast<int>(anchor_.size()); }
    const BitString& anchor() const noexcept { return anchor_; }
    int anchor_ones() const noexcept { return ones_; }

    /// 0-based indices; throws BoundsError.
    int entry(int i, int j) const;

    std::int64_t fitness(const BitString& y) const;

    static std::int64_t fitness_from_sums(std::int64_t overlap, std::int64_t ones) noexcept {
        return 2 * overlap * overlap - ones * ones;
    }

    /// Change in fitness when flipping bit i of y, where overlap = a.y and ones = sum y.
    std::int64_t flip_gain(int i, std::uint8_t y_i, std::int64_t overlap, std::int64_t ones) const noexcept {
        const std::int64_t d = y_i ? -1 : 1;
        const std::int64_t overlap2 = overlap + (anchor_[static_cast<std::size_t>(i)] ? d : 0);
        const std::int64_t ones2 = ones + d;
        return 2 * (overlap2 * overlap2 - overlap * overlap) - (ones2 * ones2 - ones * ones);
    }

private:
    BitString anchor_;
    int ones_ = 0;
};

/// Coefficients of the GH-smoothed UBQP, (q_ij / (|Q|max + 1))^alpha, with the
/// sparsity pattern of the original matrix.
class GhMatrix {
public:
    GhMatrix(const UbqpInstance& base, int alpha);

    int size() const noexcept { return n_; }
    int alpha() const noexcept { return alpha_; }
    double diag(int i) const { return diag_[static_cast<std::size_t>(i)]; }
    double value(int i, int j) const;
    /// Off-diagonal values aligned with base.row_columns(i).
    std::span<const double> row_values(int i) const {
        return {vals_.data() + offsets_[i], vals_.data() + offsets_[i + 1]};
    }

private:
    const UbqpInstance* base_;
    int n_;
    int alpha_;
    std::vector<double> diag_;
    std::vector<std::size_t> offsets_;
    std::vector<double> vals_;
};

/// Elementwise GH transform of a UBQP matrix. alpha >= 1.
GhMatrix gh_smooth_ubqp(const UbqpInstance& instance, int alpha);

/// The objective a UBQP local search climbs:
///   g(x) = base_weight * B(x) + toy_weight * T(x)
/// where B is the original quadratic form (or its GH replacement) and T the
/// toy fitness. The original f_o is always tracked alongside.
///
/// Holds a non-owning pointer to the instance; the instance must outlive it.
struct UbqpObjective {
    const UbqpInstance* original = nullptr;
    std::shared_ptr<const GhMatrix> replacement;
    double base_weight = 1.0;
    std::optional<ToyUbqp> toy;
    double toy_weight = 0.0;

    static UbqpObjective raw(const UbqpInstance& instance);
    /// (1 - lambda) f_o + toy_scale * lambda * f_toy.
    static UbqpObjective hc(const UbqpInstance& instance, ToyUbqp toy, double lambda, double toy_scale);
    static UbqpObjective gh(const UbqpInstance& instance, int alpha);
    /// toy_weight * f_toy only; the toy defines its own size.
    static UbqpObjective toy_only(const UbqpInstance& shape, ToyUbqp toy, double weight = 1.0);

    int size() const noexcept { return original->size(); }
    double value(const BitString& x) const;
};

/// HC-smoothed UBQP, Q'(lambda) = (1 - lambda) Q + toy_scale * lambda * Q_toy.
class SmoothedUbqp {
public:
    SmoothedUbqp(const UbqpInstance& base, ToyUbqp toy, double lambda, double toy_scale = 5.0);

    const UbqpInstance& base() const noexcept { return *base_; }
    const ToyUbqp& toy() const noexcept { return toy_; }
    double lambda() const noexcept { return lambda_; }
    double toy_scale() const noexcept { return toy_scale_; }

    double entry(int i, int j) const;
    double fitness(const BitString& y) const;
    UbqpObjective objective() const;

private:
    const UbqpInstance* base_;
    ToyUbqp toy_;
    double lambda_;
    double toy_scale_;
};

/// Dense symmetric table of real distances; the metric a tour search works on.
class DistanceTable {
public:
    DistanceTable() = default;
    explicit DistanceTable(int n) : n_(n), d_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0) {}

    int size() const noexcept { return n_; }
    double operator()(int i, int j) const noexcept {
        return d_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j)];
    }
    void set(int i, int j, double v) noexcept {
        d_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j)] = v;
        d_[static_cast<std::size_t>(j) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i)] = v;
    }
    double tour_length(const Tour& tour) const;

private:
    int n_ = 0;
    std::vector<double> d_;
};

DistanceTable raw_distances(const TspInstance& instance);

/// Mean distance over all ordered pairs i != j.
double mean_distance(const TspInstance& instance);

/// Toy TSP whose cities sit evenly on a circle in anchor-tour order, so the
/// anchor is the unique optimal tour up to rotation and reflection. The radius
/// makes the toy's mean pairwise distance equal the base instance's.
class ConvexHullToy {
public:
    ConvexHullToy(const Tour& anchor, double mean_pair_distance);

    int size() const noexcept { return static_cast<int>(anchor_.size()); }
    const Tour& anchor() const noexcept { return anchor_; }
    double radius() const noexcept { return radius_; }
    std::span<const Point> points() const noexcept { return points_; }
    /// Angle (radians) at which a city is placed.
    double angle_of(int city) const;
    double distance(int i, int j) const;

private:
    Tour anchor_;
    std::vector<int> position_;
    std::vector<double> chord_;  // chord length by position offset
    std::vector<Point> points_;
    double radius_ = 0.0;
};

ConvexHullToy build_convexhull_toy(const Tour& anchor, const TspInstance& base);

/// d'(lambda) = (1 - lambda) d + lambda d_toy.
class SmoothedTsp {
public:
    SmoothedTsp(const TspInstance& base, ConvexHullToy toy, double lambda);

    double lambda() const noexcept { return lambda_; }
    const ConvexHullToy& toy() const noexcept { return toy_; }
    double distance(int i, int j) const;
    DistanceTable table() const;

private:
    const TspInstance* base_;
    ConvexHullToy toy_;
    double lambda_;
};

/// GH edge-cost flattening around the mean distance, absolute deviation form.
double gh_transform(double d, double mean, int alpha);
DistanceTable gh_smooth_tsp(const TspInstance& instance, int alpha);

enum class SsaMode { convex, concave };
/// Convex: d^alpha. Concave: d^(1/alpha).
double ssa_transform(double d, int alpha, SsaMode mode);
DistanceTable ssa_smooth_tsp(const TspInstance& instance, int alpha, SsaMode mode);

void check_lambda(double lambda);

}  // namespace hcsmooth
