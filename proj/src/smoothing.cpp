#include "hcsmooth/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hcsmooth/errors.hpp"

namespace hcsmooth {

namespace {

double int_pow(double base, int exponent) {
    double result = 1.0;
    for (int k = 0; k < exponent; ++k) result *= base;
    return result;
}

void check_alpha(int alpha) {
    if (alpha < 1) throw ConfigError("smoothing factor alpha must be >= 1, got " + std::to_string(alpha));
}

}  // namespace

void check_lambda(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw ConfigError("lambda must lie in [0,1], got " + std::to_string(lambda));
}

ToyUbqp::ToyUbqp(BitString anchor) : anchor_(std::move(anchor)) {
    if (anchor_.empty()) throw DimensionError("toy UBQP needs n >= 1");
    for (auto b : anchor_) ones_ += b ? 1 : 0;
}

int ToyUbqp::entry(int i, int j) const {
    if (i < 0 || i >= size() || j < 0 || j >= size()) throw BoundsError("toy entry index out of range");
    return anchor_[static_cast<std::size_t>(i)] && anchor_[static_cast<std::size_t>(j)] ? 1 : -1;
}

std::int64_t ToyUbqp::fitness(const BitString& y) const {
    if (y.size() != anchor_.size()) throw DimensionError("toy fitness: size mismatch");
    std::int64_t overlap = 0;
    std::int64_t ones = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!y[i]) continue;
        ++ones;
        if (anchor_[i]) ++overlap;
    }
    return fitness_from_sums(overlap, ones);
}

GhMatrix::GhMatrix(const UbqpInstance& base, int alpha) : base_(&base), n_(base.size()), alpha_(alpha) {
    check_alpha(alpha);
    const double scale = 1.0 / (static_cast<double>(base.max_abs()) + 1.0);
    diag_.resize(static_cast<std::size_t>(n_));
    offsets_.assign(static_cast<std::size_t>(n_) + 1, 0);
    for (int i = 0; i < n_; ++i) {
        diag_[static_cast<std::size_t>(i)] = int_pow(static_cast<double>(base.diag(i)) * scale, alpha);
        offsets_[static_cast<std::size_t>(i) + 1] = offsets_[static_cast<std::size_t>(i)] + base.row_columns(i).size();
    }
    vals_.reserve(offsets_.back());
    for (int i = 0; i < n_; ++i)
        for (auto v : base.row_values(i)) vals_.push_back(int_pow(static_cast<double>(v) * scale, alpha));
}

double GhMatrix::value(int i, int j) const {
    if (i < 0 || i >= n_ || j < 0 || j >= n_) throw BoundsError("GH matrix index out of range");
    if (i == j) return diag_[static_cast<std::size_t>(i)];
    auto cols = base_->row_columns(i);
    auto it = std::lower_bound(cols.begin(), cols.end(), j);
    if (it == cols.end() || *it != j) return 0.0;
    return row_values(i)[static_cast<std::size_t>(it - cols.begin())];
}

GhMatrix gh_smooth_ubqp(const UbqpInstance& instance, int alpha) { return GhMatrix(instance, alpha); }

UbqpObjective UbqpObjective::raw(const UbqpInstance& instance) {
    UbqpObjective obj;
    obj.original = &instance;
    return obj;
}

UbqpObjective UbqpObjective::hc(const UbqpInstance& instance, ToyUbqp toy, double lambda, double toy_scale) {
    check_lambda(lambda);
    if (!(toy_scale > 0.0)) throw ConfigError("toy scale must be positive");
    if (toy.size() != instance.size()) throw DimensionError("toy and instance sizes differ");
    UbqpObjective obj;
    obj.original = &instance;
    obj.base_weight = 1.0 - lambda;
    obj.toy = std::move(toy);
    obj.toy_weight = toy_scale * lambda;
    return obj;
}

UbqpObjective UbqpObjective::gh(const UbqpInstance& instance, int alpha) {
    check_alpha(alpha);
    UbqpObjective obj;
    obj.original = &instance;
    if (alpha == 1) {
        // Pure positive scaling; keep the exact integer gains.
        obj.base_weight = 1.0 / (static_cast<double>(instance.max_abs()) + 1.0);
    } else {
        obj.replacement = std::make_shared<const GhMatrix>(instance, alpha);
    }
    return obj;
}

UbqpObjective UbqpObjective::toy_only(const UbqpInstance& shape, ToyUbqp toy, double weight) {
    if (toy.size() != shape.size()) throw DimensionError("toy and instance sizes differ");
    UbqpObjective obj;
    obj.original = &shape;
    obj.base_weight = 0.0;
    obj.toy = std::move(toy);
    obj.toy_weight = weight;
    return obj;
}

double UbqpObjective::value(const BitString& x) const {
    double base = 0.0;
    if (replacement) {
        if (static_cast<int>(x.size()) != size()) throw DimensionError("objective: size mismatch");
        for (int i = 0; i < size(); ++i) {
            if (!x[static_cast<std::size_t>(i)]) continue;
            double row = replacement->diag(i);
            auto cols = original->row_columns(i);
            auto vals = replacement->row_values(i);
            for (std::size_t k = 0; k < cols.size(); ++k)
                if (x[static_cast<std::size_t>(cols[k])]) row += vals[k];
            base += row;
        }
    } else {
        base = static_cast<double>(evaluate_ubqp(*original, x));
    }
    double total = base_weight * base;
    if (toy) total += toy_weight * static_cast<double>(toy->fitness(x));
    return total;
}

SmoothedUbqp::SmoothedUbqp(const UbqpInstance& base, ToyUbqp toy, double lambda, double toy_scale)
    : base_(&base), toy_(std::move(toy)), lambda_(lambda), toy_scale_(toy_scale) {
    check_lambda(lambda);
    if (!(toy_scale > 0.0)) throw ConfigError("toy scale must be positive");
    if (toy_.size() != base.size()) throw DimensionError("toy and instance sizes differ");
}

double SmoothedUbqp::entry(int i, int j) const {
    return (1.0 - lambda_) * static_cast<double>(base_->coef(i, j)) + toy_scale_ * lambda_ * toy_.entry(i, j);
}

double SmoothedUbqp::fitness(const BitString& y) const {
    return (1.0 - lambda_) * static_cast<double>(evaluate_ubqp(*base_, y)) +
           toy_scale_ * lambda_ * static_cast<double>(toy_.fitness(y));
}

UbqpObjective SmoothedUbqp::objective() const { return UbqpObjective::hc(*base_, toy_, lambda_, toy_scale_); }

double DistanceTable::tour_length(const Tour& tour) const {
    double total = (*this)(tour.back(), tour.front());
    for (std::size_t k = 0; k + 1 < tour.size(); ++k) total += (*this)(tour[k], tour[k + 1]);
    return total;
}

DistanceTable raw_distances(const TspInstance& instance) {
    DistanceTable t(instance.size());
    for (int i = 0; i < instance.size(); ++i)
        for (int j = i + 1; j < instance.size(); ++j) t.set(i, j, instance.distance(i, j));
    return t;
}

double mean_distance(const TspInstance& instance) {
    const int n = instance.size();
    if (n < 2) throw DimensionError("mean distance needs n >= 2");
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) sum += instance.distance(i, j);
    return 2.0 * sum / (static_cast<double>(n) * static_cast<double>(n - 1));
}

ConvexHullToy::ConvexHullToy(const Tour& anchor, double mean_pair_distance) : anchor_(anchor) {
    const int n = static_cast<int>(anchor.size());
    if (n < 3) throw DimensionError("convex-hull toy needs n >= 3");
    if (!is_valid_tour(anchor, n)) throw DimensionError("anchor is not a permutation");
    // Mean chord over all pairs of n evenly spaced unit-circle points.
    double unit_mean = 0.0;
    for (int k = 1; k < n; ++k) unit_mean += 2.0 * std::sin(std::numbers::pi * k / n);
    unit_mean /= (n - 1);
    radius_ = mean_pair_distance > 0.0 ? mean_pair_distance / unit_mean : 1.0;

    position_.assign(static_cast<std::size_t>(n), 0);
    points_.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const int city = anchor[static_cast<std::size_t>(k)];
        position_[static_cast<std::size_t>(city)] = k;
        const double theta = 2.0 * std::numbers::pi * k / n;
        points_[static_cast<std::size_t>(city)] = {radius_ * std::cos(theta), radius_ * std::sin(theta)};
    }
    chord_.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) chord_[static_cast<std::size_t>(k)] = 2.0 * radius_ * std::sin(std::numbers::pi * k / n);
}

double ConvexHullToy::angle_of(int city) const {
    return 2.0 * std::numbers::pi * position_.at(static_cast<std::size_t>(city)) / size();
}

double ConvexHullToy::distance(int i, int j) const {
    int offset = position_[static_cast<std::size_t>(i)] - position_[static_cast<std::size_t>(j)];
    if (offset < 0) offset = -offset;
    return chord_[static_cast<std::size_t>(offset)];
}

ConvexHullToy build_convexhull_toy(const Tour& anchor, const TspInstance& base) {
    if (static_cast<int>(anchor.size()) != base.size()) throw DimensionError("anchor and instance sizes differ");
    return ConvexHullToy(anchor, mean_distance(base));
}

SmoothedTsp::SmoothedTsp(const TspInstance& base, ConvexHullToy toy, double lambda)
    : base_(&base), toy_(std::move(toy)), lambda_(lambda) {
    check_lambda(lambda);
    if (toy_.size() != base.size()) throw DimensionError("toy and instance sizes differ");
}

double SmoothedTsp::distance(int i, int j) const {
    return (1.0 - lambda_) * base_->distance(i, j) + lambda_ * toy_.distance(i, j);
}

DistanceTable SmoothedTsp::table() const {
    DistanceTable t(base_->size());
    for (int i = 0; i < base_->size(); ++i)
        for (int j = i + 1; j < base_->size(); ++j) t.set(i, j, distance(i, j));
    return t;
}

double gh_transform(double d, double mean, int alpha) {
    check_alpha(alpha);
    if (d >= mean) return mean + int_pow(d - mean, alpha);
    return mean - int_pow(mean - d, alpha);
}

DistanceTable gh_smooth_tsp(const TspInstance& instance, int alpha) {
    check_alpha(alpha);
    const double mean = mean_distance(instance);
    DistanceTable t(instance.size());
    for (int i = 0; i < instance.size(); ++i)
        for (int j = i + 1; j < instance.size(); ++j)
            t.set(i, j, alpha == 1 ? instance.distance(i, j) : gh_transform(instance.distance(i, j), mean, alpha));
    return t;
}

double ssa_transform(double d, int alpha, SsaMode mode) {
    check_alpha(alpha);
    if (alpha == 1) return d;
    if (mode == SsaMode::convex) return int_pow(d, alpha);
    return std::pow(d, 1.0 / alpha);
}

DistanceTable ssa_smooth_tsp(const TspInstance& instance, int alpha, SsaMode mode) {
    check_alpha(alpha);
    DistanceTable t(instance.size());
    for (int i = 0; i < instance.size(); ++i)
        for (int j = i + 1; j < instance.size(); ++j) t.set(i, j, ssa_transform(instance.distance(i, j), alpha, mode));
    return t;
}

}  // namespace hcsmooth
