#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hcsmooth/random.hpp"

namespace hcsmooth {

/// 0-1 assignment of the UBQP variables, one byte per variable.
using BitString = std::vector<std::uint8_t>;

/// Visiting order of the cities, 0-based city indices.
using Tour = std::vector<int>;

enum class Orientation { maximize, minimize };

/// One coefficient of a symmetric UBQP matrix, 0-based. Sets both (i,j) and (j,i).
struct UbqpTriple {
    int i = 0;
    int j = 0;
    std::int64_t value = 0;
};

/// Symmetric UBQP instance, maximize x^T Q x over x in {0,1}^n.
///
/// Coefficients live in a compressed row layout of the off-diagonal nonzeros
/// (the hot loop of gain maintenance) plus the diagonal. A dense copy is kept
/// for random access when n <= kDenseLimit.
class UbqpInstance {
public:
    static constexpr int kDenseLimit = 4096;

    UbqpInstance(int n, std::span<const UbqpTriple> triples, std::string name = {});

    /// Builds from a full matrix; throws DimensionError if it is not square and symmetric.
    static UbqpInstance from_dense(const std::vector<std::vector<std::int64_t>>& q,
                                   std::string name = {});

    int size() const noexcept { return n_; }
    const std::string& name() const noexcept { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }

    std::optional<std::int64_t> best_known() const noexcept { return best_known_; }
    void set_best_known(std::optional<std::int64_t> value) { best_known_ = value; }

    std::int64_t coef(int i, int j) const;
    std::int64_t diag(int i) const { return diag_[static_cast<std::size_t>(i)]; }

    /// Off-diagonal nonzero columns of row i and their values.
    std::span<const int> row_columns(int i) const {
        return {cols_.data() + offsets_[i], cols_.data() + offsets_[i + 1]};
    }
    std::span<const std::int64_t> row_values(int i) const {
        return {vals_.data() + offsets_[i], vals_.data() + offsets_[i + 1]};
    }

    std::int64_t max_abs() const noexcept { return max_abs_; }

    /// Stored entries with i <= j (the count an ORLIB file lists).
    std::size_t upper_nonzeros() const noexcept;

private:
    UbqpInstance() = default;
    void build(std::span<const UbqpTriple> triples);

    int n_ = 0;
    std::string name_;
    std::optional<std::int64_t> best_known_;
    std::vector<std::int64_t> diag_;
    std::vector<std::size_t> offsets_;
    std::vector<int> cols_;
    std::vector<std::int64_t> vals_;
    std::vector<std::int32_t> dense_;
    std::int64_t max_abs_ = 0;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// TSPLIB EUC_2D distance: Euclidean distance rounded to the nearest integer.
int euc2d_distance(Point a, Point b) noexcept;

/// Symmetric Euclidean TSP instance with integer (nint) distances.
class TspInstance {
public:
    static constexpr int kMatrixLimit = 5000;

    explicit TspInstance(std::vector<Point> coords, std::string name = {});

    int size() const noexcept { return static_cast<int>(coords_.size()); }
    const std::string& name() const noexcept { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }

    std::optional<std::int64_t> best_known() const noexcept { return best_known_; }
    void set_best_known(std::optional<std::int64_t> value) { best_known_ = value; }

    std::span<const Point> coords() const noexcept { return coords_; }

    int distance(int i, int j) const noexcept {
        if (!matrix_.empty())
            return matrix_[static_cast<std::size_t>(i) * coords_.size() + static_cast<std::size_t>(j)];
        return euc2d_distance(coords_[i], coords_[j]);
    }

private:
    std::vector<Point> coords_;
    std::string name_;
    std::optional<std::int64_t> best_known_;
    std::vector<int> matrix_;
};

/// ORLIB "bqp" sparse format: instance count, then per instance "n nnz" and
/// nnz triples "i j q_ij" with 1-based indices.
std::vector<UbqpInstance> parse_orlib_ubqp(std::istream& in);
std::vector<UbqpInstance> parse_orlib_ubqp(std::string_view text);
void write_orlib_ubqp(std::ostream& out, std::span<const UbqpInstance> instances);

/// TSPLIB text, EUC_2D only.
TspInstance parse_tsplib(std::istream& in);
TspInstance parse_tsplib(std::string_view text);
void write_tsplib(std::ostream& out, const TspInstance& instance);

std::int64_t evaluate_ubqp(const UbqpInstance& instance, const BitString& x);
std::int64_t evaluate_tour(const TspInstance& instance, const Tour& tour);

bool is_valid_tour(const Tour& tour, int n);

BitString random_bits(int n, Rng& rng);
Tour random_tour(int n, Rng& rng);

/// Uniform random test instances.
UbqpInstance random_ubqp(int n, double density, int max_abs, Rng& rng, std::string name = {});
TspInstance random_tsp(int n, double extent, Rng& rng, std::string name = {});

}  // namespace hcsmooth
