#pragma once

#include <cstdint>
#include <vector>

#include "hcsmooth/instances.hpp"
#include "hcsmooth/smoothing.hpp"

namespace hcsmooth {

/// Solutions of size n <= 20 are indexed by mask: bit i of the mask is x_i.
BitString decode_mask(std::uint32_t mask, int n);
std::uint32_t encode_mask(const BitString& x);

inline constexpr int kMaxEnumerationSize = 20;
inline constexpr int kMaxUnimodalSize = 12;
inline constexpr int kMaxKbitSize = 16;
inline constexpr int kMaxKbitOrder = 4;
inline constexpr int kMaxTourEnumerationSize = 8;

struct EnumerationReport {
    int n = 0;
    std::vector<double> values;                 ///< objective value per mask
    std::vector<std::uint32_t> global_optima;   ///< ascending masks
    std::vector<std::uint32_t> local_optima;    ///< 1-bit local optima, ascending
    std::vector<std::uint32_t> basin;           ///< terminal of best-improvement per start mask
    double best_value = 0.0;
};

/// Visits all 2^n solutions in Gray-code order. Basins follow the solver's
/// rule: flip the largest strictly positive gain, lowest index on ties.
/// Throws CostGuardError for n > 20.
EnumerationReport enumerate_ubqp(const UbqpObjective& objective);

struct UnimodalCertificate {
    bool unimodal = false;
    std::vector<BitString> other_local_optima;  ///< 1-bit optima besides the anchor
    std::vector<BitString> stray_starts;        ///< starts whose descent misses the anchor (first 16)
};

/// Exhaustive check that the toy built on `anchor` has the anchor as its only
/// 1-bit local optimum and that every descent ends there. n <= 12.
UnimodalCertificate verify_unimodal(const BitString& anchor);

/// True iff no flip of exactly k distinct bits strictly improves `objective`
/// at x. n <= 16, 1 <= k <= 4.
bool is_kbit_optimal(const UbqpObjective& objective, const BitString& x, int k);

struct TourEnumeration {
    double best_length = 0.0;
    std::vector<Tour> optima;  ///< every optimal tour starting at city 0, both directions
};

/// All (n-1)! tours with city 0 first. n <= 8.
TourEnumeration enumerate_tours(const DistanceTable& distances);

/// Explicit scan of every 3-edge removal and its seven reconnections, building
/// each candidate tour in full. Returns true if any is shorter by more than
/// the relative tolerance.
bool has_improving_three_exchange(const DistanceTable& distances, const Tour& tour, double rel_tol = 1e-9);

}  // namespace hcsmooth
