#include "hcsmooth/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <bit>
#include <numeric>
#include <string>

#include "hcsmooth/errors.hpp"

namespace hcsmooth {

BitString decode_mask(std::uint32_t mask, int n) {
    BitString x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((mask >> i) & 1U);
    return x;
}

std::uint32_t encode_mask(const BitString& x) {
    if (x.size() > 32) throw DimensionError("solution too long for a mask");
    std::uint32_t mask = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i]) mask |= 1U << i;
    return mask;
}

namespace {

/// Dense copy of the active matrix, read entry by entry from its parts.
std::vector<double> dense_entries(const UbqpObjective& objective) {
    const int n = objective.size();
    std::vector<double> e(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double base;
            if (objective.replacement)
                base = i == j ? objective.replacement->diag(i) : objective.replacement->value(i, j);
            else
                base = static_cast<double>(objective.original->coef(i, j));
            double v = objective.base_weight * base;
            if (objective.toy) v += objective.toy_weight * static_cast<double>(objective.toy->entry(i, j));
            e[static_cast<std::size_t>(i * n + j)] = v;
        }
    return e;
}

bool approx_equal(double a, double b) { return std::fabs(a - b) <= 1e-9 * std::max(1.0, std::fabs(b)); }

}  // namespace

EnumerationReport enumerate_ubqp(const UbqpObjective& objective) {
    const int n = objective.size();
    if (n > kMaxEnumerationSize)
        throw CostGuardError("exhaustive enumeration is limited to n <= " + std::to_string(kMaxEnumerationSize));
    const auto e = dense_entries(objective);
    const std::uint32_t count = 1U << n;

    EnumerationReport r;
    r.n = n;
    r.values.assign(count, 0.0);

    // Gray-code walk: one bit changes per step, so each value costs O(n).
    std::vector<std::uint8_t> x(static_cast<std::size_t>(n), 0);
    double value = 0.0;
    std::uint32_t mask = 0;
    r.values[0] = 0.0;
    for (std::uint32_t step = 1; step < count; ++step) {
        const int g = std::countr_zero(step);
        double row = 0.0;
        for (int j = 0; j < n; ++j)
            if (j != g && x[static_cast<std::size_t>(j)]) row += e[static_cast<std::size_t>(g * n + j)];
        const double delta = e[static_cast<std::size_t>(g * n + g)] + 2.0 * row;
        value += x[static_cast<std::size_t>(g)] ? -delta : delta;
        x[static_cast<std::size_t>(g)] ^= 1U;
        mask ^= 1U << g;
        r.values[mask] = value;
    }

    r.best_value = *std::max_element(r.values.begin(), r.values.end());
    r.basin.assign(count, 0);
    std::vector<std::uint32_t> next(count);
    for (std::uint32_t m = 0; m < count; ++m) {
        if (approx_equal(r.values[m], r.best_value)) r.global_optima.push_back(m);
        double best_gain = 0.0;
        int best_bit = -1;
        for (int i = 0; i < n; ++i) {
            const double gain = r.values[m ^ (1U << i)] - r.values[m];
            if (gain > best_gain) {
                best_gain = gain;
                best_bit = i;
            }
        }
        next[m] = best_bit < 0 ? m : (m ^ (1U << best_bit));
        if (best_bit < 0) r.local_optima.push_back(m);
    }
    // Values strictly increase along successor chains, so chains end.
    for (std::uint32_t m = 0; m < count; ++m) {
        std::uint32_t t = m;
        while (next[t] != t) t = next[t];
        r.basin[m] = t;
    }
    return r;
}

UnimodalCertificate verify_unimodal(const BitString& anchor) {
    const int n = static_cast<int>(anchor.size());
    if (n < 1) throw DimensionError("anchor must not be empty");
    if (n > kMaxUnimodalSize)
        throw CostGuardError("unimodality check is limited to n <= " + std::to_string(kMaxUnimodalSize));
    const UbqpInstance shape(n, std::span<const UbqpTriple>{});
    const auto objective = UbqpObjective::toy_only(shape, ToyUbqp(anchor));
    const auto report = enumerate_ubqp(objective);
    const std::uint32_t target = encode_mask(anchor);

    UnimodalCertificate c;
    bool anchor_is_optimum = false;
    for (auto m : report.local_optima) {
        if (m == target) anchor_is_optimum = true;
        else c.other_local_optima.push_back(decode_mask(m, n));
    }
    bool all_reach = true;
    for (std::uint32_t m = 0; m < report.basin.size(); ++m) {
        if (report.basin[m] == target) continue;
        all_reach = false;
        if (c.stray_starts.size() < 16) c.stray_starts.push_back(decode_mask(m, n));
    }
    c.unimodal = anchor_is_optimum && c.other_local_optima.empty() && all_reach;
    return c;
}

bool is_kbit_optimal(const UbqpObjective& objective, const BitString& x, int k) {
    const int n = objective.size();
    if (static_cast<int>(x.size()) != n) throw DimensionError("solution length differs from objective size");
    if (n > kMaxKbitSize || k > kMaxKbitOrder)
        throw CostGuardError("k-bit check is limited to n <= 16 and k <= 4");
    if (k < 1 || k > n) throw ConfigError("k must lie in [1, n]");

    const double base = objective.value(x);
    std::vector<int> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    BitString y = x;
    for (;;) {
        for (int i : idx) y[static_cast<std::size_t>(i)] ^= 1U;
        const double v = objective.value(y);
        for (int i : idx) y[static_cast<std::size_t>(i)] ^= 1U;
        if (v > base && !approx_equal(v, base)) return false;

        int p = k - 1;
        while (p >= 0 && idx[static_cast<std::size_t>(p)] == n - k + p) --p;
        if (p < 0) break;
        ++idx[static_cast<std::size_t>(p)];
        for (int q = p + 1; q < k; ++q) idx[static_cast<std::size_t>(q)] = idx[static_cast<std::size_t>(q - 1)] + 1;
    }
    return true;
}

TourEnumeration enumerate_tours(const DistanceTable& distances) {
    const int n = distances.size();
    if (n > kMaxTourEnumerationSize)
        throw CostGuardError("tour enumeration is limited to n <= " + std::to_string(kMaxTourEnumerationSize));
    if (n < 3) throw DimensionError("tour enumeration needs at least 3 cities");

    Tour t(static_cast<std::size_t>(n));
    std::iota(t.begin(), t.end(), 0);
    TourEnumeration out;
    bool first = true;
    do {
        const double len = distances.tour_length(t);
        if (first || (len < out.best_length && !approx_equal(len, out.best_length))) {
            out.best_length = len;
            out.optima.clear();
            out.optima.push_back(t);
            first = false;
        } else if (approx_equal(len, out.best_length)) {
            out.optima.push_back(t);
        }
    } while (std::next_permutation(t.begin() + 1, t.end()));
    return out;
}

bool has_improving_three_exchange(const DistanceTable& distances, const Tour& tour, double rel_tol) {
    const int n = static_cast<int>(tour.size());
    const double current = distances.tour_length(tour);
    const double threshold = current - rel_tol * std::max(1.0, std::fabs(current));
    auto seg = [&](int from, int to) { return Tour(tour.begin() + from, tour.begin() + to); };
    auto rev = [](Tour s) {
        std::reverse(s.begin(), s.end());
        return s;
    };
    auto join = [](std::initializer_list<const Tour*> parts) {
        Tour out;
        for (const Tour* p : parts) out.insert(out.end(), p->begin(), p->end());
        return out;
    };

    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                const Tour a = seg(0, i + 1);
                const Tour b = seg(i + 1, j + 1);
                const Tour c = seg(j + 1, k + 1);
                const Tour d = seg(k + 1, n);
                const Tour rb = rev(b);
                const Tour rc = rev(c);
                const Tour candidates[] = {
                    join({&a, &rb, &c, &d}), join({&a, &b, &rc, &d}), join({&a, &rb, &rc, &d}),
                    join({&a, &c, &b, &d}),  join({&a, &c, &rb, &d}), join({&a, &rc, &b, &d}),
                    join({&a, &rc, &rb, &d}),
                };
                for (const auto& cand : candidates)
                    if (distances.tour_length(cand) < threshold) return true;
            }
    return false;
}

}  // namespace hcsmooth
