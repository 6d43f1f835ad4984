#include "hcsmooth/localsearch.hpp"

#include <algorithm>
#include <array>
#include <numeric>

#include "hcsmooth/errors.hpp"

namespace hcsmooth {

GainTable::GainTable(const UbqpObjective& objective, BitString x) : objective_(objective), x_(std::move(x)) {
    const int n = objective.size();
    if (static_cast<int>(x_.size()) != n)
        throw DimensionError("gain table: solution length " + std::to_string(x_.size()) + " != n " + std::to_string(n));
    if (objective.toy && objective.toy->size() != n) throw DimensionError("gain table: toy size mismatch");
    const UbqpInstance& q = *objective.original;
    field_.assign(static_cast<std::size_t>(n), 0);
    if (objective.replacement) alt_field_.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        if (!x_[static_cast<std::size_t>(i)]) continue;
        auto cols = q.row_columns(i);
        auto vals = q.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k) field_[static_cast<std::size_t>(cols[k])] += vals[k];
        if (objective.replacement) {
            auto alt = objective.replacement->row_values(i);
            for (std::size_t k = 0; k < cols.size(); ++k) alt_field_[static_cast<std::size_t>(cols[k])] += alt[k];
        }
    }
    for (int i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (!x_[k]) continue;
        // field already counts each active pair from both ends.
        original_value_ += q.diag(i) + field_[k];
        if (objective.replacement) alt_value_ += objective.replacement->diag(i) + alt_field_[k];
        ++ones_;
        if (objective.toy && objective.toy->anchor()[k]) ++overlap_;
    }
}

std::vector<double> GainTable::gains() const {
    std::vector<double> out(x_.size());
    for (int i = 0; i < size(); ++i) out[static_cast<std::size_t>(i)] = gain(i);
    return out;
}

void GainTable::flip(int i) {
    const auto k = static_cast<std::size_t>(i);
    const UbqpInstance& q = *objective_.original;
    original_value_ += original_gain(i);
    if (!alt_field_.empty()) {
        const double sign = x_[k] ? -1.0 : 1.0;
        alt_value_ += sign * (objective_.replacement->diag(i) + 2.0 * alt_field_[k]);
    }
    const bool was_set = x_[k] != 0;
    const std::int64_t d = was_set ? -1 : 1;
    ones_ += d;
    if (objective_.toy && objective_.toy->anchor()[k]) overlap_ += d;
    x_[k] = was_set ? 0 : 1;

    auto cols = q.row_columns(i);
    auto vals = q.row_values(i);
    for (std::size_t e = 0; e < cols.size(); ++e) field_[static_cast<std::size_t>(cols[e])] += d * vals[e];
    if (!alt_field_.empty()) {
        auto alt = objective_.replacement->row_values(i);
        const double dd = static_cast<double>(d);
        for (std::size_t e = 0; e < cols.size(); ++e) alt_field_[static_cast<std::size_t>(cols[e])] += dd * alt[e];
    }
}

double GainTable::value() const noexcept {
    const double base = alt_field_.empty() ? static_cast<double>(original_value_) : alt_value_;
    double g = objective_.base_weight * base;
    if (objective_.toy) g += objective_.toy_weight * static_cast<double>(ToyUbqp::fitness_from_sums(overlap_, ones_));
    return g;
}

UbqpLsResult ubqp_best_improvement_ls(const UbqpObjective& objective, const BitString& start,
                                      Incumbent<BitString> incumbent, LsLimits limits) {
    GainTable table(objective, start);
    const int n = table.size();
    UbqpLsResult result;
    if (incumbent.solution && incumbent.value >= table.original_value()) {
        result.best = *incumbent.solution;
        result.best_value = incumbent.value;
    } else {
        result.best = start;
        result.best_value = table.original_value();
    }

    for (;;) {
        if (result.moves >= limits.max_moves) {
            result.completed = false;
            break;
        }
        int arg = -1;
        double top = 0.0;
        for (int i = 0; i < n; ++i) {
            const double g = table.gain(i);
            if (g > top) {
                top = g;
                arg = i;
            }
        }
        result.evaluations += n;
        if (arg < 0) break;
        table.flip(arg);
        ++result.moves;
        if (table.original_value() > result.best_value) {
            result.best_value = table.original_value();
            result.best = table.solution();
        }
    }
    result.local_opt = table.solution();
    result.local_value = table.value();
    return result;
}

BitString perturb_bits(const BitString& x, int strength, Rng& rng) {
    const int n = static_cast<int>(x.size());
    if (strength < 1 || strength > n)
        throw ConfigError("perturbation strength " + std::to_string(strength) + " outside [1," + std::to_string(n) + "]");
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    BitString y = x;
    for (int s = 0; s < strength; ++s) {
        const auto pick = static_cast<std::size_t>(s) + uniform_index(rng, static_cast<std::size_t>(n - s));
        std::swap(idx[static_cast<std::size_t>(s)], idx[pick]);
        auto& bit = y[static_cast<std::size_t>(idx[static_cast<std::size_t>(s)])];
        bit = bit ? 0 : 1;
    }
    return y;
}

std::vector<std::vector<int>> nearest_neighbors(const TspInstance& instance, int k) {
    const int n = instance.size();
    k = std::min(k, n - 1);
    std::vector<std::vector<int>> out(static_cast<std::size_t>(n));
    std::vector<int> others;
    for (int i = 0; i < n; ++i) {
        others.clear();
        for (int j = 0; j < n; ++j)
            if (j != i) others.push_back(j);
        std::partial_sort(others.begin(), others.begin() + k, others.end(), [&](int a, int b) {
            const int da = instance.distance(i, a), db = instance.distance(i, b);
            return da != db ? da < db : a < b;
        });
        out[static_cast<std::size_t>(i)].assign(others.begin(), others.begin() + k);
    }
    return out;
}

namespace {

// The seven non-identity reconnections of tour A B C after removing
// (a,b), (c,d), (e,f), where B = b..c and C = d..e.
enum class Reconnect { rev_b, rev_c, rev_bc, swap, swap_rev_c, swap_rev_b, rev_whole };

constexpr std::array<Reconnect, 7> kMoveOrder = {Reconnect::rev_b,      Reconnect::rev_c,      Reconnect::rev_bc,
                                                 Reconnect::swap,       Reconnect::swap_rev_c, Reconnect::swap_rev_b,
                                                 Reconnect::rev_whole};

template <class Dist>
auto added_length(Reconnect m, const Dist& d, int a, int b, int c, int dd, int e, int f) {
    switch (m) {
        case Reconnect::rev_b: return d(a, c) + d(b, dd) + d(e, f);
        case Reconnect::rev_c: return d(a, b) + d(c, e) + d(dd, f);
        case Reconnect::rev_bc: return d(a, c) + d(b, e) + d(dd, f);
        case Reconnect::swap: return d(a, dd) + d(e, b) + d(c, f);
        case Reconnect::swap_rev_c: return d(a, e) + d(dd, b) + d(c, f);
        case Reconnect::swap_rev_b: return d(a, dd) + d(e, c) + d(b, f);
        case Reconnect::rev_whole: return d(a, e) + d(dd, c) + d(b, f);
    }
    return d(a, b) + d(c, dd) + d(e, f);
}

void apply_reconnect(Tour& t, Reconnect m, int i, int j, int k, std::vector<int>& buffer) {
    auto begin = t.begin();
    auto b0 = begin + i + 1, b1 = begin + j + 1, c1 = begin + k + 1;
    switch (m) {
        case Reconnect::rev_b: std::reverse(b0, b1); return;
        case Reconnect::rev_c: std::reverse(b1, c1); return;
        case Reconnect::rev_bc:
            std::reverse(b0, b1);
            std::reverse(b1, c1);
            return;
        case Reconnect::rev_whole: std::reverse(b0, c1); return;
        default: break;
    }
    buffer.clear();
    if (m == Reconnect::swap_rev_c)
        buffer.insert(buffer.end(), std::make_reverse_iterator(c1), std::make_reverse_iterator(b1));
    else
        buffer.insert(buffer.end(), b1, c1);
    if (m == Reconnect::swap_rev_b)
        buffer.insert(buffer.end(), std::make_reverse_iterator(b1), std::make_reverse_iterator(b0));
    else
        buffer.insert(buffer.end(), b0, b1);
    std::copy(buffer.begin(), buffer.end(), b0);
}

}  // namespace

TourLsResult three_opt_first_improvement(const DistanceTable& active, const Tour& start, const TspInstance& original,
                                         Incumbent<Tour> incumbent, const ThreeOptOptions& options,
                                         const std::vector<std::vector<int>>* candidates) {
    const int n = original.size();
    if (n < 5) throw DimensionError("3-Opt needs at least 5 cities");
    if (active.size() != n || !is_valid_tour(start, n)) throw DimensionError("3-Opt: invalid start tour");

    TourLsResult result;
    Tour t = start;
    std::int64_t fo = evaluate_tour(original, t);
    double current = active.tour_length(t);
    if (incumbent.solution && incumbent.value <= fo) {
        result.best = *incumbent.solution;
        result.best_value = incumbent.value;
    } else {
        result.best = t;
        result.best_value = fo;
    }

    std::vector<std::vector<int>> owned;
    if (options.neighbor_k > 0 && !candidates) {
        owned = nearest_neighbors(original, options.neighbor_k);
        candidates = &owned;
    }
    const bool restricted = options.neighbor_k > 0;
    std::vector<int> pos(static_cast<std::size_t>(n));
    auto refresh_positions = [&](int from, int to) {
        for (int p = from; p <= to; ++p) pos[static_cast<std::size_t>(t[static_cast<std::size_t>(p)])] = p;
    };
    refresh_positions(0, n - 1);

    auto orig = [&](int x, int y) -> std::int64_t { return original.distance(x, y); };
    std::vector<int> buffer;
    std::vector<int> js, ks;

    // Returns true if a move was applied at (i, j, k).
    auto try_triple = [&](int i, int j, int k) {
        const int a = t[static_cast<std::size_t>(i)], b = t[static_cast<std::size_t>(i + 1)];
        const int c = t[static_cast<std::size_t>(j)], d = t[static_cast<std::size_t>(j + 1)];
        const int e = t[static_cast<std::size_t>(k)], f = t[static_cast<std::size_t>((k + 1) % n)];
        const double removed = active(a, b) + active(c, d) + active(e, f);
        const double tol = 1e-9 * std::max(1.0, removed);
        for (Reconnect m : kMoveOrder) {
            ++result.evaluations;
            const double delta = added_length(m, active, a, b, c, d, e, f) - removed;
            if (delta < -tol) {
                fo += added_length(m, orig, a, b, c, d, e, f) - (orig(a, b) + orig(c, d) + orig(e, f));
                current += delta;
                apply_reconnect(t, m, i, j, k, buffer);
                if (restricted) refresh_positions(i + 1, k);
                ++result.moves;
                if (fo < result.best_value) {
                    result.best_value = fo;
                    result.best = t;
                }
                return true;
            }
        }
        return false;
    };

    auto collect = [&](std::vector<int>& out, std::initializer_list<int> cities, int lo, int hi) {
        out.clear();
        for (int city : cities)
            for (int v : (*candidates)[static_cast<std::size_t>(city)]) {
                const int p = pos[static_cast<std::size_t>(v)];
                if (p >= lo && p <= hi) out.push_back(p);
                if (p - 1 >= lo && p - 1 <= hi) out.push_back(p - 1);
            }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
    };

    bool improved = true;
    while (improved) {
        improved = false;
        for (int i = 0; i <= n - 3; ++i) {
            if (!restricted) {
                for (int j = i + 1; j <= n - 2; ++j)
                    for (int k = j + 1; k <= n - 1; ++k) improved |= try_triple(i, j, k);
                continue;
            }
            collect(js, {t[static_cast<std::size_t>(i)], t[static_cast<std::size_t>(i + 1)]}, i + 1, n - 2);
            for (std::size_t jj = 0; jj < js.size(); ++jj) {
                const int j = js[jj];
                collect(ks,
                        {t[static_cast<std::size_t>(i)], t[static_cast<std::size_t>(i + 1)], t[static_cast<std::size_t>(j)],
                         t[static_cast<std::size_t>(j + 1)]},
                        j + 1, n - 1);
                for (int k : ks) improved |= try_triple(i, j, k);
            }
        }
    }
    result.local_opt = std::move(t);
    result.local_value = current;
    return result;
}

Tour double_bridge_at(const Tour& tour, int a, int b, int c) {
    const int n = static_cast<int>(tour.size());
    if (n < 8) throw DimensionError("double bridge needs at least 8 cities");
    if (!(0 < a && a < b && b < c && c < n)) throw ConfigError("double bridge cuts must satisfy 0 < a < b < c < n");
    Tour out;
    out.reserve(tour.size());
    out.insert(out.end(), tour.begin(), tour.begin() + a);
    out.insert(out.end(), tour.begin() + b, tour.begin() + c);
    out.insert(out.end(), tour.begin() + a, tour.begin() + b);
    out.insert(out.end(), tour.begin() + c, tour.end());
    return out;
}

Tour double_bridge(const Tour& tour, Rng& rng) {
    const int n = static_cast<int>(tour.size());
    if (n < 8) throw DimensionError("double bridge needs at least 8 cities");
    std::array<int, 3> cuts{};
    for (;;) {
        for (auto& cut : cuts) cut = 1 + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(n - 1)));
        if (cuts[0] != cuts[1] && cuts[0] != cuts[2] && cuts[1] != cuts[2]) break;
    }
    std::sort(cuts.begin(), cuts.end());
    return double_bridge_at(tour, cuts[0], cuts[1], cuts[2]);
}

}  // namespace hcsmooth
