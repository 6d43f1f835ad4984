#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hcsmooth/errors.hpp"
#include "hcsmooth/localsearch.hpp"
#include "hcsmooth/oracle.hpp"

using namespace hcsmooth;

namespace {

UbqpInstance zero_instance(int n) {
    return UbqpInstance::from_dense(std::vector<std::vector<std::int64_t>>(
        static_cast<std::size_t>(n), std::vector<std::int64_t>(static_cast<std::size_t>(n), 0)));
}

// Flips every k-subset with nested index loops and evaluates from scratch.
bool brute_kbit_optimal(const UbqpInstance& q, const BitString& x, int k) {
    const auto base = evaluate_ubqp(q, x);
    const int n = q.size();
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (;;) {
        BitString y = x;
        for (int i : idx) y[static_cast<std::size_t>(i)] ^= 1;
        if (evaluate_ubqp(q, y) > base) return false;
        int p = k - 1;
        while (p >= 0 && idx[static_cast<std::size_t>(p)] == n - k + p) --p;
        if (p < 0) return true;
        ++idx[static_cast<std::size_t>(p)];
        for (int i = p + 1; i < k; ++i) idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i - 1)] + 1;
    }
}

}  // namespace

TEST_CASE("mask encoding round trip") {
    CHECK(decode_mask(0b101, 4) == BitString{1, 0, 1, 0});
    CHECK(encode_mask({0, 1, 1}) == 0b110u);
    for (std::uint32_t m = 0; m < 64; ++m) CHECK(encode_mask(decode_mask(m, 6)) == m);
}

TEST_CASE("two-variable example has two global optima") {
    const auto q = parse_orlib_ubqp("1\n2 3\n1 1 2\n1 2 -1\n2 2 3\n").front();
    const auto r = enumerate_ubqp(UbqpObjective::raw(q));
    CHECK(r.best_value == 3.0);
    CHECK(r.global_optima == std::vector<std::uint32_t>{0b10, 0b11});
    CHECK(r.values == std::vector<double>{0, 2, 3, 3});
}

TEST_CASE("zero matrix: every solution is optimal and a fixed point") {
    const auto z = zero_instance(5);
    const auto r = enumerate_ubqp(UbqpObjective::raw(z));
    CHECK(r.global_optima.size() == 32);
    CHECK(r.local_optima.size() == 32);
    for (std::uint32_t m = 0; m < 32; ++m) CHECK(r.basin[m] == m);
}

TEST_CASE("enumeration values match direct evaluation") {
    Rng rng(41);
    const auto q = random_ubqp(10, 0.5, 20, rng);
    const auto r = enumerate_ubqp(UbqpObjective::raw(q));
    double best = -1e18;
    for (std::uint32_t m = 0; m < 1024; ++m) {
        const auto v = evaluate_ubqp(q, decode_mask(m, 10));
        CHECK(r.values[m] == static_cast<double>(v));
        best = std::max(best, static_cast<double>(v));
    }
    CHECK(r.best_value == best);
    for (auto m : r.local_optima) CHECK(brute_kbit_optimal(q, decode_mask(m, 10), 1));
    for (auto m : r.basin) CHECK(std::binary_search(r.local_optima.begin(), r.local_optima.end(), m));
}

TEST_CASE("toy landscape on 8 bits is unimodal with the anchor on top") {
    Rng rng(42);
    for (int t = 0; t < 20; ++t) {
        const auto anchor = random_bits(8, rng);
        const ToyUbqp toy(anchor);
        const auto shape = zero_instance(8);
        const auto r = enumerate_ubqp(UbqpObjective::toy_only(shape, toy));
        const auto a = encode_mask(anchor);
        CHECK(r.local_optima == std::vector<std::uint32_t>{a});
        if (std::count(anchor.begin(), anchor.end(), 1) > 0)
            CHECK(r.global_optima == std::vector<std::uint32_t>{a});
        for (auto b : r.basin) CHECK(b == a);
        CHECK(verify_unimodal(anchor).unimodal);
    }
}

TEST_CASE("unimodality certificate for fixed anchors") {
    CHECK(verify_unimodal({1, 0, 1, 1, 0}).unimodal);
    CHECK(verify_unimodal({1, 1, 1, 1, 1, 1}).unimodal);
    CHECK(verify_unimodal({0, 0, 1}).unimodal);
    const auto cert = verify_unimodal({0, 1, 0, 0, 1, 1, 0, 1, 1, 0, 1, 0});
    CHECK(cert.unimodal);
    CHECK(cert.other_local_optima.empty());
    CHECK(cert.stray_starts.empty());
}

TEST_CASE("k-bit optimality agrees with a brute check") {
    Rng rng(43);
    bool found_gap = false;
    for (int t = 0; t < 300; ++t) {
        const auto q = random_ubqp(6, 0.7, 10, rng);
        const auto obj = UbqpObjective::raw(q);
        const auto x = ubqp_best_improvement_ls(obj, random_bits(6, rng)).local_opt;
        for (int k = 1; k <= 3; ++k) CHECK(is_kbit_optimal(obj, x, k) == brute_kbit_optimal(q, x, k));
        CHECK(is_kbit_optimal(obj, x, 1));
        found_gap |= !is_kbit_optimal(obj, x, 2);
    }
    // Some 1-flip optimum is improvable by a pair flip.
    CHECK(found_gap);
}

TEST_CASE("oracle cost guards") {
    const auto big = zero_instance(21);
    CHECK_THROWS_AS(enumerate_ubqp(UbqpObjective::raw(big)), CostGuardError);
    CHECK_THROWS_AS(verify_unimodal(BitString(13, 1)), CostGuardError);
    const auto q17 = zero_instance(17);
    CHECK_THROWS_AS(is_kbit_optimal(UbqpObjective::raw(q17), BitString(17, 0), 2), CostGuardError);
    const auto q8 = zero_instance(8);
    CHECK_THROWS_AS(is_kbit_optimal(UbqpObjective::raw(q8), BitString(8, 0), 5), CostGuardError);
    CHECK_THROWS_AS(is_kbit_optimal(UbqpObjective::raw(q8), BitString(8, 0), 0), ConfigError);
    CHECK_THROWS_AS(enumerate_tours(DistanceTable(9)), CostGuardError);
}

TEST_CASE("tour enumeration on a circle finds the ring in both directions") {
    const int n = 7;
    std::vector<Point> pts;
    const int order[n] = {0, 3, 5, 1, 6, 2, 4};
    std::vector<Point> placed(n);
    for (int k = 0; k < n; ++k) {
        const double t = 2 * std::numbers::pi * k / n;
        placed[static_cast<std::size_t>(order[k])] = {100 * std::cos(t), 100 * std::sin(t)};
    }
    DistanceTable d(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            d.set(i, j, std::hypot(placed[static_cast<std::size_t>(i)].x - placed[static_cast<std::size_t>(j)].x,
                                   placed[static_cast<std::size_t>(i)].y - placed[static_cast<std::size_t>(j)].y));
    const auto e = enumerate_tours(d);
    REQUIRE(e.optima.size() == 2);
    const Tour ring(order, order + n);
    Tour rev{0};
    for (int k = n - 1; k >= 1; --k) rev.push_back(order[k]);
    CHECK(std::find(e.optima.begin(), e.optima.end(), ring) != e.optima.end());
    CHECK(std::find(e.optima.begin(), e.optima.end(), rev) != e.optima.end());
    CHECK(e.best_length == doctest::Approx(d.tour_length(ring)));
    CHECK_FALSE(has_improving_three_exchange(d, ring));

    const Tour crossed{0, 5, 3, 1, 6, 2, 4};
    CHECK(has_improving_three_exchange(d, crossed));
}

TEST_CASE("explicit 3-exchange scan agrees with exhaustive search on small tours") {
    Rng rng(44);
    for (int t = 0; t < 10; ++t) {
        const auto inst = random_tsp(7, 100.0, rng);
        const auto d = raw_distances(inst);
        const auto e = enumerate_tours(d);
        for (const auto& tour : e.optima) CHECK_FALSE(has_improving_three_exchange(d, tour));
        const auto res = three_opt_first_improvement(d, random_tour(7, rng), inst);
        CHECK_FALSE(has_improving_three_exchange(d, res.local_opt));
    }
}
