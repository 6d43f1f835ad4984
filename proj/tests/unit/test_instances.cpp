#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hcsmooth/errors.hpp"
#include "hcsmooth/instances.hpp"

using namespace hcsmooth;

namespace {

// Straight double loop over the full symmetric matrix.
std::int64_t brute_value(const UbqpInstance& q, const BitString& x) {
    std::int64_t v = 0;
    for (int i = 0; i < q.size(); ++i)
        for (int j = 0; j < q.size(); ++j)
            if (x[static_cast<std::size_t>(i)] && x[static_cast<std::size_t>(j)]) v += q.coef(i, j);
    return v;
}

UbqpInstance small_q() { return parse_orlib_ubqp("1\n2 3\n1 1 2\n1 2 -1\n2 2 3\n").front(); }

}  // namespace

TEST_CASE("orlib parser reads the two-variable off-diagonal case") {
    auto v = parse_orlib_ubqp("1\n2 1\n1 2 5\n");
    REQUIRE(v.size() == 1);
    CHECK(v[0].size() == 2);
    CHECK(v[0].coef(0, 0) == 0);
    CHECK(v[0].coef(0, 1) == 5);
    CHECK(v[0].coef(1, 0) == 5);
    CHECK(v[0].coef(1, 1) == 0);
}

TEST_CASE("orlib parser reads a single diagonal entry") {
    auto v = parse_orlib_ubqp("1\n1 1\n1 1 -3\n");
    REQUIRE(v.size() == 1);
    CHECK(v[0].size() == 1);
    CHECK(v[0].coef(0, 0) == -3);
}

TEST_CASE("orlib parser errors") {
    SUBCASE("truncated stream reports a line") {
        try {
            parse_orlib_ubqp("1\n3 2\n1 2 5\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() >= 3);
        }
    }
    SUBCASE("non-numeric token") { CHECK_THROWS_AS(parse_orlib_ubqp("1\n2 1\n1 x 5\n"), ParseError); }
    SUBCASE("index out of range") { CHECK_THROWS_AS(parse_orlib_ubqp("1\n2 1\n1 3 5\n"), BoundsError); }
    SUBCASE("zero index") { CHECK_THROWS_AS(parse_orlib_ubqp("1\n2 1\n0 1 5\n"), BoundsError); }
    SUBCASE("duplicate pair in either order") {
        CHECK_THROWS_AS(parse_orlib_ubqp("1\n2 2\n1 2 5\n2 1 5\n"), DuplicateEntryError);
    }
}

TEST_CASE("orlib round trip keeps every coefficient") {
    Rng rng(7);
    std::vector<UbqpInstance> v;
    v.push_back(random_ubqp(12, 0.4, 50, rng, "a"));
    v.push_back(random_ubqp(9, 0.8, 10, rng, "b"));
    std::ostringstream out;
    write_orlib_ubqp(out, v);
    auto back = parse_orlib_ubqp(out.str());
    REQUIRE(back.size() == 2);
    for (std::size_t k = 0; k < 2; ++k) {
        REQUIRE(back[k].size() == v[k].size());
        for (int i = 0; i < v[k].size(); ++i)
            for (int j = 0; j < v[k].size(); ++j) CHECK(back[k].coef(i, j) == v[k].coef(i, j));
    }
}

TEST_CASE("evaluate_ubqp on the 2x2 example") {
    const auto q = small_q();
    CHECK(evaluate_ubqp(q, {1, 1}) == 3);
    CHECK(evaluate_ubqp(q, {1, 0}) == 2);
    CHECK(evaluate_ubqp(q, {0, 1}) == 3);
    CHECK(evaluate_ubqp(q, {0, 0}) == 0);
    CHECK_THROWS_AS((evaluate_ubqp(q, {1, 0, 1})), DimensionError);
}

TEST_CASE("evaluate_ubqp matches a brute double loop on random instances") {
    Rng rng(11);
    for (int t = 0; t < 50; ++t) {
        const int n = 1 + static_cast<int>(uniform_index(rng, 40));
        const auto q = random_ubqp(n, 0.3, 100, rng);
        const auto x = random_bits(n, rng);
        CHECK(evaluate_ubqp(q, x) == brute_value(q, x));
        CHECK(evaluate_ubqp(q, BitString(static_cast<std::size_t>(n), 0)) == 0);
    }
}

TEST_CASE("dense constructor checks symmetry") {
    CHECK_THROWS_AS((UbqpInstance::from_dense({{1, 2}, {3, 4}})), DimensionError);
    const auto q = UbqpInstance::from_dense({{2, -1}, {-1, 3}});
    CHECK(evaluate_ubqp(q, {1, 1}) == 3);
    CHECK(q.max_abs() == 3);
}

TEST_CASE("euc2d nint rule") {
    CHECK(euc2d_distance({0, 0}, {3, 4}) == 5);
    CHECK(euc2d_distance({0, 0}, {1, 1}) == 1);
    CHECK(euc2d_distance({0, 0}, {0, 0}) == 0);
    CHECK(euc2d_distance({0, 0}, {1.5, 0}) == 2);
}

namespace {
const char* kTriangle =
    "NAME : tri\n"
    "TYPE : TSP\n"
    "COMMENT : three cities\n"
    "DIMENSION : 3\n"
    "EDGE_WEIGHT_TYPE : EUC_2D\n"
    "NODE_COORD_SECTION\n"
    "1 0 0\n"
    "2 3 0\n"
    "3 0 4\n"
    "EOF\n";
}

TEST_CASE("tsplib triangle") {
    const auto t = parse_tsplib(kTriangle);
    CHECK(t.size() == 3);
    CHECK(t.name() == "tri");
    CHECK(evaluate_tour(t, {0, 1, 2}) == 12);
    CHECK(evaluate_tour(t, {0, 2, 1}) == 12);
    CHECK(t.distance(1, 2) == 5);
}

TEST_CASE("tsplib round trip is exact") {
    const auto t = parse_tsplib(kTriangle);
    std::ostringstream out;
    write_tsplib(out, t);
    const auto back = parse_tsplib(out.str());
    REQUIRE(back.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(back.coords()[static_cast<std::size_t>(i)].x == t.coords()[static_cast<std::size_t>(i)].x);
        CHECK(back.coords()[static_cast<std::size_t>(i)].y == t.coords()[static_cast<std::size_t>(i)].y);
    }
    std::ostringstream again;
    write_tsplib(again, back);
    CHECK(again.str() == out.str());
}

TEST_CASE("tsplib round trip keeps non-integer coordinates") {
    const TspInstance t({{0.1, 2.5}, {1e5 / 3.0, -7.25}, {3.0, 4.0}, {12.125, 0.3}}, "frac");
    std::ostringstream out;
    write_tsplib(out, t);
    const auto back = parse_tsplib(out.str());
    for (int i = 0; i < 4; ++i) {
        CHECK(back.coords()[static_cast<std::size_t>(i)].x == t.coords()[static_cast<std::size_t>(i)].x);
        CHECK(back.coords()[static_cast<std::size_t>(i)].y == t.coords()[static_cast<std::size_t>(i)].y);
    }
}

TEST_CASE("tsplib errors") {
    CHECK_THROWS_AS(parse_tsplib("NAME : x\nTYPE : TSP\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : GEO\n"
                                 "NODE_COORD_SECTION\n1 0 0\n2 1 1\n3 2 2\nEOF\n"),
                    UnsupportedFormatError);
    CHECK_THROWS_AS(parse_tsplib("NAME : x\nTYPE : TSP\nEDGE_WEIGHT_TYPE : EUC_2D\n"
                                 "NODE_COORD_SECTION\n1 0 0\n2 1 1\n3 2 2\nEOF\n"),
                    ParseError);
    CHECK_THROWS_AS(parse_tsplib("NAME : x\nTYPE : TSP\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : EUC_2D\n"
                                 "NODE_COORD_SECTION\n1 0 0\n2 1 1\nEOF\n"),
                    ParseError);
}

TEST_CASE("tour validity and evaluation errors") {
    CHECK(is_valid_tour({2, 0, 1}, 3));
    CHECK_FALSE(is_valid_tour({0, 0, 1}, 3));
    CHECK_FALSE(is_valid_tour({0, 1}, 3));
    CHECK_FALSE(is_valid_tour({0, 1, 3}, 3));
    const auto t = parse_tsplib(kTriangle);
    CHECK_THROWS(evaluate_tour(t, {0, 0, 1}));
}

TEST_CASE("tour evaluation matches an independent sum") {
    Rng rng(3);
    const auto t = random_tsp(60, 1000.0, rng);
    auto tour = random_tour(60, rng);
    std::int64_t sum = 0;
    for (std::size_t k = 0; k < tour.size(); ++k) {
        const auto a = t.coords()[static_cast<std::size_t>(tour[k])];
        const auto b = t.coords()[static_cast<std::size_t>(tour[(k + 1) % tour.size()])];
        sum += static_cast<std::int64_t>(std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y)) + 0.5);
    }
    CHECK(evaluate_tour(t, tour) == sum);
}

TEST_CASE("random generators are seed-deterministic") {
    Rng a(5), b(5);
    CHECK(random_bits(100, a) == random_bits(100, b));
    CHECK(random_tour(50, a) == random_tour(50, b));
    Rng c(9);
    auto tour = random_tour(50, c);
    CHECK(is_valid_tour(tour, 50));
}
