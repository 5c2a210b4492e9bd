#include "bfrb/csv.hpp"
#include "bfrb/error.hpp"
#include "bfrb/random.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace bfrb;

TEST_CASE("csv parse skips comments and handles quotes") {
    const auto t = csv::parse("\xEF\xBB\xBF# note\na,b\n\n1,\"x,y\"\n2,z\n");
    REQUIRE(t.header == std::vector<std::string>{"a", "b"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][1] == "x,y");
    CHECK(t.line[1] == 5);
    CHECK(t.column("b") == 1);
    CHECK(t.column("c") == -1);
}

TEST_CASE("csv numbers") {
    CHECK(csv::to_double(" 1.5 ", "v") == 1.5);
    CHECK_THROWS_AS(csv::to_double("abc", "v"), Error);
    CHECK(csv::to_int("42", "v") == 42);
    CHECK(csv::fixed6(-0.0) == "0.000000");
    CHECK(csv::fixed6(1.0 / 3.0) == "0.333333");
}

TEST_CASE("missing csv file is FileNotFound") {
    try {
        csv::read("/nonexistent/bfrb.csv");
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::FileNotFound);
        CHECK(e.is_io());
    }
}

TEST_CASE("rng is reproducible and in range") {
    Rng a(7), b(7);
    for (int i = 0; i < 1000; ++i) {
        const auto x = a.index(13);
        CHECK(x == b.index(13));
        CHECK(x < 13);
        const double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("sample without replacement draws distinct values") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng.index(40);
        const std::size_t k = rng.index(n + 1);
        const auto draw = rng.sample_without_replacement(n, k);
        REQUIRE(draw.size() == k);
        std::set<std::size_t> seen(draw.begin(), draw.end());
        CHECK(seen.size() == k);
        CHECK(std::all_of(draw.begin(), draw.end(), [&](std::size_t v) { return v < n; }));
    }
}

TEST_CASE("stable hash is FNV-1a") {
    CHECK(stable_hash("") == 0xcbf29ce484222325ULL);
    CHECK(stable_hash("a") == 0xaf63dc4c8601ec8cULL);
}
