#include "doctest.h"

#include <cmath>
#include <set>
#include <vector>

#include "osim/rng.hpp"

using namespace osim::rng;

TEST_CASE("substreams are deterministic and distinct") {
    CHECK(substream_seed(42, "init.opinion") == substream_seed(42, "init.opinion"));
    CHECK(substream_seed(42, "init.opinion") != substream_seed(42, "init.susc"));
    CHECK(substream_seed(42, "init.opinion") != substream_seed(43, "init.opinion"));

    Rng a(substream_seed(7, "round.1.edges"));
    Rng b(substream_seed(7, "round.1.edges"));
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("next_double stays in [0,1) and looks uniform") {
    Rng rng(123);
    double sum = 0.0;
    const int trials = 100000;
    for (int i = 0; i < trials; ++i) {
        double x = rng.next_double();
        REQUIRE(x >= 0.0);
        REQUIRE(x < 1.0);
        sum += x;
    }
    CHECK(std::abs(sum / trials - 0.5) < 0.01);
}

TEST_CASE("below is bounded and hits every residue") {
    Rng rng(99);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        std::uint64_t v = rng.below(7);
        REQUIRE(v < 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
}

TEST_CASE("uniform_int covers an inclusive range") {
    Rng rng(5);
    std::set<std::int64_t> seen;
    for (int i = 0; i < 500; ++i) {
        auto v = rng.uniform_int(-2, 2);
        REQUIRE(v >= -2);
        REQUIRE(v <= 2);
        seen.insert(v);
    }
    CHECK(seen.size() == 5);
}

TEST_CASE("bernoulli edge probabilities") {
    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        CHECK_FALSE(rng.bernoulli(0.0));
        CHECK(rng.bernoulli(1.0));
    }
}

TEST_CASE("beta samples stay in (0,1) with plausible mean") {
    Rng rng(17);
    double sum = 0.0;
    const int trials = 20000;
    for (int i = 0; i < trials; ++i) {
        double x = rng.beta(2.0, 5.0);
        REQUIRE(x > 0.0);
        REQUIRE(x < 1.0);
        sum += x;
    }
    // E[Beta(2,5)] = 2/7
    CHECK(std::abs(sum / trials - 2.0 / 7.0) < 0.01);
}

TEST_CASE("shuffle is a deterministic permutation") {
    std::vector<int> v1{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::vector<int> v2 = v1;
    Rng a(substream_seed(3, "x"));
    Rng b(substream_seed(3, "x"));
    a.shuffle(v1);
    b.shuffle(v2);
    CHECK(v1 == v2);
    std::set<int> members(v1.begin(), v1.end());
    CHECK(members.size() == 10);
}
