#include <doctest.h>

#include <cmath>
#include <set>

#include "cdp/rng.hpp"

using cdp::Rng;

TEST_CASE("same seed, same stream") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
}

TEST_CASE("splits depend on the seed and salt, never on the draw position") {
    Rng parent(7);
    Rng early = parent.split(3);
    for (int i = 0; i < 50; ++i) parent.uniform();
    Rng late = parent.split(3);
    for (int i = 0; i < 20; ++i) CHECK(early.uniform() == late.uniform());
}

TEST_CASE("distinct salts and names give distinct streams") {
    Rng parent(7);
    std::set<std::uint64_t> firsts;
    for (std::uint64_t s = 0; s < 32; ++s) firsts.insert(parent.split(s).integer(1u << 30));
    CHECK(firsts.size() == 32);
    Rng byname1 = parent.split("env");
    Rng byname2 = parent.split("filter");
    CHECK(byname1.integer(1u << 30) != byname2.integer(1u << 30));
    Rng again = parent.split("env");
    Rng reference = parent.split("env");
    CHECK(again.uniform() == reference.uniform());
}

TEST_CASE("distribution helpers stay in range and hit their degenerate cases") {
    Rng r(5);
    CHECK(r.poisson(0.0) == 0);
    CHECK(r.binomial(0, 0.7) == 0);
    CHECK(r.binomial(10, 0.0) == 0);
    CHECK(r.binomial(10, 1.0) == 10);
    CHECK_FALSE(r.bernoulli(0.0));
    CHECK(r.bernoulli(1.0));
    double mean = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        int x = r.poisson(2.0);
        CHECK(x >= 0);
        mean += x;
    }
    mean /= n;
    CHECK(mean == doctest::Approx(2.0).epsilon(0.05));
    for (int i = 0; i < 1000; ++i) {
        auto v = r.integer(7);
        CHECK(v < 7);
    }
}
