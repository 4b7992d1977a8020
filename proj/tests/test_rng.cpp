#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>
#include <vector>

#include "txnforge/rng.hpp"

using namespace txnforge;

TEST_CASE("same seed gives the same stream") {
    Rng64 a(42);
    Rng64 b(42);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("mix_seed separates streams") {
    CHECK(mix_seed(42, 0) == mix_seed(42, 0));
    CHECK(mix_seed(42, 0) != mix_seed(42, 1));

    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 10000; ++s) seen.insert(mix_seed(42, s));
    CHECK(seen.size() == 10000);
}

TEST_CASE("uniform stays in [0,1) and fills the range") {
    Rng64 rng(7);
    double lo = 1.0;
    double hi = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.001);
    CHECK(hi > 0.999);
}

TEST_CASE("uniform_below is bounded and roughly flat") {
    Rng64 rng(3);
    std::vector<int> buckets(7, 0);
    const int draws = 140000;
    for (int i = 0; i < draws; ++i) {
        const auto v = rng.uniform_below(7);
        REQUIRE(v < 7);
        ++buckets[v];
    }
    const double expected = draws / 7.0;
    for (int b = 0; b < 7; ++b) {
        CHECK(buckets[b] > expected * 0.97);
        CHECK(buckets[b] < expected * 1.03);
    }

    for (int i = 0; i < 100; ++i) CHECK(rng.uniform_below(1) == 0);
}

TEST_CASE("gaussian consumes exactly two words per call") {
    Rng64 a(99);
    Rng64 b(99);
    (void)a.gaussian();
    (void)b.next_u64();
    (void)b.next_u64();
    CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("gaussian moments are sane") {
    Rng64 rng(11);
    const int n = 200000;
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = rng.gaussian();
        sum += g;
        sq += g * g;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
}
