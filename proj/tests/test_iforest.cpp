#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "txnforge/detectors/isolation_forest.hpp"
#include "txnforge/errors.hpp"
#include "txnforge/matrix.hpp"
#include "txnforge/rng.hpp"

using namespace txnforge;
using detectors::IForestParams;
using detectors::IForestResult;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng64 rng(seed);
    Matrix x(rows, cols);
    for (auto& v : x.data) v = rng.gaussian();
    return x;
}

double oracle_c(std::int64_t n) {
    if (n <= 1) return 0.0;
    if (n == 2) return 1.0;
    const auto nd = static_cast<double>(n);
    return 2.0 * (std::log(nd - 1.0) + 0.5772156649015329) - 2.0 * (nd - 1.0) / nd;
}

// Replays the documented per-node draw sequence over explicit row lists,
// assigning each row its isolation depth during the recursion itself, so
// the result never touches the library's tree or traversal code.
void oracle_partition(const Matrix& x, const std::vector<std::size_t>& rows, Rng64& rng,
                      int depth, int depth_limit, std::vector<double>& out) {
    const auto settle = [&] {
        for (auto r : rows)
            out[r] = static_cast<double>(depth) + oracle_c(static_cast<std::int64_t>(rows.size()));
    };
    if (depth >= depth_limit || rows.size() <= 1) {
        settle();
        return;
    }
    std::vector<std::size_t> eligible;
    std::vector<std::pair<double, double>> ranges(x.cols);
    for (std::size_t f = 0; f < x.cols; ++f) {
        double lo = x.at(rows[0], f);
        double hi = lo;
        for (auto r : rows) {
            lo = std::min(lo, x.at(r, f));
            hi = std::max(hi, x.at(r, f));
        }
        ranges[f] = {lo, hi};
        if (lo < hi) eligible.push_back(f);
    }
    if (eligible.empty()) {
        settle();
        return;
    }
    const std::size_t feature = eligible[rng.uniform_below(eligible.size())];
    const auto [lo, hi] = ranges[feature];
    double split = lo + rng.uniform() * (hi - lo);
    if (split <= lo) split = std::nextafter(lo, std::numeric_limits<double>::infinity());

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (auto r : rows) {
        if (x.at(r, feature) < split) left.push_back(r);
        else right.push_back(r);
    }
    oracle_partition(x, left, rng, depth + 1, depth_limit, out);
    oracle_partition(x, right, rng, depth + 1, depth_limit, out);
}

} // namespace

TEST_CASE("c(n) matches hand-computed values") {
    CHECK(detectors::average_path_c(0) == 0.0);
    CHECK(detectors::average_path_c(1) == 0.0);
    CHECK(detectors::average_path_c(2) == 1.0);
    CHECK(detectors::average_path_c(3) ==
          doctest::Approx(2.0 * (std::log(2.0) + 0.5772156649015329) - 4.0 / 3.0)
              .epsilon(1e-14));
    // c grows like 2 ln n and stays below the worst-case depth n - 1.
    CHECK(detectors::average_path_c(256) == doctest::Approx(10.244770920119918).epsilon(1e-12));
    CHECK(detectors::average_path_c(10) == doctest::Approx(3.7488804844755045).epsilon(1e-12));
    for (std::int64_t n = 3; n < 60; ++n) {
        CHECK(detectors::average_path_c(n) > detectors::average_path_c(n - 1));
        CHECK(detectors::average_path_c(n) < static_cast<double>(n - 1));
    }
}

TEST_CASE("flag counts equal the contamination ceiling exactly") {
    struct Case {
        std::size_t n;
        double contamination;
        int expected;
    };
    // 0.1 * 1010 and 0.01 * 1000 are the classic float traps: both sit a
    // hair above their exact integer products in doubles.
    const std::vector<Case> cases = {
        {1010, 0.1, 101}, {1000, 0.01, 10}, {1000, 0.1, 100}, {505, 0.1, 51},
        {100, 0.01, 1},   {7, 0.5, 4},      {23, 0.1, 3},     {2, 0.1, 1},
    };
    for (const auto& c : cases) {
        CAPTURE(c.n);
        CAPTURE(c.contamination);
        const Matrix x = random_matrix(c.n, 2, c.n);
        IForestParams params;
        params.n_trees = 20;
        params.contamination = c.contamination;
        const IForestResult res = detectors::iforest_fit_score(x, params);
        CHECK(res.n_flagged == c.expected);
        CHECK(std::accumulate(res.flags.begin(), res.flags.end(), 0) == c.expected);
    }
}

TEST_CASE("a far outlier gets the top score") {
    Matrix x(21, 2);
    Rng64 rng(9);
    for (std::size_t r = 0; r < 20; ++r) {
        x.at(r, 0) = rng.gaussian();
        x.at(r, 1) = rng.gaussian();
    }
    x.at(20, 0) = 1000.0;
    x.at(20, 1) = -1000.0;

    IForestParams params;
    const IForestResult res = detectors::iforest_fit_score(x, params);
    for (std::size_t r = 0; r < 20; ++r) CHECK(res.scores[20] > res.scores[r]);
    CHECK(res.flags[20] == 1);
}

TEST_CASE("scores live in (0, 1]") {
    const Matrix x = random_matrix(300, 3, 4);
    const IForestResult res = detectors::iforest_fit_score(x, IForestParams{});
    for (const double s : res.scores) {
        CHECK(s > 0.0);
        CHECK(s <= 1.0);
    }
}

TEST_CASE("scoring is deterministic in the seed") {
    const Matrix x = random_matrix(150, 2, 6);
    IForestParams params;
    params.seed = 77;
    const IForestResult a = detectors::iforest_fit_score(x, params);
    const IForestResult b = detectors::iforest_fit_score(x, params);
    CHECK(a.scores == b.scores);
    CHECK(a.flags == b.flags);

    params.seed = 78;
    CHECK(detectors::iforest_fit_score(x, params).scores != a.scores);
}

TEST_CASE("constant data scores everyone alike and ties break by index") {
    Matrix x(10, 2);
    for (auto& v : x.data) v = 3.0;
    IForestParams params;
    params.contamination = 0.3;
    const IForestResult res = detectors::iforest_fit_score(x, params);
    for (const double s : res.scores) CHECK(s == res.scores[0]);
    const std::vector<int> expected = {1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
    CHECK(res.flags == expected);
}

TEST_CASE("single-tree path lengths match an independent replay") {
    // Ten points and a full-population subsample, so every row is in
    // every tree and the replay consumes the identical stream.
    const Matrix x = random_matrix(10, 3, 12);
    IForestParams params;
    params.n_trees = 25;
    params.subsample_size = 64;
    params.seed = 5;
    const auto model = detectors::iforest_fit(x, params);
    REQUIRE(model.effective_subsample == 10);

    std::vector<std::size_t> all_rows(10);
    std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});
    for (int t = 0; t < params.n_trees; ++t) {
        Rng64 rng(mix_seed(params.seed, static_cast<std::uint64_t>(t)));
        std::vector<double> expected(10, -1.0);
        oracle_partition(x, all_rows, rng, 0, model.depth_limit, expected);
        for (std::size_t r = 0; r < 10; ++r) {
            CAPTURE(t);
            CAPTURE(r);
            CHECK(detectors::iso_path_length(model.trees[t], x, r) == expected[r]);
        }
    }
}

TEST_CASE("leaf depth respects the budget") {
    const Matrix x = random_matrix(500, 2, 8);
    IForestParams params;
    params.subsample_size = 64;  // depth limit ceil(log2(64)) = 6
    const auto model = detectors::iforest_fit(x, params);
    CHECK(model.depth_limit == 6);
    CHECK(model.effective_subsample == 64);

    for (const auto& tree : model.trees) {
        // Walk each tree iteratively, tracking depth.
        std::vector<std::pair<int, int>> stack = {{0, 0}};
        int leaf_rows = 0;
        while (!stack.empty()) {
            const auto [idx, depth] = stack.back();
            stack.pop_back();
            CHECK(depth <= 6);
            const auto& node = tree.nodes[static_cast<std::size_t>(idx)];
            if (node.is_leaf) {
                leaf_rows += node.size;
                continue;
            }
            stack.push_back({node.left, depth + 1});
            stack.push_back({node.right, depth + 1});
        }
        CHECK(leaf_rows == 64);  // leaves partition the subsample
    }
}

TEST_CASE("bad inputs raise") {
    const Matrix x = random_matrix(10, 2, 3);
    IForestParams params;

    params.n_trees = 0;
    CHECK_THROWS_AS(detectors::iforest_fit(x, params), ParamError);
    params.n_trees = 100;
    params.subsample_size = 0;
    CHECK_THROWS_AS(detectors::iforest_fit(x, params), ParamError);
    params.subsample_size = 256;

    CHECK_THROWS_AS(detectors::iforest_fit(Matrix(1, 2), IForestParams{}), ParamError);

    const auto model = detectors::iforest_fit(x, IForestParams{});
    CHECK_THROWS_AS(detectors::iforest_score(model, x, 0.0), ParamError);
    CHECK_THROWS_AS(detectors::iforest_score(model, x, 0.6), ParamError);
    CHECK_THROWS_AS(detectors::iforest_score(detectors::IForestModel{}, x, 0.1), ParamError);
}
