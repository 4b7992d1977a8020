#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "txnforge/detectors/gmm.hpp"
#include "txnforge/errors.hpp"
#include "txnforge/matrix.hpp"
#include "txnforge/rng.hpp"

using namespace txnforge;
using detectors::GmmParams;
using detectors::GmmResult;

namespace {

Matrix two_blobs(int n_a, int n_b, double center_a, double center_b, std::uint64_t seed) {
    Rng64 rng(seed);
    Matrix x(static_cast<std::size_t>(n_a + n_b), 1);
    for (int i = 0; i < n_a; ++i) x.at(i, 0) = center_a + rng.gaussian();
    for (int i = 0; i < n_b; ++i) x.at(n_a + i, 0) = center_b + rng.gaussian();
    return x;
}

} // namespace

TEST_CASE("well separated blobs are recovered") {
    const Matrix x = two_blobs(100, 100, 0.0, 100.0, 1);
    const GmmResult res = detectors::gmm_fit_predict(x, 2, 42);

    std::vector<double> means = {res.means.at(0, 0), res.means.at(1, 0)};
    std::sort(means.begin(), means.end());
    CHECK(means[0] == doctest::Approx(0.0).epsilon(0.5));
    CHECK(means[1] == doctest::Approx(100.0).epsilon(0.005));
    CHECK(res.converged);

    // Rows from the same blob land in the same component.
    std::set<int> first_blob(res.assignments.begin(), res.assignments.begin() + 100);
    std::set<int> second_blob(res.assignments.begin() + 100, res.assignments.end());
    CHECK(first_blob.size() == 1);
    CHECK(second_blob.size() == 1);
    CHECK(*first_blob.begin() != *second_blob.begin());
}

TEST_CASE("single component flags nothing") {
    const Matrix x = two_blobs(50, 50, 0.0, 10.0, 2);
    const GmmResult res = detectors::gmm_fit_predict(x, 1, 42);
    CHECK(res.suspicious_component == -1);
    for (const int label : res.labels) CHECK(label == 0);
    for (const int a : res.assignments) CHECK(a == 0);
}

TEST_CASE("minority cluster becomes the suspicious component") {
    const Matrix x = two_blobs(200, 20, 0.0, 50.0, 3);
    const GmmResult res = detectors::gmm_fit_predict(x, 2, 42);

    int flagged = 0;
    for (int i = 0; i < 220; ++i) {
        if (res.labels[i] == 1) {
            ++flagged;
            CHECK(i >= 200);  // only minority rows flagged
        }
    }
    CHECK(flagged == 20);
    CHECK(res.weights[res.suspicious_component] ==
          *std::min_element(res.weights.begin(), res.weights.end()));
}

TEST_CASE("suspicious component can be overridden") {
    const Matrix x = two_blobs(200, 20, 0.0, 50.0, 3);
    GmmParams params;
    params.seed = 42;
    const GmmResult by_weight = detectors::gmm_fit_predict(x, params);

    params.suspicious_component = 1 - by_weight.suspicious_component;
    const GmmResult flipped = detectors::gmm_fit_predict(x, params);
    CHECK(flipped.suspicious_component == 1 - by_weight.suspicious_component);
    for (std::size_t i = 0; i < flipped.labels.size(); ++i) {
        CHECK(flipped.labels[i] == 1 - by_weight.labels[i]);
    }
}

TEST_CASE("identical points converge onto the floor") {
    Matrix x(20, 2);
    for (std::size_t r = 0; r < 20; ++r) {
        x.at(r, 0) = 5.0;
        x.at(r, 1) = -3.0;
    }
    const GmmResult res = detectors::gmm_fit_predict(x, 1, 7);
    CHECK(res.converged);
    CHECK(res.means.at(0, 0) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(res.means.at(0, 1) == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(res.variances.at(0, 0) == 1e-6);
    CHECK(res.variances.at(0, 1) == 1e-6);
}

TEST_CASE("log likelihood never decreases between clean iterations") {
    Rng64 rng(29);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 8 + rng.uniform_below(40);
        const std::size_t d = 1 + rng.uniform_below(3);
        Matrix x(n, d);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < d; ++c) {
                x.at(r, c) = 3.0 * rng.gaussian() + (rng.uniform() < 0.5 ? 0.0 : 8.0);
            }
        }
        const int k = 1 + static_cast<int>(rng.uniform_below(3));
        GmmParams params;
        params.n_components = k;
        params.seed = rng.next_u64();
        GmmResult res;
        try {
            res = detectors::gmm_fit_predict(x, params);
        } catch (const DataError&) {
            continue;  // repeated component collapse: nothing to assert
        }

        const auto& trace = res.log_likelihood_trace;
        for (std::size_t t = 1; t < trace.size(); ++t) {
            const bool reseeded =
                std::find(res.reinit_iterations.begin(), res.reinit_iterations.end(),
                          static_cast<int>(t)) != res.reinit_iterations.end();
            if (reseeded) continue;
            CHECK(trace[t] >= trace[t - 1] - 1e-8);
        }
    }
}

TEST_CASE("responsibilities and weights are simplex shaped") {
    const Matrix x = two_blobs(60, 40, 0.0, 6.0, 5);
    const GmmResult res = detectors::gmm_fit_predict(x, 3, 11);

    double weight_sum = 0.0;
    for (const double w : res.weights) {
        CHECK(w >= 0.0);
        weight_sum += w;
    }
    CHECK(weight_sum == doctest::Approx(1.0).epsilon(1e-9));

    REQUIRE(res.responsibilities.rows == 100);
    REQUIRE(res.responsibilities.cols == 3);
    for (std::size_t r = 0; r < res.responsibilities.rows; ++r) {
        double row_sum = 0.0;
        for (std::size_t c = 0; c < 3; ++c) {
            const double resp = res.responsibilities.at(r, c);
            CHECK(resp >= 0.0);
            CHECK(resp <= 1.0);
            row_sum += resp;
        }
        CHECK(row_sum == doctest::Approx(1.0).epsilon(1e-9));
    }

    // Assignments are the responsibility argmax.
    for (std::size_t r = 0; r < res.responsibilities.rows; ++r) {
        const auto row = res.responsibilities.row(r);
        const auto argmax = std::max_element(row.begin(), row.end()) - row.begin();
        CHECK(res.assignments[r] == static_cast<int>(argmax));
    }
}

TEST_CASE("fits are deterministic in the seed") {
    const Matrix x = two_blobs(50, 50, 0.0, 9.0, 13);
    const GmmResult a = detectors::gmm_fit_predict(x, 2, 123);
    const GmmResult b = detectors::gmm_fit_predict(x, 2, 123);
    CHECK(a.labels == b.labels);
    CHECK(a.weights == b.weights);
    CHECK(a.means.data == b.means.data);
    CHECK(a.log_likelihood_trace == b.log_likelihood_trace);
}

TEST_CASE("variances respect the floor") {
    const Matrix x = two_blobs(30, 30, 0.0, 4.0, 17);
    GmmParams params;
    params.n_components = 2;
    params.cov_floor = 0.5;
    const GmmResult res = detectors::gmm_fit_predict(x, params);
    for (const double v : res.variances.data) CHECK(v >= 0.5);
}

TEST_CASE("holdout rows are labeled by the fitted mixture") {
    const Matrix train = two_blobs(100, 100, 0.0, 100.0, 19);
    const GmmResult model = detectors::gmm_fit_predict(train, 2, 42);

    Matrix fresh(4, 1);
    fresh.at(0, 0) = -1.0;
    fresh.at(1, 0) = 1.5;
    fresh.at(2, 0) = 99.0;
    fresh.at(3, 0) = 101.0;
    const auto labels = detectors::gmm_predict(model, fresh);
    CHECK(labels[0] == labels[1]);
    CHECK(labels[2] == labels[3]);
    CHECK(labels[0] != labels[2]);

    // Training rows keep their in-fit labels.
    CHECK(detectors::gmm_predict(model, train) == model.labels);

    Matrix wrong(2, 3);
    CHECK_THROWS_AS(detectors::gmm_predict(model, wrong), ParamError);
    CHECK_THROWS_AS(detectors::gmm_predict(GmmResult{}, fresh), ParamError);
}

TEST_CASE("bad parameters raise") {
    const Matrix x = two_blobs(5, 5, 0.0, 1.0, 23);
    CHECK_THROWS_AS(detectors::gmm_fit_predict(x, 0, 1), ParamError);
    CHECK_THROWS_AS(detectors::gmm_fit_predict(x, 11, 1), ParamError);
    CHECK_THROWS_AS(detectors::gmm_fit_predict(Matrix(), 1, 1), ParamError);

    GmmParams bad_iters;
    bad_iters.max_iters = 0;
    CHECK_THROWS_AS(detectors::gmm_fit_predict(x, bad_iters), ParamError);
}
