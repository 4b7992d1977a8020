#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "txnforge/errors.hpp"
#include "txnforge/schedule.hpp"

using namespace txnforge;

namespace {

double normal_pdf(double x, double mean, double sigma) {
    const double z = (x - mean) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

double simpson(double a, double b, double mean, double sigma) {
    const double m = (a + b) / 2.0;
    return (b - a) / 6.0 *
           (normal_pdf(a, mean, sigma) + 4.0 * normal_pdf(m, mean, sigma) +
            normal_pdf(b, mean, sigma));
}

double adaptive(double a, double b, double mean, double sigma, double whole, double eps,
                int depth) {
    const double m = (a + b) / 2.0;
    const double l = simpson(a, m, mean, sigma);
    const double r = simpson(m, b, mean, sigma);
    if (depth <= 0 || std::abs(l + r - whole) < 15.0 * eps)
        return l + r + (l + r - whole) / 15.0;
    return adaptive(a, m, mean, sigma, l, eps / 2.0, depth - 1) +
           adaptive(m, b, mean, sigma, r, eps / 2.0, depth - 1);
}

// Quadrature oracle: integrates the normal density directly over the
// wrapped bin, with no reference to the CDF path used by the library.
double oracle_bin_mass(double mean_step, double sigma, int t) {
    double total = 0.0;
    for (int k = -1; k <= 1; ++k) {
        const double a = t + 96.0 * k;
        const double b = t + 1 + 96.0 * k;
        total += adaptive(a, b, mean_step, sigma, simpson(a, b, mean_step, sigma), 1e-14, 40);
    }
    return total;
}

} // namespace

TEST_CASE("bin mass matches the quadrature oracle across the grid") {
    for (const double mean_hour : {0.0, 3.7, 12.0, 22.0, 23.75}) {
        const double mean_step = mean_hour * 4.0;
        for (int t = 0; t < 96; ++t) {
            CAPTURE(mean_hour);
            CAPTURE(t);
            // Relative 1e-9 with a small absolute floor; the oracle's own
            // quadrature error dominates on deep-tail bins.
            CHECK(schedule::gaussian_bin_mass(mean_step, 9.6, t) ==
                  doctest::Approx(oracle_bin_mass(mean_step, 9.6, t)).epsilon(1e-9).scale(1e-3));
        }
    }
}

TEST_CASE("frozen oracle values") {
    // Quadrature of the wrapped N(48, 9.6) density over [48, 49).
    CHECK(schedule::gaussian_bin_mass(48.0, 9.6, 48) ==
          doctest::Approx(0.041481456911556636).epsilon(1e-13));
    const auto table = schedule::build_prob_table(12.0, 4.0);
    CHECK(table.txn_prob[48] == doctest::Approx(0.16592582764622654).epsilon(1e-13));
}

TEST_CASE("bins adjacent to the mean are symmetric") {
    CHECK(schedule::gaussian_bin_mass(48.0, 9.6, 47) ==
          doctest::Approx(schedule::gaussian_bin_mass(48.0, 9.6, 48)).epsilon(1e-15));
}

TEST_CASE("wrapped mass sums to one") {
    for (const double mean_step : {0.0, 24.0, 48.0, 88.0, 95.5}) {
        double sum = 0.0;
        for (int t = 0; t < 96; ++t) sum += schedule::gaussian_bin_mass(mean_step, 9.6, t);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("build_prob_table basics") {
    const auto table = schedule::build_prob_table(22.0, 10.0);
    CHECK(table.mean_step == 88.0);
    CHECK(table.sigma_steps == 9.6);
    for (int t = 0; t < 96; ++t) {
        CHECK(table.txn_prob[t] >= 0.0);
        CHECK(table.txn_prob[t] <= 1.0);
        CHECK(table.bin_mass[t] >= 0.0);
    }

    const auto zero = schedule::build_prob_table(12.0, 0.0);
    for (int t = 0; t < 96; ++t) CHECK(zero.txn_prob[t] == 0.0);
}

TEST_CASE("rate clamp keeps txn_prob at 1") {
    const auto table = schedule::build_prob_table(12.0, 1000.0);
    CHECK(table.txn_prob[48] == 1.0);
    for (int t = 0; t < 96; ++t) CHECK(table.txn_prob[t] <= 1.0);
}

TEST_CASE("wrapping: mean hours are 24-periodic on the grid") {
    const auto a = schedule::build_prob_table(22.0, 4.0);
    const auto b = schedule::build_prob_table(std::fmod(22.0 + 24.0, 24.0), 4.0);
    for (int t = 0; t < 96; ++t) CHECK(a.bin_mass[t] == b.bin_mass[t]);
}

TEST_CASE("shift equivariance: whole-hour shifts rotate the table") {
    const auto base = schedule::build_prob_table(10.0, 4.0);
    const auto shifted = schedule::build_prob_table(17.0, 4.0);  // +7h = 28 bins
    for (int t = 0; t < 96; ++t)
        CHECK(shifted.bin_mass[(t + 28) % 96] ==
              doctest::Approx(base.bin_mass[t]).epsilon(1e-9).scale(1.0));
}

TEST_CASE("tails fall off monotonically along the shorter arc") {
    const auto table = schedule::build_prob_table(12.0, 4.0);
    const int peak = 48;
    // Wrap-around interference stays below 1e-6 at this sigma.
    for (int d = 1; d < 47; ++d) {
        CHECK(table.bin_mass[peak + d] <= table.bin_mass[peak + d - 1] + 1e-6);
        CHECK(table.bin_mass[peak - d] <= table.bin_mass[peak - d + 1] + 1e-6);
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(schedule::gaussian_bin_mass(48.0, 0.0, 0), ParamError);
    CHECK_THROWS_AS(schedule::gaussian_bin_mass(48.0, -1.0, 0), ParamError);
    CHECK_THROWS_AS(schedule::gaussian_bin_mass(48.0, 16.5, 0), ParamError);
    CHECK_THROWS_AS(schedule::gaussian_bin_mass(48.0, 9.6, -1), ParamError);
    CHECK_THROWS_AS(schedule::gaussian_bin_mass(48.0, 9.6, 96), ParamError);
    CHECK_THROWS_AS(schedule::build_prob_table(24.0, 4.0), ParamError);
    CHECK_THROWS_AS(schedule::build_prob_table(-0.5, 4.0), ParamError);
    CHECK_THROWS_AS(schedule::build_prob_table(12.0, -1.0), ParamError);
}
