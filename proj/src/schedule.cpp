#include "txnforge/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "txnforge/errors.hpp"

namespace txnforge::schedule {

namespace {

// Standard normal CDF.
double phi(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

} // namespace

double gaussian_bin_mass(double mean_step, double sigma_steps, int t) {
    if (!std::isfinite(sigma_steps) || sigma_steps <= 0.0) {
        throw ParamError("sigma_steps must be finite and positive, got " +
                         std::to_string(sigma_steps));
    }
    if (sigma_steps > kMaxSigmaSteps) {
        throw ParamError("sigma_steps must be <= 16 steps for three-shift wrapping, got " +
                         std::to_string(sigma_steps));
    }
    if (t < 0 || t >= kStepsPerDay) {
        throw ParamError("step index must lie in [0, 96), got " + std::to_string(t));
    }

    double mass = 0.0;
    for (int k = -1; k <= 1; ++k) {
        const double shift = static_cast<double>(kStepsPerDay) * k;
        const double lo = (static_cast<double>(t) - mean_step + shift) / sigma_steps;
        const double hi = (static_cast<double>(t) + 1.0 - mean_step + shift) / sigma_steps;
        mass += phi(hi) - phi(lo);
    }
    return mass;
}

ProbTable build_prob_table(double mean_hour, double mean_num_txns) {
    if (!std::isfinite(mean_hour) || mean_hour < 0.0 || mean_hour >= 24.0) {
        throw ParamError("mean_hour must lie in [0, 24), got " + std::to_string(mean_hour));
    }
    if (!std::isfinite(mean_num_txns) || mean_num_txns < 0.0) {
        throw ParamError("mean_num_txns must be finite and >= 0, got " +
                         std::to_string(mean_num_txns));
    }

    ProbTable table;
    table.mean_step = mean_hour * 60.0 / kMinutesPerStep;
    table.sigma_steps = kSigmaSteps;
    for (int t = 0; t < kStepsPerDay; ++t) {
        table.bin_mass[t] = gaussian_bin_mass(table.mean_step, table.sigma_steps, t);
        table.txn_prob[t] = std::min(1.0, mean_num_txns * table.bin_mass[t]);
    }
    return table;
}

} // namespace txnforge::schedule
