#pragma once

#include <array>
#include <cstdint>

namespace txnforge::schedule {

// Transaction-time schedules. An agent's probability of transacting at a
// given 15-minute step follows a Gaussian over the 24-hour day, wrapped
// at midnight so that mass crossing one edge of the day re-enters at the
// other (a 10 PM mean produces early-morning activity).

inline constexpr int kStepsPerDay = 96;
inline constexpr int kMinutesPerStep = 15;

/// One day spans 10 standard deviations, so sigma is fixed at 96/10
/// steps for the stock schedules.
inline constexpr double kSigmaSteps = 9.6;

/// Mean transactions per day used when a config does not say otherwise.
inline constexpr double kDefaultMeanTxns = 4.0;

/// Largest admissible sigma. Wrapping sums period shifts k in {-1,0,+1},
/// which covers more than 5 sigma on each side (residual mass < 1e-6)
/// only while sigma <= 16 steps.
inline constexpr double kMaxSigmaSteps = 16.0;

/// Per-step transaction probability lookup for one agent type.
struct ProbTable {
    std::array<double, kStepsPerDay> bin_mass{};  // wrapped Gaussian mass per bin; sums to 1
    std::array<double, kStepsPerDay> txn_prob{};  // bin_mass * mean_num_txns, clamped to [0,1]
    double mean_step = 0.0;                       // in [0, 96)
    double sigma_steps = kSigmaSteps;
};

/// Wrapped Gaussian mass over step bin [t, t+1), in step units:
///
///   sum over k in {-1,0,+1} of
///     Phi((t+1 - mean_step + 96k)/sigma) - Phi((t - mean_step + 96k)/sigma)
///
/// Phi is the standard normal CDF, evaluated as erfc(-x/sqrt(2))/2 with
/// std::erfc (correctly rounded in practice, far below the 1e-12 accuracy
/// this module needs).
///
/// Throws ParamError if sigma_steps is non-finite, <= 0, or >
/// kMaxSigmaSteps, or if t is outside [0, 96).
double gaussian_bin_mass(double mean_step, double sigma_steps, int t);

/// Builds the full 96-bin table for an agent type transacting around
/// `mean_hour` (24h clock) with `mean_num_txns` expected transactions per
/// day. mean_step = mean_hour * 4; txn_prob[t] = min(1, mean_num_txns *
/// bin_mass[t]). Expected daily transactions equal mean_num_txns as long
/// as no bin clamps.
///
/// Throws ParamError if mean_hour is outside [0, 24) or mean_num_txns is
/// negative or non-finite.
ProbTable build_prob_table(double mean_hour, double mean_num_txns = kDefaultMeanTxns);

} // namespace txnforge::schedule
