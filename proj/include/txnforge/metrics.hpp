#pragma once

#include <cstdint>
#include <vector>

namespace txnforge::metrics {

/// Binary confusion counts; suspicious (label 1) is the positive class.
struct ConfusionMatrix {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t tn = 0;
    std::int64_t fn = 0;

    std::int64_t total() const { return tp + fp + tn + fn; }
    bool operator==(const ConfusionMatrix&) const = default;
};

/// Counts agreement between predicted and true labels (anything nonzero
/// counts as positive). Throws ParamError on size mismatch or empty input.
ConfusionMatrix confusion(const std::vector<int>& predicted, const std::vector<int>& truth);

struct MetricBundle {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double mcc = 0.0;

    bool operator==(const MetricBundle&) const = default;
};

/// Standard formulas; any zero denominator yields 0 for that metric, so
/// reports stay total and sortable. Throws ParamError when cm.total() == 0.
MetricBundle compute_metrics(const ConfusionMatrix& cm);

struct KsResult {
    double d = 0.0;
    double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test. D is the supremum gap between the
/// two empirical CDFs; the p-value uses the asymptotic series
/// Q(lambda) = 2 * sum_{j=1..100} (-1)^(j-1) * exp(-2 j^2 lambda^2) with
/// lambda = sqrt(n*m/(n+m)) * D, clamped to [0,1]. For lambda < 0.2 the
/// truncated series is numerically useless and p is pinned to 1 (the
/// remainder there is below 1e-12). Throws ParamError on empty input.
KsResult ks_two_sample(const std::vector<double>& a, const std::vector<double>& b);

} // namespace txnforge::metrics
