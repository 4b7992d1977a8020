#include "txnforge/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "txnforge/errors.hpp"

namespace txnforge::metrics {

ConfusionMatrix confusion(const std::vector<int>& predicted, const std::vector<int>& truth) {
    if (predicted.size() != truth.size())
        throw ParamError("confusion: predicted and truth sizes differ");
    if (predicted.empty()) throw ParamError("confusion: empty input");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const bool p = predicted[i] != 0;
        const bool t = truth[i] != 0;
        if (p && t) ++cm.tp;
        else if (p && !t) ++cm.fp;
        else if (!p && t) ++cm.fn;
        else ++cm.tn;
    }
    return cm;
}

namespace {

double ratio_or_zero(double num, double denom) { return denom == 0.0 ? 0.0 : num / denom; }

} // namespace

MetricBundle compute_metrics(const ConfusionMatrix& cm) {
    if (cm.total() <= 0) throw ParamError("compute_metrics: empty confusion matrix");
    const auto tp = static_cast<double>(cm.tp);
    const auto fp = static_cast<double>(cm.fp);
    const auto tn = static_cast<double>(cm.tn);
    const auto fn = static_cast<double>(cm.fn);

    MetricBundle m;
    m.accuracy = (tp + tn) / static_cast<double>(cm.total());
    m.precision = ratio_or_zero(tp, tp + fp);
    m.recall = ratio_or_zero(tp, tp + fn);
    m.f1 = ratio_or_zero(2.0 * m.precision * m.recall, m.precision + m.recall);

    const double num = tp * tn - fp * fn;
    const double denom = std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
    m.mcc = ratio_or_zero(num, denom);
    return m;
}

KsResult ks_two_sample(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw ParamError("ks_two_sample: empty sample");

    std::vector<double> sa = a;
    std::vector<double> sb = b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());

    const auto n = static_cast<double>(sa.size());
    const auto m = static_cast<double>(sb.size());

    // Merge walk: advance past every duplicate of the current value in
    // both samples before measuring the ECDF gap, so ties contribute one
    // comparison point.
    double d = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < sa.size() && j < sb.size()) {
        const double v = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] == v) ++i;
        while (j < sb.size() && sb[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
    }

    KsResult res;
    res.d = d;
    const double lambda = std::sqrt(n * m / (n + m)) * d;
    if (lambda < 0.2) {
        res.p_value = 1.0;
        return res;
    }
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        sum += sign * 2.0 * std::exp(-2.0 * static_cast<double>(k) * static_cast<double>(k) *
                                     lambda * lambda);
        sign = -sign;
    }
    res.p_value = std::clamp(sum, 0.0, 1.0);
    return res;
}

} // namespace txnforge::metrics
