#include "txnforge/detectors/gmm.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "txnforge/errors.hpp"
#include "txnforge/rng.hpp"

namespace txnforge::detectors {

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = a[d] - b[d];
        s += diff * diff;
    }
    return s;
}

// k-means++ seeding: returns the chosen row indices.
std::vector<std::size_t> kmeanspp_rows(const Matrix& x, int k, Rng64& rng) {
    std::vector<std::size_t> centers;
    centers.push_back(rng.uniform_below(x.rows));

    std::vector<double> d2(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) d2[i] = sq_dist(x.row(i), x.row(centers[0]));

    while (centers.size() < static_cast<std::size_t>(k)) {
        double total = 0.0;
        for (double v : d2) total += v;
        std::size_t next;
        if (total <= 0.0) {
            next = rng.uniform_below(x.rows);
        } else {
            const double u = rng.uniform() * total;
            double acc = 0.0;
            next = 0;
            for (std::size_t i = 0; i < x.rows; ++i) {
                if (d2[i] <= 0.0) continue;
                next = i;
                acc += d2[i];
                if (acc >= u) break;
            }
        }
        centers.push_back(next);
        for (std::size_t i = 0; i < x.rows; ++i)
            d2[i] = std::min(d2[i], sq_dist(x.row(i), x.row(next)));
    }
    return centers;
}

std::vector<double> data_variance(const Matrix& x, double floor) {
    std::vector<double> mean(x.cols, 0.0);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t d = 0; d < x.cols; ++d) mean[d] += x.at(i, d);
    for (auto& v : mean) v /= static_cast<double>(x.rows);
    std::vector<double> var(x.cols, 0.0);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t d = 0; d < x.cols; ++d) {
            const double diff = x.at(i, d) - mean[d];
            var[d] += diff * diff;
        }
    for (auto& v : var) v = std::max(v / static_cast<double>(x.rows), floor);
    return var;
}

} // namespace

GmmResult gmm_fit_predict(const Matrix& x, int n_components, std::uint64_t seed) {
    GmmParams params;
    params.n_components = n_components;
    params.seed = seed;
    return gmm_fit_predict(x, params);
}

GmmResult gmm_fit_predict(const Matrix& x, const GmmParams& params) {
    if (x.rows == 0 || x.cols == 0) throw ParamError("gmm_fit_predict: empty matrix");
    if (params.n_components < 1) throw ParamError("gmm_fit_predict: n_components must be >= 1");
    if (x.rows < static_cast<std::size_t>(params.n_components))
        throw ParamError("gmm_fit_predict: fewer rows than components");
    if (params.max_iters < 1) throw ParamError("gmm_fit_predict: max_iters must be >= 1");
    if (!(params.tol >= 0.0)) throw ParamError("gmm_fit_predict: tol must be >= 0");
    if (params.suspicious_component &&
        (*params.suspicious_component < -1 || *params.suspicious_component >= params.n_components))
        throw ParamError("gmm_fit_predict: suspicious_component out of range");

    const auto k = static_cast<std::size_t>(params.n_components);
    const std::size_t n = x.rows;
    const std::size_t dim = x.cols;
    const double floor = params.cov_floor;

    Rng64 rng(params.seed);
    const auto center_rows = kmeanspp_rows(x, params.n_components, rng);
    const auto init_var = data_variance(x, floor);

    GmmResult res;
    res.weights.assign(k, 1.0 / static_cast<double>(k));
    res.means = Matrix(k, dim);
    res.variances = Matrix(k, dim);
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t d = 0; d < dim; ++d) {
            res.means.at(c, d) = x.at(center_rows[c], d);
            res.variances.at(c, d) = init_var[d];
        }
    res.responsibilities = Matrix(n, k);

    constexpr double kLog2Pi = 1.8378770664093453;  // log(2*pi)
    std::vector<double> log_weight(k);
    std::vector<double> log_norm(k);     // sum_d log(2*pi*var)
    std::vector<double> logp(k);
    std::vector<double> nk(k);
    int reinits_used = 0;
    double prev_ll = -std::numeric_limits<double>::infinity();

    auto refresh_component_cache = [&] {
        for (std::size_t c = 0; c < k; ++c) {
            log_weight[c] = res.weights[c] > 0.0
                                ? std::log(res.weights[c])
                                : -std::numeric_limits<double>::infinity();
            double s = 0.0;
            for (std::size_t d = 0; d < dim; ++d) s += kLog2Pi + std::log(res.variances.at(c, d));
            log_norm[c] = s;
        }
    };

    while (res.iterations < params.max_iters) {
        refresh_component_cache();

        // E-step in the log domain; the per-row log-sum-exp accumulates
        // the total log-likelihood.
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = x.row(i);
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                double quad = 0.0;
                for (std::size_t d = 0; d < dim; ++d) {
                    const double diff = row[d] - res.means.at(c, d);
                    quad += diff * diff / res.variances.at(c, d);
                }
                logp[c] = log_weight[c] - 0.5 * (log_norm[c] + quad);
                best = std::max(best, logp[c]);
            }
            double sum = 0.0;
            for (std::size_t c = 0; c < k; ++c) sum += std::exp(logp[c] - best);
            const double lse = best + std::log(sum);
            ll += lse;
            for (std::size_t c = 0; c < k; ++c)
                res.responsibilities.at(i, c) = std::exp(logp[c] - lse);
        }

        ++res.iterations;
        res.log_likelihood_trace.push_back(ll);
        if (res.iterations > 1 && std::abs(ll - prev_ll) < params.tol) {
            res.converged = true;
            break;
        }
        prev_ll = ll;
        if (res.iterations == params.max_iters) break;

        // M-step.
        for (std::size_t c = 0; c < k; ++c) {
            nk[c] = 0.0;
            for (std::size_t i = 0; i < n; ++i) nk[c] += res.responsibilities.at(i, c);
        }

        bool reseeded = false;
        for (std::size_t c = 0; c < k; ++c) {
            if (nk[c] > 1e-10) {
                res.weights[c] = nk[c] / static_cast<double>(n);
                for (std::size_t d = 0; d < dim; ++d) {
                    double m = 0.0;
                    for (std::size_t i = 0; i < n; ++i)
                        m += res.responsibilities.at(i, c) * x.at(i, d);
                    res.means.at(c, d) = m / nk[c];
                }
                for (std::size_t d = 0; d < dim; ++d) {
                    double v = 0.0;
                    for (std::size_t i = 0; i < n; ++i) {
                        const double diff = x.at(i, d) - res.means.at(c, d);
                        v += res.responsibilities.at(i, c) * diff * diff;
                    }
                    res.variances.at(c, d) = std::max(v / nk[c], floor);
                }
                continue;
            }

            // Dead component: reseed from the point farthest from every
            // other mean.
            if (++reinits_used > 3)
                throw DataError("gmm_fit_predict: component collapsed more than 3 times");
            std::size_t far = 0;
            double far_d2 = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                double nearest = std::numeric_limits<double>::infinity();
                for (std::size_t c2 = 0; c2 < k; ++c2) {
                    if (c2 == c) continue;
                    nearest = std::min(nearest, sq_dist(x.row(i), res.means.row(c2)));
                }
                if (nearest > far_d2) {
                    far_d2 = nearest;
                    far = i;
                }
            }
            for (std::size_t d = 0; d < dim; ++d) {
                res.means.at(c, d) = x.at(far, d);
                res.variances.at(c, d) = init_var[d];
            }
            res.weights[c] = 1.0 / static_cast<double>(n);
            reseeded = true;
        }
        if (reseeded) {
            double wsum = 0.0;
            for (double w : res.weights) wsum += w;
            for (auto& w : res.weights) w /= wsum;
            // The next E-step's log-likelihood may legally dip.
            res.reinit_iterations.push_back(res.iterations + 1);
        }
    }

    res.assignments.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best_c = 0;
        for (std::size_t c = 1; c < k; ++c)
            if (res.responsibilities.at(i, c) > res.responsibilities.at(i, best_c)) best_c = c;
        res.assignments[i] = static_cast<int>(best_c);
    }

    if (params.suspicious_component) {
        res.suspicious_component = *params.suspicious_component;
    } else if (k == 1) {
        res.suspicious_component = -1;  // a single component is the normal bulk
    } else {
        std::size_t smallest = 0;
        for (std::size_t c = 1; c < k; ++c)
            if (res.weights[c] < res.weights[smallest]) smallest = c;
        res.suspicious_component = static_cast<int>(smallest);
    }

    res.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        res.labels[i] = res.assignments[i] == res.suspicious_component ? 1 : 0;
    return res;
}

std::vector<int> gmm_predict(const GmmResult& model, const Matrix& x) {
    const std::size_t k = model.means.rows;
    if (k == 0 || model.weights.size() != k) throw ParamError("gmm_predict: unfitted model");
    if (x.cols != model.means.cols) throw ParamError("gmm_predict: column count mismatch");

    constexpr double kLog2Pi = 1.8378770664093453;  // log(2*pi)
    std::vector<int> labels(x.rows, 0);
    std::vector<double> logp(k);
    for (std::size_t i = 0; i < x.rows; ++i) {
        const auto row = x.row(i);
        for (std::size_t c = 0; c < k; ++c) {
            double s = model.weights[c] > 0.0 ? std::log(model.weights[c])
                                              : -std::numeric_limits<double>::infinity();
            for (std::size_t d = 0; d < x.cols; ++d) {
                const double var = model.variances.at(c, d);
                const double diff = row[d] - model.means.at(c, d);
                s -= 0.5 * (kLog2Pi + std::log(var) + diff * diff / var);
            }
            logp[c] = s;
        }
        std::size_t best = 0;
        for (std::size_t c = 1; c < k; ++c)
            if (logp[c] > logp[best]) best = c;
        labels[i] = static_cast<int>(best) == model.suspicious_component ? 1 : 0;
    }
    return labels;
}

} // namespace txnforge::detectors
