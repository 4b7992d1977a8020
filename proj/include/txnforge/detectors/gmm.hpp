#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "txnforge/matrix.hpp"

namespace txnforge::detectors {

struct GmmParams {
    int n_components = 2;
    int max_iters = 200;
    double tol = 1e-6;        // stop when |LL_t - LL_{t-1}| < tol
    double cov_floor = 1e-6;  // per-dimension variance floor
    std::uint64_t seed = 42;
    /// Override which component is reported suspicious; by default the
    /// one with the smallest mixing weight (lowest index on ties), or
    /// none at all when n_components == 1 so nothing is flagged.
    std::optional<int> suspicious_component;
};

struct GmmResult {
    std::vector<int> labels;           // 1 = suspicious under the mapping
    std::vector<int> assignments;      // argmax-responsibility component per row
    std::vector<double> weights;       // mixing weights, sum to 1
    Matrix means;                      // n_components x d
    Matrix variances;                  // n_components x d, diagonal covariances
    Matrix responsibilities;           // N x n_components, rows sum to 1
    std::vector<double> log_likelihood_trace;  // one entry per EM iteration
    std::vector<int> reinit_iterations;        // iterations where a dead component was reseeded
    int suspicious_component = -1;     // -1 when nothing is mapped to suspicious
    int iterations = 0;
    bool converged = false;
};

/// Diagonal-covariance Gaussian mixture fit with EM.
///
/// Initialization: k-means++ seeding drawn from `seed` (first center
/// uniform over rows, later centers proportional to squared distance to
/// the nearest chosen center); weights start uniform and variances start
/// at the per-dimension data variance. E-steps run in the log domain.
/// A component whose total responsibility collapses to zero is reseeded
/// from the point farthest from the surviving means, at most 3 times per
/// fit; a fourth collapse throws DataError. Log-likelihood is
/// non-decreasing across iterations except immediately after a reseed
/// (those iterations are listed in reinit_iterations).
///
/// Throws ParamError when n_components < 1, rows < n_components, or the
/// matrix is empty.
GmmResult gmm_fit_predict(const Matrix& x, const GmmParams& params);

GmmResult gmm_fit_predict(const Matrix& x, int n_components, std::uint64_t seed);

/// Labels new rows under an already-fitted mixture (one E-step plus the
/// model's suspicious-component mapping). Throws ParamError when the
/// model is unfitted or the column counts disagree.
std::vector<int> gmm_predict(const GmmResult& model, const Matrix& x);

} // namespace txnforge::detectors
