#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

namespace fmd {

// Gaussian moments of an embedded dataset. The covariance is symmetrized on
// construction and must be numerically PSD (eigenvalues >= -1e-8).
struct GaussianStats {
    Eigen::VectorXd mu;
    Eigen::MatrixXd sigma;
    std::int64_t n = 0;

    GaussianStats(Eigen::VectorXd mu_, Eigen::MatrixXd sigma_, std::int64_t n_);

    int dim() const { return static_cast<int>(mu.size()); }
};

// Sample mean and unbiased (n-1) covariance of the feature rows.
// Throws InsufficientSamples for n < 2.
GaussianStats fit_gaussian(const Eigen::MatrixXd& features);

// Symmetric PSD square root via eigendecomposition A = Q diag(l) Q^T with
// negative eigenvalues clamped to zero: returns Q diag(sqrt l) Q^T.
// Throws NotSymmetric when A is not symmetric within 1e-8*(1+max|A|).
Eigen::MatrixXd sqrtm_psd(const Eigen::MatrixXd& A);

// Frechet distance between two Gaussians:
//   |mu_g - mu_r|^2 + tr(S_r) + tr(S_g) - 2 tr sqrt(sqrt(S_r) S_g sqrt(S_r))
// The symmetric inner product replaces the square root of the non-symmetric
// product S_g*S_r; the traces are equal and the symmetric form stays in real
// arithmetic. Result is clamped to >= 0; a pre-clamp value below
// -1e-6*(1+tr S_r+tr S_g) emits a warning on stderr.
double frechet_distance(const GaussianStats& reference, const GaussianStats& generated);

// STATS1 text format: `STATS1 <d> <n>`, mean line, d covariance rows.
GaussianStats load_stats(const std::string& path);
void save_stats(const GaussianStats& stats, const std::string& path);

}  // namespace fmd
