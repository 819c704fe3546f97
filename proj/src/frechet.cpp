#include "fmd/frechet.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <fstream>
#include <iostream>
#include <string>

#include "fmd/errors.hpp"
#include "text_util.hpp"

namespace fmd {

using detail::fmt17;
using detail::parse_double;
using detail::parse_int;
using detail::split_ws;

namespace {

double symmetry_gap(const Eigen::MatrixXd& A) {
    return (A - A.transpose()).cwiseAbs().maxCoeff();
}

Eigen::VectorXd psd_eigenvalues(const Eigen::MatrixXd& sym, const char* context) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        // Near-singular input can stall the iteration; nudge the spectrum
        // with a diagonal stabilizer and retry once.
        const double eps = 1e-10 * std::max(sym.diagonal().mean(), 1e-300);
        Eigen::MatrixXd nudged = sym;
        nudged.diagonal().array() += eps;
        solver.compute(nudged, Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success) {
            throw EigenFailure(std::string("eigensolver failed in ") + context);
        }
    }
    return solver.eigenvalues();
}

}  // namespace

GaussianStats::GaussianStats(Eigen::VectorXd mu_, Eigen::MatrixXd sigma_, std::int64_t n_)
    : mu(std::move(mu_)), sigma(std::move(sigma_)), n(n_) {
    if (sigma.rows() != sigma.cols() || sigma.rows() != mu.size()) {
        throw DimensionMismatch("covariance shape does not match the mean");
    }
    if (n < 2) throw InsufficientSamples("Gaussian stats need n >= 2");
    if (!mu.allFinite() || !sigma.allFinite()) {
        throw ValidationError("Gaussian stats contain non-finite values");
    }
    const double gap = symmetry_gap(sigma);
    if (gap > 1e-8 * (1.0 + sigma.cwiseAbs().maxCoeff())) {
        throw NotSymmetric("covariance asymmetry " + std::to_string(gap));
    }
    sigma = ((sigma + sigma.transpose()) / 2.0).eval();
    const double min_eig = psd_eigenvalues(sigma, "GaussianStats").minCoeff();
    if (min_eig < -1e-8) {
        throw ValidationError("covariance is not numerically PSD (min eigenvalue " +
                              std::to_string(min_eig) + ")");
    }
}

GaussianStats fit_gaussian(const Eigen::MatrixXd& features) {
    const Eigen::Index n = features.rows();
    const Eigen::Index d = features.cols();
    if (n < 2) {
        throw InsufficientSamples("covariance fit needs at least 2 samples, got " +
                                  std::to_string(n));
    }
    if (d < 1) throw DimensionMismatch("features must have dimension >= 1");
    if (!features.allFinite()) throw ValidationError("features contain non-finite values");

    Eigen::VectorXd mu = features.colwise().mean();
    Eigen::MatrixXd centered = features.rowwise() - mu.transpose();
    Eigen::MatrixXd sigma =
        (centered.transpose() * centered) / static_cast<double>(n - 1);
    sigma = ((sigma + sigma.transpose()) / 2.0).eval();
    return GaussianStats(std::move(mu), std::move(sigma), n);
}

Eigen::MatrixXd sqrtm_psd(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols()) throw DimensionMismatch("matrix square root needs a square matrix");
    const double gap = symmetry_gap(A);
    if (gap > 1e-8 * (1.0 + A.cwiseAbs().maxCoeff())) {
        throw NotSymmetric("matrix asymmetry " + std::to_string(gap));
    }
    const Eigen::MatrixXd sym = (A + A.transpose()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success) throw EigenFailure("eigensolver failed in sqrtm_psd");
    const Eigen::VectorXd roots = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Eigen::MatrixXd s =
        solver.eigenvectors() * roots.asDiagonal() * solver.eigenvectors().transpose();
    return ((s + s.transpose()) / 2.0).eval();
}

double frechet_distance(const GaussianStats& reference, const GaussianStats& generated) {
    if (reference.dim() != generated.dim()) {
        throw DimensionMismatch("Gaussian stats have different dimensions (" +
                                std::to_string(reference.dim()) + " vs " +
                                std::to_string(generated.dim()) + ")");
    }
    const Eigen::MatrixXd sqrt_ref = sqrtm_psd(reference.sigma);
    Eigen::MatrixXd inner = sqrt_ref * generated.sigma * sqrt_ref;
    inner = ((inner + inner.transpose()) / 2.0).eval();

    const Eigen::VectorXd eigs = psd_eigenvalues(inner, "frechet_distance");
    const double trace_cross = eigs.cwiseMax(0.0).cwiseSqrt().sum();

    const double mean_term = (generated.mu - reference.mu).squaredNorm();
    const double trace_ref = reference.sigma.trace();
    const double trace_gen = generated.sigma.trace();
    const double value = mean_term + trace_ref + trace_gen - 2.0 * trace_cross;

    if (value < -1e-6 * (1.0 + trace_ref + trace_gen)) {
        std::cerr << "warning: frechet_distance pre-clamp value " << value
                  << " is significantly negative; the covariances are numerically troubled\n";
    }
    return std::max(0.0, value);
}

void save_stats(const GaussianStats& stats, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOError("cannot open '" + path + "' for writing");
    const int d = stats.dim();
    out << "STATS1 " << d << ' ' << stats.n << '\n';
    for (int i = 0; i < d; ++i) {
        if (i) out << ' ';
        out << fmt17(stats.mu[i]);
    }
    out << '\n';
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
            if (c) out << ' ';
            out << fmt17(stats.sigma(r, c));
        }
        out << '\n';
    }
    if (!out) throw IOError("failed writing '" + path + "'");
}

GaussianStats load_stats(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open '" + path + "' for reading");
    std::string line;
    long lineno = 0;
    if (!std::getline(in, line)) throw ParseError(1, "missing STATS1 header");
    ++lineno;
    const auto header = split_ws(line);
    if (header.size() != 3 || header[0] != "STATS1") {
        throw ParseError(lineno, "expected 'STATS1 <d> <n>'");
    }
    const long long d = parse_int(header[1], lineno);
    const long long n = parse_int(header[2], lineno);
    if (d < 1) throw ParseError(lineno, "dimension must be >= 1");

    auto read_row = [&](long long expected) {
        if (!std::getline(in, line)) throw ParseError(lineno, "stats file truncated");
        ++lineno;
        const auto values = split_ws(line);
        if (static_cast<long long>(values.size()) != expected) {
            throw ParseError(lineno, "expected " + std::to_string(expected) + " values, got " +
                                         std::to_string(values.size()));
        }
        Eigen::VectorXd v(expected);
        for (long long i = 0; i < expected; ++i) v[i] = parse_double(values[i], lineno);
        return v;
    };

    Eigen::VectorXd mu = read_row(d);
    Eigen::MatrixXd sigma(d, d);
    for (long long r = 0; r < d; ++r) sigma.row(r) = read_row(d).transpose();
    return GaussianStats(std::move(mu), std::move(sigma), n);
}

}  // namespace fmd
