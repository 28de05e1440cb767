#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fsdr/error.hpp"
#include "fsdr/linalg.hpp"
#include "fsdr/types.hpp"

namespace fsdr {

/// Linear weighted inverse regression ensemble (WIRE).
///
/// Given predictors X (n x p) and response distances D, the kernel matrix
///
///     Lambda = -1/(n(n-1)) sum_{i != j} (X_i - mu)(X_j - mu)^T d(Y_i, Y_j)
///
/// is a U-statistic; the central subspace estimate is spanned by the top
/// left singular vectors of M = Sigma^+ Lambda.

/// Result of a linear fit.
struct SubspaceEstimate {
    Matrix basis;            // p x d, orthonormal columns
    Vector singular_values;  // all p singular values of M_hat, nonincreasing
    int d = 0;
    Matrix M_hat;
    Matrix Sigma_hat;
    Vector mu_hat;
    Matrix Lambda_hat;
    Index sigma_rank = 0;
    std::vector<std::string> warnings;
};

inline void validate_predictors(const Matrix& x) {
    if (x.rows() < 2) throw ValidationError("predictor matrix needs at least 2 rows");
    if (x.cols() < 1) throw ValidationError("predictor matrix needs at least 1 column");
    require_finite(x, "predictor matrix");
}

namespace detail {

/// -C^T D C / (n(n-1)), symmetrized exactly. The i == j terms vanish
/// because D has a zero diagonal.
inline Matrix lambda_from_centered(const Matrix& centered, const Matrix& dist) {
    const double n = static_cast<double>(centered.rows());
    Matrix lam = -(centered.transpose() * (dist * centered)) / (n * (n - 1.0));
    return 0.5 * (lam + lam.transpose());
}

}  // namespace detail

/// U-statistic estimate of the WIRE matrix.
inline Matrix wire_lambda(const Matrix& x, const DistanceMatrix& d) {
    validate_predictors(x);
    if (d.n() != x.rows())
        throw DimensionError("wire_lambda: distance matrix has " + std::to_string(d.n()) + " rows, predictors have " +
                             std::to_string(x.rows()));
    const Matrix centered = x.rowwise() - x.colwise().mean();
    return detail::lambda_from_centered(centered, d.values());
}

namespace detail {

struct WireCore {
    Moments moments;
    Matrix lambda;
    Matrix m_hat;
    Index sigma_rank = 0;
};

inline WireCore wire_core(const Matrix& x, const Matrix& dist) {
    WireCore core;
    core.moments = sample_moments(x);
    core.lambda = lambda_from_centered(core.moments.centered, dist);
    const auto pinv = symmetric_pinv(core.moments.covariance);
    core.sigma_rank = pinv.rank;
    core.m_hat = pinv.inverse * core.lambda;
    return core;
}

struct LeftSingular {
    Matrix vectors;  // p x p, sign-canonicalized
    Vector values;
};

inline LeftSingular left_singular(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU);
    LeftSingular out{svd.matrixU(), svd.singularValues()};
    canonicalize_signs(out.vectors);
    return out;
}

}  // namespace detail

/// Fits the linear WIRE estimator with structural dimension d.
///
/// Sigma_hat is pseudo-inverted (eigenvalues below 1e-10 of the largest
/// are dropped) so near-constant predictors do not blow up the fit. If
/// Lambda_hat is exactly zero there is no signal: the basis is returned
/// empty (p x 0) with a warning.
inline SubspaceEstimate wire_fit(const Matrix& x, const DistanceMatrix& d, int dim) {
    validate_predictors(x);
    const Index p = x.cols();
    if (dim < 1 || dim > p)
        throw ParameterError("wire_fit: d must satisfy 1 <= d <= p (d=" + std::to_string(dim) +
                             ", p=" + std::to_string(p) + ")");
    if (d.n() != x.rows())
        throw DimensionError("wire_fit: distance matrix has " + std::to_string(d.n()) + " rows, predictors have " +
                             std::to_string(x.rows()));

    auto core = detail::wire_core(x, d.values());
    SubspaceEstimate est;
    est.mu_hat = core.moments.mean;
    est.Sigma_hat = core.moments.covariance;
    est.Lambda_hat = core.lambda;
    est.M_hat = core.m_hat;
    est.sigma_rank = core.sigma_rank;
    if (core.sigma_rank < dim)
        est.warnings.push_back("covariance rank " + std::to_string(core.sigma_rank) + " is below d=" +
                               std::to_string(dim) + "; using pseudo-inverse");

    const auto svd = detail::left_singular(core.m_hat);
    est.singular_values = svd.values;
    if (core.lambda.cwiseAbs().maxCoeff() == 0.0) {
        est.warnings.push_back("Lambda_hat is identically zero; returning an empty subspace");
        est.basis = Matrix(p, 0);
        est.d = 0;
        return est;
    }
    est.basis = svd.vectors.leftCols(dim);
    est.d = dim;
    return est;
}

/// Reduced predictors X * basis (row i is basis^T X_i).
inline Matrix sufficient_predictors(const Matrix& x, const SubspaceEstimate& fit) {
    if (x.cols() != fit.basis.rows())
        throw DimensionError("sufficient_predictors: X has " + std::to_string(x.cols()) +
                             " columns, basis has " + std::to_string(fit.basis.rows()) + " rows");
    return x * fit.basis;
}

}  // namespace fsdr
