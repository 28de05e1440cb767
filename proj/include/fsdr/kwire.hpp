#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "fsdr/error.hpp"
#include "fsdr/linalg.hpp"
#include "fsdr/types.hpp"
#include "fsdr/wire.hpp"

namespace fsdr {

/// Gaussian kernel exp(-|x - x'|^2 / (2 sigma^2)).
struct KernelSpec {
    double sigma_kappa = 0.1;

    void validate() const {
        if (!(sigma_kappa > 0.0) || !std::isfinite(sigma_kappa))
            throw ParameterError("kernel bandwidth must be > 0");
    }

    template <class A, class B>
    [[nodiscard]] double operator()(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) const {
        return std::exp(-(a - b).squaredNorm() / (2.0 * sigma_kappa * sigma_kappa));
    }
};

/// Kernel matrix between the rows of a and the rows of b.
inline Matrix cross_gram(const Matrix& a, const Matrix& b, const KernelSpec& kernel) {
    kernel.validate();
    if (a.cols() != b.cols()) throw DimensionError("cross_gram: column counts differ");
    const double scale = -1.0 / (2.0 * kernel.sigma_kappa * kernel.sigma_kappa);
    Matrix out(a.rows(), b.rows());
    for (Index j = 0; j < b.rows(); ++j)
        for (Index i = 0; i < a.rows(); ++i) out(i, j) = std::exp(scale * (a.row(i) - b.row(j)).squaredNorm());
    return out;
}

/// K_n with K(i, j) = kappa(X_i, X_j); exactly symmetric, unit diagonal.
inline Matrix gram_matrix(const Matrix& x, const KernelSpec& kernel) {
    validate_predictors(x);
    kernel.validate();
    const Index n = x.rows();
    const double scale = -1.0 / (2.0 * kernel.sigma_kappa * kernel.sigma_kappa);
    Matrix k(n, n);
    for (Index i = 0; i < n; ++i) {
        k(i, i) = 1.0;
        for (Index j = i + 1; j < n; ++j) {
            const double v = std::exp(scale * (x.row(i) - x.row(j)).squaredNorm());
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

/// G = (I - J/n) K (I - J/n).
inline Matrix center_gram(const Matrix& k) {
    if (k.rows() != k.cols()) throw DimensionError("center_gram: matrix must be square");
    const Vector col_means = k.colwise().mean().transpose();
    const Vector row_means = k.rowwise().mean();
    const double grand = k.mean();
    Matrix g = k;
    g.colwise() -= row_means;
    g.rowwise() -= col_means.transpose();
    g.array() += grand;
    return 0.5 * (g + g.transpose());
}

/// Nonlinear fit. Column l of alpha holds the coefficients of
/// f_l = sum_i alpha(i, l) * eta_i with eta_i = kappa(., X_i) - mean_s kappa(., X_s).
struct KwireFit {
    Matrix alpha;        // n x d
    Matrix gamma;        // n x d, orthonormal columns
    Vector eigenvalues;  // d, nonincreasing
    double epsilon_n = 1e-3;
    KernelSpec kernel;
    Matrix x_train;
    Vector kernel_col_means;
    Matrix centered_gram;  // G_X, kept for in-sample evaluation
    int d = 0;
    double w_asymmetry = 0.0;  // max |W - W^T| before symmetrization
    double w_min_eigenvalue = 0.0;
    double w_trace = 0.0;
};

namespace detail {

/// W = S D G D S^T with S = (G + eps I)^{-1} G. G is symmetric PSD, so
/// W = T G T^T with T = S D is a congruence and hence PSD.
struct KwireOperator {
    Matrix w;
    Eigen::LLT<Matrix> ridge;
};

inline KwireOperator kwire_operator(const Matrix& g, const Matrix& dist, double epsilon_n) {
    Matrix ridge = g;
    ridge.diagonal().array() += epsilon_n;
    KwireOperator op{Matrix(), Eigen::LLT<Matrix>(ridge)};
    if (op.ridge.info() != Eigen::Success)
        throw NumericalError("kwire: G_X + eps I is not positive definite (eps=" + std::to_string(epsilon_n) + ")");
    const Matrix s = op.ridge.solve(g);  // (G + eps I)^{-1} G
    const Matrix t = s * dist;
    op.w = t * g * t.transpose();
    return op;
}

}  // namespace detail

/// Kernel WIRE via the n x n coordinate eigenproblem
/// (G + eps I)^{-1} G D G D G (G + eps I)^{-1}; alpha_l = (G + eps I)^{-1} gamma_l.
/// Cost is O(n^3); a few thousand observations is the practical limit.
inline KwireFit kwire_fit(const Matrix& x, const DistanceMatrix& d, int dim, double epsilon_n,
                          const KernelSpec& kernel) {
    validate_predictors(x);
    kernel.validate();
    const Index n = x.rows();
    if (!(epsilon_n > 0.0)) throw ParameterError("kwire_fit: epsilon_n must be > 0");
    if (dim < 1 || dim > n) throw ParameterError("kwire_fit: d must satisfy 1 <= d <= n");
    if (d.n() != n)
        throw DimensionError("kwire_fit: distance matrix has " + std::to_string(d.n()) + " rows, predictors have " +
                             std::to_string(n));

    const Matrix k = gram_matrix(x, kernel);
    KwireFit fit;
    fit.centered_gram = center_gram(k);
    auto op = detail::kwire_operator(fit.centered_gram, d.values(), epsilon_n);
    fit.w_asymmetry = (op.w - op.w.transpose()).cwiseAbs().maxCoeff();
    const Matrix w = 0.5 * (op.w + op.w.transpose());
    fit.w_trace = w.trace();

    Eigen::SelfAdjointEigenSolver<Matrix> eig(w);
    if (eig.info() != Eigen::Success) throw NumericalError("kwire_fit: eigensolver failed");
    fit.w_min_eigenvalue = eig.eigenvalues()(0);

    fit.gamma.resize(n, dim);
    fit.eigenvalues.resize(dim);
    for (int l = 0; l < dim; ++l) {
        fit.gamma.col(l) = eig.eigenvectors().col(n - 1 - l);
        fit.eigenvalues(l) = std::max(0.0, eig.eigenvalues()(n - 1 - l));
    }
    canonicalize_signs(fit.gamma);
    fit.alpha = op.ridge.solve(fit.gamma);
    fit.epsilon_n = epsilon_n;
    fit.kernel = kernel;
    fit.x_train = x;
    fit.kernel_col_means = k.colwise().mean().transpose();
    fit.d = dim;
    return fit;
}

/// In-sample predictors G_X alpha; every column has mean zero.
inline Matrix kwire_insample(const KwireFit& fit) {
    if (fit.centered_gram.rows() == fit.alpha.rows()) return fit.centered_gram * fit.alpha;
    return center_gram(gram_matrix(fit.x_train, fit.kernel)) * fit.alpha;
}

/// Out-of-sample evaluation f_l(x) = k(x)^T alpha_l - mean(k(x)) * sum(alpha_l).
inline Matrix kwire_predict(const KwireFit& fit, const Matrix& x_new) {
    if (x_new.cols() != fit.x_train.cols())
        throw DimensionError("kwire_predict: new data has " + std::to_string(x_new.cols()) +
                             " columns, training data has " + std::to_string(fit.x_train.cols()));
    require_finite(x_new, "prediction input");
    const Matrix kx = cross_gram(x_new, fit.x_train, fit.kernel);  // m x n
    const Vector row_mean = kx.rowwise().mean();
    const Eigen::RowVectorXd alpha_sum = fit.alpha.colwise().sum();
    return kx * fit.alpha - row_mean * alpha_sum;
}

}  // namespace fsdr
