#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "fsdr/error.hpp"
#include "fsdr/types.hpp"

namespace fsdr {

/// Flips each column so its largest-magnitude entry is positive; ties go
/// to the lowest row index.
inline void canonicalize_signs(Matrix& columns) {
    for (Index c = 0; c < columns.cols(); ++c) {
        Index best = 0;
        double best_abs = -1.0;
        for (Index r = 0; r < columns.rows(); ++r) {
            const double a = std::abs(columns(r, c));
            if (a > best_abs) {
                best_abs = a;
                best = r;
            }
        }
        if (columns.rows() > 0 && columns(best, c) < 0.0) columns.col(c) *= -1.0;
    }
}

/// Column means and the 1/n-divisor covariance of the rows of x.
struct Moments {
    Vector mean;
    Matrix centered;
    Matrix covariance;
};

inline Moments sample_moments(const Matrix& x) {
    Moments m;
    m.mean = x.colwise().mean().transpose();
    m.centered = x.rowwise() - m.mean.transpose();
    m.covariance = (m.centered.transpose() * m.centered) / static_cast<double>(x.rows());
    m.covariance = 0.5 * (m.covariance + m.covariance.transpose());
    return m;
}

/// Moore-Penrose inverse of a symmetric PSD matrix via its
/// eigendecomposition; eigenvalues at or below rel_tol * max are dropped.
struct SymmetricPinv {
    Matrix inverse;
    Index rank = 0;
};

inline SymmetricPinv symmetric_pinv(const Matrix& s, double rel_tol = 1e-10) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
    if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition of covariance failed");
    const Vector& vals = eig.eigenvalues();
    const double top = vals.size() ? vals.maxCoeff() : 0.0;
    Vector inv = Vector::Zero(vals.size());
    SymmetricPinv out;
    if (top > 0.0) {
        for (Index i = 0; i < vals.size(); ++i) {
            if (vals(i) > rel_tol * top) {
                inv(i) = 1.0 / vals(i);
                ++out.rank;
            }
        }
    }
    out.inverse = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
    return out;
}

}  // namespace fsdr
