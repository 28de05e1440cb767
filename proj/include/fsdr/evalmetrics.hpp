#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "fsdr/error.hpp"
#include "fsdr/types.hpp"

namespace fsdr {

enum class Statistic { trace_correlation, dcor_squared };

struct EvalReport {
    Statistic statistic;
    double value;
};

namespace detail {

inline Matrix column_projection(const Matrix& b) {
    Eigen::ColPivHouseholderQR<Matrix> qr(b);
    qr.setThreshold(1e-12);
    if (qr.rank() < b.cols())
        throw ValidationError("trace_correlation: basis is rank deficient (rank " + std::to_string(qr.rank()) +
                              " < " + std::to_string(b.cols()) + ")");
    const Matrix gram = b.transpose() * b;
    return b * gram.ldlt().solve(b.transpose());
}

}  // namespace detail

/// r^2 = tr(P_a P_b) / d with P = B (B^T B)^{-1} B^T.
inline double trace_correlation(const Matrix& b_true, const Matrix& b_hat) {
    if (b_true.rows() != b_hat.rows() || b_true.cols() != b_hat.cols())
        throw DimensionError("trace_correlation: shapes differ");
    if (b_true.cols() == 0) throw ValidationError("trace_correlation: empty basis");
    const Matrix pa = detail::column_projection(b_true);
    const Matrix pb = detail::column_projection(b_hat);
    const double r2 = (pa.cwiseProduct(pb.transpose())).sum() / static_cast<double>(b_true.cols());
    return std::clamp(r2, 0.0, 1.0);
}

namespace detail {

inline Matrix double_centered_distances(const Matrix& z) {
    const Index n = z.rows();
    Matrix a(n, n);
    for (Index i = 0; i < n; ++i) {
        a(i, i) = 0.0;
        for (Index j = i + 1; j < n; ++j) {
            const double v = (z.row(i) - z.row(j)).norm();
            a(i, j) = v;
            a(j, i) = v;
        }
    }
    const Vector row_means = a.rowwise().mean();
    const double grand = row_means.mean();
    a.colwise() -= row_means;
    a.rowwise() -= row_means.transpose();
    a.array() += grand;
    return a;
}

}  // namespace detail

/// Squared distance correlation (V-statistic form). Rounding residue
/// down to -1e-12 is clamped to zero; anything more negative is an error.
inline double distance_correlation_sq(const Matrix& u, const Matrix& v) {
    if (u.rows() != v.rows()) throw DimensionError("distance_correlation_sq: row counts differ");
    if (u.rows() < 2) throw ValidationError("distance_correlation_sq: need at least 2 observations");
    require_finite(u, "dcor input");
    require_finite(v, "dcor input");
    const Matrix a = detail::double_centered_distances(u);
    const Matrix b = detail::double_centered_distances(v);
    const double n2 = static_cast<double>(u.rows()) * static_cast<double>(u.rows());
    const double dcov = a.cwiseProduct(b).sum() / n2;
    const double va = a.squaredNorm() / n2;
    const double vb = b.squaredNorm() / n2;
    if (!(va > 0.0) || !(vb > 0.0))
        throw ValidationError("distance_correlation_sq: an input has zero distance variance");
    double r = dcov / std::sqrt(va * vb);
    if (r < 0.0) {
        if (r < -1e-12) throw NumericalError("distance_correlation_sq: negative value " + std::to_string(r));
        r = 0.0;
    }
    return std::min(r, 1.0);
}

}  // namespace fsdr
