#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "fsdr/error.hpp"

namespace fsdr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Symmetric, zero-diagonal, nonnegative matrix of pairwise response
/// distances. Construction enforces the invariants exactly.
class DistanceMatrix {
public:
    DistanceMatrix() = default;

    explicit DistanceMatrix(Matrix values) : values_(std::move(values)) {
        if (values_.rows() != values_.cols())
            throw DimensionError("distance matrix must be square, got " + std::to_string(values_.rows()) + "x" +
                                 std::to_string(values_.cols()));
        const Index n = values_.rows();
        for (Index i = 0; i < n; ++i) {
            if (values_(i, i) != 0.0)
                throw ValidationError("distance matrix diagonal entry " + std::to_string(i) + " is not zero");
            for (Index j = i + 1; j < n; ++j) {
                const double v = values_(i, j);
                if (!std::isfinite(v) || v < 0.0)
                    throw ValidationError("distance matrix entry (" + std::to_string(i) + "," + std::to_string(j) +
                                          ") is negative or non-finite");
                if (v != values_(j, i))
                    throw ValidationError("distance matrix is not symmetric at (" + std::to_string(i) + "," +
                                          std::to_string(j) + ")");
            }
        }
    }

    /// Accepts a matrix that satisfies the invariants up to `tol`, then
    /// repairs it exactly: (D + D^T)/2 with a zeroed diagonal.
    static DistanceMatrix from_approximate(const Matrix& raw, double tol = 1e-9) {
        if (raw.rows() != raw.cols())
            throw DimensionError("distance matrix must be square, got " + std::to_string(raw.rows()) + "x" +
                                 std::to_string(raw.cols()));
        const Index n = raw.rows();
        Matrix fixed(n, n);
        for (Index i = 0; i < n; ++i) {
            if (!std::isfinite(raw(i, i)) || std::abs(raw(i, i)) > tol)
                throw ValidationError("diagonal entry " + std::to_string(i) + " differs from zero by more than tolerance");
            fixed(i, i) = 0.0;
            for (Index j = i + 1; j < n; ++j) {
                const double a = raw(i, j);
                const double b = raw(j, i);
                if (!std::isfinite(a) || !std::isfinite(b))
                    throw ValidationError("non-finite distance at (" + std::to_string(i) + "," + std::to_string(j) + ")");
                if (std::abs(a - b) > tol)
                    throw ValidationError("asymmetric distance at (" + std::to_string(i) + "," + std::to_string(j) + ")");
                if (a < -tol || b < -tol)
                    throw ValidationError("negative distance at (" + std::to_string(i) + "," + std::to_string(j) + ")");
                const double v = std::max(0.0, 0.5 * (a + b));
                fixed(i, j) = v;
                fixed(j, i) = v;
            }
        }
        return DistanceMatrix(std::move(fixed));
    }

    [[nodiscard]] Index n() const noexcept { return values_.rows(); }
    [[nodiscard]] const Matrix& values() const noexcept { return values_; }
    [[nodiscard]] double operator()(Index i, Index j) const { return values_(i, j); }

private:
    Matrix values_;
};

/// Rows are observations in R^q.
struct EuclideanVectors {
    Matrix rows;
};

/// Rows are points on the unit sphere in R^q.
struct SpherePoints {
    Matrix rows;

    static constexpr double norm_tolerance = 1e-9;

    explicit SpherePoints(Matrix r) : rows(std::move(r)) {
        for (Index i = 0; i < rows.rows(); ++i) {
            if (std::abs(rows.row(i).norm() - 1.0) > norm_tolerance)
                throw DomainError("sphere point " + std::to_string(i) + " does not have unit norm");
        }
    }
};

/// Location-scale distributions sharing the standard normal quantile
/// base: Q(tau) = mu + sigma * Phi^{-1}(tau).
struct QuantileDistributions {
    Vector mu;
    Vector sigma;

    QuantileDistributions(Vector m, Vector s) : mu(std::move(m)), sigma(std::move(s)) {
        if (mu.size() != sigma.size())
            throw DimensionError("mu and sigma lengths differ");
        for (Index i = 0; i < sigma.size(); ++i) {
            if (!(sigma(i) >= 0.0))
                throw DomainError("sigma " + std::to_string(i) + " is negative");
        }
    }
};

using ResponseSet = std::variant<EuclideanVectors, SpherePoints, QuantileDistributions>;

inline Index response_count(const ResponseSet& ys) {
    return std::visit(
        [](const auto& r) -> Index {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, QuantileDistributions>)
                return r.mu.size();
            else
                return r.rows.rows();
        },
        ys);
}

enum class MetricKind { euclidean, geodesic_sphere, wasserstein, precomputed, isomap, lle };

struct MetricSpec {
    MetricKind kind = MetricKind::euclidean;
    int k = 10;         // isomap, lle
    int m = 5;          // lle embedding dimension
    double reg = 1e-3;  // lle regularizer

    static MetricSpec euclidean() { return {MetricKind::euclidean}; }
    static MetricSpec geodesic_sphere() { return {MetricKind::geodesic_sphere}; }
    static MetricSpec wasserstein() { return {MetricKind::wasserstein}; }
    static MetricSpec precomputed() { return {MetricKind::precomputed}; }
    static MetricSpec isomap(int k = 10) { return {MetricKind::isomap, k}; }
    static MetricSpec lle(int k = 10, int m = 5, double reg = 1e-3) { return {MetricKind::lle, k, m, reg}; }

    void validate() const {
        if (k < 1) throw ParameterError("neighbor count k must be >= 1");
        if (m < 1) throw ParameterError("embedding dimension m must be >= 1");
        if (!(reg > 0.0)) throw ParameterError("regularizer must be > 0");
    }
};

inline void require_finite(const Matrix& x, const char* what) {
    if (!x.allFinite()) throw ValidationError(std::string(what) + " contains non-finite entries");
}

}  // namespace fsdr
