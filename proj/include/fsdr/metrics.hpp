#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fsdr/error.hpp"
#include "fsdr/types.hpp"

namespace fsdr {

// ---------------------------------------------------------------------------
// Scalar metrics
// ---------------------------------------------------------------------------

template <class A, class B>
double euclidean_distance(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    if (a.size() != b.size())
        throw DimensionError("euclidean_distance: lengths " + std::to_string(a.size()) + " and " +
                             std::to_string(b.size()) + " differ");
    double s = 0.0;
    for (Index i = 0; i < a.size(); ++i) {
        const double d = a.derived().coeff(i) - b.derived().coeff(i);
        s += d * d;
    }
    return std::sqrt(s);
}

/// Great-circle distance arccos(a.b). The inner product is clamped to
/// [-1, 1] so rounding never produces NaN.
template <class A, class B>
double geodesic_sphere_distance(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    constexpr double unit_tol = 1e-6;
    if (a.size() != b.size())
        throw DimensionError("geodesic_sphere_distance: lengths differ");
    if (std::abs(a.norm() - 1.0) > unit_tol || std::abs(b.norm() - 1.0) > unit_tol)
        throw DomainError("geodesic_sphere_distance: inputs must have unit norm");
    double dot = 0.0;
    for (Index i = 0; i < a.size(); ++i) dot += a.derived().coeff(i) * b.derived().coeff(i);
    return std::acos(std::clamp(dot, -1.0, 1.0));
}

/// A location-scale distribution on the standard normal quantile base.
struct LocationScale {
    double mu = 0.0;
    double sigma = 1.0;
};

/// 2-Wasserstein distance between two location-scale laws that share a
/// quantile base: the L2 distance of their quantile functions.
inline double wasserstein_location_scale(LocationScale p, LocationScale q) {
    if (!(p.sigma >= 0.0) || !(q.sigma >= 0.0))
        throw DomainError("wasserstein_location_scale: sigma must be nonnegative");
    return std::hypot(p.mu - q.mu, p.sigma - q.sigma);
}

/// 2-Wasserstein distance from quantiles sampled at tau_i = (i - 0.5)/m.
inline double wasserstein_quantile_grid(std::span<const double> qp, std::span<const double> qq) {
    if (qp.size() != qq.size())
        throw ValidationError("wasserstein_quantile_grid: grid lengths differ");
    if (qp.size() < 2)
        throw ValidationError("wasserstein_quantile_grid: need at least two grid points");
    for (std::size_t i = 1; i < qp.size(); ++i) {
        if (qp[i] < qp[i - 1] || qq[i] < qq[i - 1])
            throw ValidationError("wasserstein_quantile_grid: quantile sequence decreases at index " +
                                  std::to_string(i));
    }
    double s = 0.0;
    for (std::size_t i = 0; i < qp.size(); ++i) {
        const double d = qp[i] - qq[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(qp.size()));
}

// ---------------------------------------------------------------------------
// Pairwise matrices
// ---------------------------------------------------------------------------

namespace detail {

/// Fills the strict upper triangle with f(i, j) and mirrors it.
template <class F>
DistanceMatrix upper_triangle_fill(Index n, F&& f) {
    Matrix d = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            const double v = f(i, j);
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    return DistanceMatrix(std::move(d));
}

inline Matrix squared_euclidean(const Matrix& y) {
    const Vector sq = y.rowwise().squaredNorm();
    Matrix g = -2.0 * y * y.transpose();
    g.colwise() += sq;
    g.rowwise() += sq.transpose();
    return g.cwiseMax(0.0);
}

/// The k nearest other rows of each row, by (distance, index).
inline std::vector<std::vector<Index>> nearest_neighbors(const Matrix& y, int k) {
    const Index n = y.rows();
    std::vector<std::vector<Index>> out(static_cast<std::size_t>(n));
    std::vector<std::pair<double, Index>> cand;
    cand.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        cand.clear();
        for (Index j = 0; j < n; ++j) {
            if (j != i) cand.emplace_back((y.row(i) - y.row(j)).squaredNorm(), j);
        }
        std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
        auto& nb = out[static_cast<std::size_t>(i)];
        for (int t = 0; t < k; ++t) nb.push_back(cand[static_cast<std::size_t>(t)].second);
    }
    return out;
}

using Adjacency = std::vector<std::vector<std::pair<Index, double>>>;

inline std::vector<double> dijkstra(const Adjacency& adj, Index source) {
    const auto n = adj.size();
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, Index>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[static_cast<std::size_t>(source)] = 0.0;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
        auto [du, u] = heap.top();
        heap.pop();
        if (du > dist[static_cast<std::size_t>(u)]) continue;
        for (const auto& [v, w] : adj[static_cast<std::size_t>(u)]) {
            const double nd = du + w;
            if (nd < dist[static_cast<std::size_t>(v)]) {
                dist[static_cast<std::size_t>(v)] = nd;
                heap.emplace(nd, v);
            }
        }
    }
    return dist;
}

inline std::vector<Index> component_labels(const Adjacency& adj) {
    const auto n = adj.size();
    std::vector<Index> label(n, -1);
    Index next = 0;
    std::vector<Index> stack;
    for (std::size_t s = 0; s < n; ++s) {
        if (label[s] >= 0) continue;
        label[s] = next;
        stack.push_back(static_cast<Index>(s));
        while (!stack.empty()) {
            const Index u = stack.back();
            stack.pop_back();
            for (const auto& [v, w] : adj[static_cast<std::size_t>(u)]) {
                if (label[static_cast<std::size_t>(v)] < 0) {
                    label[static_cast<std::size_t>(v)] = next;
                    stack.push_back(v);
                }
            }
        }
        ++next;
    }
    return label;
}

}  // namespace detail

/// Geodesic distances on the symmetric k-nearest-neighbor graph of the
/// rows of y. A disconnected graph is joined by repeatedly adding the
/// shortest Euclidean edge between two different components.
inline DistanceMatrix isomap_distances(const Matrix& y, int k) {
    const Index n = y.rows();
    if (k < 1) throw ParameterError("isomap: k must be >= 1");
    if (k >= n) throw ParameterError("isomap: k (" + std::to_string(k) + ") must be smaller than n (" +
                                     std::to_string(n) + ")");
    require_finite(y, "isomap input");

    const Matrix eu = detail::squared_euclidean(y).cwiseSqrt();
    const auto nb = detail::nearest_neighbors(y, k);

    Matrix edge = Matrix::Constant(n, n, -1.0);
    for (Index i = 0; i < n; ++i) {
        for (Index j : nb[static_cast<std::size_t>(i)]) {
            const double w = euclidean_distance(y.row(i), y.row(j));
            edge(i, j) = w;
            edge(j, i) = w;
        }
    }
    auto build = [&] {
        detail::Adjacency adj(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
                if (edge(i, j) >= 0.0) adj[static_cast<std::size_t>(i)].emplace_back(j, edge(i, j));
        return adj;
    };

    auto adj = build();
    for (;;) {
        const auto label = detail::component_labels(adj);
        if (*std::max_element(label.begin(), label.end()) == 0) break;
        double best = std::numeric_limits<double>::infinity();
        Index bi = -1, bj = -1;
        for (Index i = 0; i < n; ++i) {
            for (Index j = i + 1; j < n; ++j) {
                if (label[static_cast<std::size_t>(i)] != label[static_cast<std::size_t>(j)] && eu(i, j) < best) {
                    best = eu(i, j);
                    bi = i;
                    bj = j;
                }
            }
        }
        const double w = euclidean_distance(y.row(bi), y.row(bj));
        edge(bi, bj) = w;
        edge(bj, bi) = w;
        adj = build();
    }

    Matrix geo(n, n);
    for (Index s = 0; s < n; ++s) {
        const auto dist = detail::dijkstra(adj, s);
        for (Index t = 0; t < n; ++t) geo(s, t) = dist[static_cast<std::size_t>(t)];
    }
    // Dijkstra from either endpoint may differ in the last bit; keep the
    // upper triangle so the result is exactly symmetric.
    return detail::upper_triangle_fill(n, [&](Index i, Index j) { return geo(i, j); });
}

/// Locally-linear reconstruction weights: row i holds the weights of its
/// k nearest neighbors, summing to one.
inline Matrix lle_weights(const Matrix& y, int k, double reg) {
    const Index n = y.rows();
    if (k < 1 || k >= n) throw ParameterError("lle: k must satisfy 1 <= k < n");
    if (!(reg > 0.0)) throw ParameterError("lle: regularizer must be > 0");
    require_finite(y, "lle input");

    const auto nb = detail::nearest_neighbors(y, k);
    Matrix w = Matrix::Zero(n, n);
    Matrix z(k, y.cols());
    for (Index i = 0; i < n; ++i) {
        const auto& idx = nb[static_cast<std::size_t>(i)];
        for (int t = 0; t < k; ++t) z.row(t) = y.row(idx[static_cast<std::size_t>(t)]) - y.row(i);
        Matrix c = z * z.transpose();
        const double tr = c.trace();
        // Neighbors that coincide with the point leave nothing to regularize.
        if (!(tr > 0.0)) throw NumericalError("lle: degenerate local Gram matrix at point " + std::to_string(i));
        c.diagonal().array() += reg * tr;
        Eigen::LDLT<Matrix> ldlt(c);
        Vector sol = ldlt.solve(Vector::Ones(k));
        const double total = sol.sum();
        if (ldlt.info() != Eigen::Success || !sol.allFinite() || std::abs(total) < 1e-300)
            throw NumericalError("lle: degenerate local Gram matrix at point " + std::to_string(i));
        sol /= total;
        for (int t = 0; t < k; ++t) w(i, idx[static_cast<std::size_t>(t)]) = sol(t);
    }
    return w;
}

/// LLE embedding: eigenvectors of (I-W)^T(I-W) for the m smallest
/// eigenvalues after the constant one, scaled by sqrt(n).
inline Matrix lle_embedding(const Matrix& y, int k, int m, double reg) {
    const Index n = y.rows();
    if (m < 1 || m >= n) throw ParameterError("lle: embedding dimension must satisfy 1 <= m < n");
    const Matrix w = lle_weights(y, k, reg);
    const Matrix iw = Matrix::Identity(n, n) - w;
    const Matrix cost = iw.transpose() * iw;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cost);
    if (eig.info() != Eigen::Success) throw NumericalError("lle: eigensolver failed");
    return eig.eigenvectors().middleCols(1, m) * std::sqrt(static_cast<double>(n));
}

inline DistanceMatrix lle_distances(const Matrix& y, int k, int m, double reg) {
    const Matrix emb = lle_embedding(y, k, m, reg);
    return detail::upper_triangle_fill(emb.rows(),
                                       [&](Index i, Index j) { return euclidean_distance(emb.row(i), emb.row(j)); });
}

/// Distance matrix for a response set under the given metric.
inline DistanceMatrix pairwise_distance_matrix(const ResponseSet& ys, const MetricSpec& spec) {
    spec.validate();
    const auto* eu = std::get_if<EuclideanVectors>(&ys);
    const auto* sp = std::get_if<SpherePoints>(&ys);
    const auto* qd = std::get_if<QuantileDistributions>(&ys);
    const Matrix* rows = eu ? &eu->rows : (sp ? &sp->rows : nullptr);

    switch (spec.kind) {
        case MetricKind::euclidean:
            if (!rows) throw ConfigError("euclidean metric needs vector or sphere responses");
            return detail::upper_triangle_fill(
                rows->rows(), [&](Index i, Index j) { return euclidean_distance(rows->row(i), rows->row(j)); });
        case MetricKind::geodesic_sphere:
            if (!sp) throw ConfigError("geodesic metric needs sphere-point responses");
            return detail::upper_triangle_fill(
                sp->rows.rows(), [&](Index i, Index j) { return geodesic_sphere_distance(sp->rows.row(i), sp->rows.row(j)); });
        case MetricKind::wasserstein:
            if (!qd) throw ConfigError("wasserstein metric needs quantile-distribution responses");
            return detail::upper_triangle_fill(qd->mu.size(), [&](Index i, Index j) {
                return wasserstein_location_scale({qd->mu(i), qd->sigma(i)}, {qd->mu(j), qd->sigma(j)});
            });
        case MetricKind::isomap:
            if (!rows) throw ConfigError("isomap metric needs vector or sphere responses");
            return isomap_distances(*rows, spec.k);
        case MetricKind::lle:
            if (!rows) throw ConfigError("lle metric needs vector or sphere responses");
            return lle_distances(*rows, spec.k, spec.m, spec.reg);
        case MetricKind::precomputed:
            throw ConfigError("precomputed metric takes an external distance matrix, not responses");
    }
    throw ConfigError("unknown metric kind");
}

}  // namespace fsdr
