#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fsdr/error.hpp"
#include "fsdr/parallel.hpp"
#include "fsdr/rng.hpp"
#include "fsdr/types.hpp"
#include "fsdr/wire.hpp"

namespace fsdr {

/// Ladle estimate of the structural dimension, with its curves indexed
/// by k = 0..r_p.
struct LadleResult {
    int d_hat = 0;
    std::vector<double> f_n;
    std::vector<double> g_n;
    std::vector<double> objective;
    int r_p = 0;
    int n_boot = 0;
    std::uint64_t seed = 0;
    int skipped = 0;   // bootstrap replicates abandoned after all retries
    int retried = 0;   // extra substreams drawn because of degenerate covariance
};

/// Search bound: p-1 when p <= 10, else floor(p / log p). The logarithm
/// is natural unless another base is given.
inline int ladle_rp(int p, double log_base = std::numbers::e) {
    if (p < 2) throw ParameterError("ladle_rp: p must be >= 2");
    if (p <= 10) return p - 1;
    const double ratio = static_cast<double>(p) * std::log(log_base) / std::log(static_cast<double>(p));
    return static_cast<int>(std::floor(ratio));
}

struct LadleOptions {
    int n_boot = 0;  // 0 means n
    std::uint64_t seed = 1;
    double log_base = std::numbers::e;
    unsigned threads = 1;
    int max_retries = 10;
};

namespace detail {

inline double ladle_det_abs(const Matrix& b, const Matrix& b_star) {
    const Matrix prod = b.transpose() * b_star;
    return std::abs(Eigen::PartialPivLU<Matrix>(prod).determinant());
}

}  // namespace detail

/// Bootstrap ladle estimator applied to M_hat = Sigma^+ Lambda.
///
/// Replicate b draws n row indices from substream (seed, b, attempt);
/// the resampled distance matrix is read off D by index pairs. A replicate
/// whose resampled covariance is rank deficient is redrawn on the next
/// attempt, at most max_retries times, and otherwise skipped. "Rank
/// deficient" is measured against the full-sample covariance rank so
/// predictors that are constant in the data do not reject every draw.
inline LadleResult ladle_estimate(const Matrix& x, const DistanceMatrix& d, const LadleOptions& opt = {}) {
    validate_predictors(x);
    const Index n = x.rows();
    const int p = static_cast<int>(x.cols());
    if (d.n() != n)
        throw DimensionError("ladle_estimate: distance matrix has " + std::to_string(d.n()) +
                             " rows, predictors have " + std::to_string(n));
    const int n_boot = opt.n_boot == 0 ? static_cast<int>(n) : opt.n_boot;
    if (n_boot < 1) throw ParameterError("ladle_estimate: n_boot must be >= 1");

    LadleResult res;
    res.r_p = std::min(ladle_rp(p, opt.log_base), p - 1);
    res.n_boot = n_boot;
    res.seed = opt.seed;
    const int rp = res.r_p;

    const auto full_core = detail::wire_core(x, d.values());
    const auto full = detail::left_singular(full_core.m_hat);

    // Per-replicate 1 - |det(B_k^T B*_k)| for k = 1..rp.
    std::vector<std::vector<double>> per_rep(static_cast<std::size_t>(n_boot));
    std::vector<int> attempts_used(static_cast<std::size_t>(n_boot), 0);

    parallel_for(static_cast<std::size_t>(n_boot), opt.threads, [&](std::size_t b) {
        std::vector<Index> idx(static_cast<std::size_t>(n));
        Matrix xb(n, p);
        Matrix db(n, n);
        for (int attempt = 0; attempt <= opt.max_retries; ++attempt) {
            auto rng = Rng::substream(opt.seed, b + 1, static_cast<std::uint64_t>(attempt));
            for (auto& i : idx) i = static_cast<Index>(rng.index(static_cast<std::uint64_t>(n)));
            for (Index r = 0; r < n; ++r) xb.row(r) = x.row(idx[static_cast<std::size_t>(r)]);
            for (Index c = 0; c < n; ++c)
                for (Index r = 0; r < n; ++r)
                    db(r, c) = d(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
            const auto core = detail::wire_core(xb, db);
            attempts_used[b] = attempt + 1;
            if (core.sigma_rank < full_core.sigma_rank) continue;
            const auto boot = detail::left_singular(core.m_hat);
            std::vector<double> dev(static_cast<std::size_t>(rp));
            for (int k = 1; k <= rp; ++k)
                // |det| <= 1 for orthonormal columns; rounding can push it past 1.
                dev[static_cast<std::size_t>(k - 1)] = std::clamp(
                    1.0 - detail::ladle_det_abs(full.vectors.leftCols(k), boot.vectors.leftCols(k)), 0.0, 1.0);
            per_rep[b] = std::move(dev);
            return;
        }
    });

    std::vector<double> f0(static_cast<std::size_t>(rp + 1), 0.0);
    int used = 0;
    for (std::size_t b = 0; b < per_rep.size(); ++b) {
        res.retried += attempts_used[b] - 1;
        if (per_rep[b].empty()) {
            ++res.skipped;
            continue;
        }
        ++used;
        for (int k = 1; k <= rp; ++k) f0[static_cast<std::size_t>(k)] += per_rep[b][static_cast<std::size_t>(k - 1)];
    }
    if (used == 0) throw NumericalError("ladle_estimate: every bootstrap replicate had a degenerate covariance");
    for (auto& v : f0) v /= used;

    double f_total = 0.0;
    for (double v : f0) f_total += v;
    double g_total = 0.0;
    for (int i = 0; i <= rp; ++i) g_total += full.values(i) * full.values(i);

    res.f_n.resize(static_cast<std::size_t>(rp + 1));
    res.g_n.resize(static_cast<std::size_t>(rp + 1));
    res.objective.resize(static_cast<std::size_t>(rp + 1));
    for (int k = 0; k <= rp; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        res.f_n[ks] = f0[ks] / (1.0 + f_total);
        res.g_n[ks] = full.values(k) * full.values(k) / (1.0 + g_total);
        res.objective[ks] = res.f_n[ks] + res.g_n[ks];
    }
    res.d_hat = 0;
    for (int k = 1; k <= rp; ++k)
        if (res.objective[static_cast<std::size_t>(k)] < res.objective[static_cast<std::size_t>(res.d_hat)]) res.d_hat = k;
    return res;
}

}  // namespace fsdr
