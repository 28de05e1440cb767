#pragma once

#include <cstdint>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "fsdr/error.hpp"
#include "fsdr/evalmetrics.hpp"
#include "fsdr/kwire.hpp"
#include "fsdr/ladle.hpp"
#include "fsdr/metrics.hpp"
#include "fsdr/parallel.hpp"
#include "fsdr/rng.hpp"
#include "fsdr/simgen.hpp"
#include "fsdr/wire.hpp"

namespace fsdr {

enum class Method { wire, kwire, ladle };

inline std::string to_string(Method m) {
    switch (m) {
        case Method::wire: return "wire";
        case Method::kwire: return "kwire";
        case Method::ladle: return "ladle";
    }
    return "?";
}

struct MethodParams {
    double epsilon_n = 1e-3;
    double sigma_kappa = 0.1;
    int n_boot = 0;  // ladle; 0 means n
    double log_base = std::numbers::e;
    unsigned threads = 1;
};

struct ReplicateOutcome {
    int replicate = 0;
    double r2 = 0.0;    // trace correlation (wire)
    double rho2 = 0.0;  // squared distance correlation (wire, kwire)
    int d_hat = -1;     // ladle
    bool correct = false;
};

struct ExperimentSummary {
    SimDesign design;
    Method method = Method::wire;
    std::vector<ReplicateOutcome> replicates;
    double mean_r2 = 0.0;
    double mean_rho2 = 0.0;
    int correct_count = 0;
};

/// Distance matrix the design's response space calls for.
inline DistanceMatrix design_distances(const SimSample& s) {
    if (std::holds_alternative<QuantileDistributions>(s.y))
        return pairwise_distance_matrix(s.y, MetricSpec::wasserstein());
    return pairwise_distance_matrix(s.y, MetricSpec::geodesic_sphere());
}

/// One replicate of a simulation study.
inline ReplicateOutcome run_replicate(const SimDesign& design, Method method, int replicate,
                                      const MethodParams& params) {
    ReplicateOutcome out;
    out.replicate = replicate;
    try {
        const auto sample = generate(design, static_cast<std::uint64_t>(replicate));
        const auto dist = design_distances(sample);
        switch (method) {
            case Method::wire: {
                const auto fit = wire_fit(sample.x, dist, sample.d_true);
                out.r2 = fit.d == sample.d_true ? trace_correlation(sample.truth_basis, fit.basis) : 0.0;
                const Matrix truth = sample.x * sample.truth_basis;
                out.rho2 = fit.d > 0 ? distance_correlation_sq(truth, sufficient_predictors(sample.x, fit)) : 0.0;
                break;
            }
            case Method::kwire: {
                const int dim = static_cast<int>(sample.truth_predictors.cols());
                const auto fit = kwire_fit(sample.x, dist, dim, params.epsilon_n, KernelSpec{params.sigma_kappa});
                out.rho2 = distance_correlation_sq(sample.truth_predictors, kwire_insample(fit));
                break;
            }
            case Method::ladle: {
                LadleOptions opt;
                opt.n_boot = params.n_boot;
                opt.seed = splitmix64(design.seed ^ (0xA5A5A5A5ull + static_cast<std::uint64_t>(replicate)));
                opt.log_base = params.log_base;
                opt.threads = 1;
                const auto res = ladle_estimate(sample.x, dist, opt);
                out.d_hat = res.d_hat;
                out.correct = res.d_hat == sample.d_true;
                break;
            }
        }
    } catch (const Error& e) {
        throw Error(e.kind(), std::string(e.what()) + " (replicate " + std::to_string(replicate) + ")");
    }
    return out;
}

/// Runs `reps` replicates; replicate r uses substream (seed, r), so the
/// summary does not depend on the thread count.
inline ExperimentSummary run_experiment(const SimDesign& design, Method method, int reps,
                                        const MethodParams& params = {}) {
    if (reps < 1) throw ParameterError("run_experiment: reps must be >= 1");
    design.validate();
    ExperimentSummary summary;
    summary.design = design;
    summary.method = method;
    summary.replicates.resize(static_cast<std::size_t>(reps));
    parallel_for(static_cast<std::size_t>(reps), params.threads, [&](std::size_t r) {
        summary.replicates[r] = run_replicate(design, method, static_cast<int>(r), params);
    });
    for (const auto& o : summary.replicates) {
        summary.mean_r2 += o.r2;
        summary.mean_rho2 += o.rho2;
        summary.correct_count += o.correct ? 1 : 0;
    }
    summary.mean_r2 /= reps;
    summary.mean_rho2 /= reps;
    return summary;
}

}  // namespace fsdr
