// Fits the linear and the kernel estimator to two simulated designs and
// reports how well each recovers the truth.

#include <cstdio>

#include "fsdr/fsdr.hpp"

int main() {
    using namespace fsdr;

    // Distribution-valued responses whose mean depends on x1 + x2.
    SimDesign linear;
    linear.model = Model::I;
    linear.n = 400;
    const auto a = generate(linear);
    const auto wass = pairwise_distance_matrix(a.y, MetricSpec::wasserstein());
    const auto fit = wire_fit(a.x, wass, 1);
    std::printf("linear:  basis' = [");
    for (Index j = 0; j < fit.basis.rows(); ++j) std::printf(" %.3f", fit.basis(j, 0));
    std::printf(" ]\n         r^2 against span(1,1,0,...,0) = %.4f\n", trace_correlation(a.truth_basis, fit.basis));

    const auto order = ladle_estimate(a.x, wass, LadleOptions{.n_boot = 100});
    std::printf("         ladle dimension estimate = %d\n", order.d_hat);

    // Circle-valued responses driven by |(x1, x2)|, invisible to any linear projection.
    SimDesign radial;
    radial.model = Model::II;
    radial.kase = Case::ii;
    radial.n = 200;
    const auto b = generate(radial);
    const auto geo = pairwise_distance_matrix(b.y, MetricSpec::geodesic_sphere());
    const auto kfit = kwire_fit(b.x, geo, 1, 1e-3, KernelSpec{0.1});
    std::printf("kernel:  rho^2(f, f_hat) = %.4f\n", distance_correlation_sq(b.truth_predictors, kwire_insample(kfit)));
    return 0;
}
