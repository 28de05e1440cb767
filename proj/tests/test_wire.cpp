#include <cmath>

#include <gtest/gtest.h>

#include "fsdr/evalmetrics.hpp"
#include "fsdr/metrics.hpp"
#include "fsdr/simgen.hpp"
#include "fsdr/wire.hpp"
#include "test_support.hpp"

using namespace fsdr;
using fsdr::testing::random_normal;

namespace {

// Literal double sum over i != j.
Matrix lambda_double_loop(const Matrix& x, const Matrix& d) {
    const Index n = x.rows();
    const Vector mu = x.colwise().mean().transpose();
    Matrix acc = Matrix::Zero(x.cols(), x.cols());
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            if (i != j) acc += (x.row(i).transpose() - mu) * (x.row(j) - mu.transpose()) * d(i, j);
    return -acc / (static_cast<double>(n) * (n - 1));
}

DistanceMatrix euclidean_of(const Matrix& y) { return pairwise_distance_matrix(EuclideanVectors{y}, MetricSpec::euclidean()); }

}  // namespace

TEST(WireLambda, TwoPointHandExample) {
    Matrix x(2, 2);
    x << 1, 0, 0, 1;
    Matrix d(2, 2);
    d << 0, 2, 2, 0;
    const Matrix lam = wire_lambda(x, DistanceMatrix(d));
    Matrix expected(2, 2);
    expected << 0.5, -0.5, -0.5, 0.5;
    EXPECT_TRUE(lam.isApprox(expected, 1e-15)) << lam;
}

TEST(WireLambda, ConstantDistancesGiveScaledCovariance) {
    Rng rng(4);
    const Index n = 30;
    const Matrix x = random_normal(n, 4, rng);
    const double c = 1.7;
    Matrix d = Matrix::Constant(n, n, c);
    d.diagonal().setZero();
    const Matrix lam = wire_lambda(x, DistanceMatrix(d));
    const Matrix centered = x.rowwise() - x.colwise().mean();
    const Matrix sigma = centered.transpose() * centered / static_cast<double>(n);
    EXPECT_LE((lam - c * sigma / (n - 1.0)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(WireLambda, MatchesDoubleLoopOracle) {
    Rng rng(99);
    for (int t = 0; t < 10; ++t) {
        const Matrix x = random_normal(50, 5, rng);
        const auto d = euclidean_of(random_normal(50, 3, rng));
        const Matrix lam = wire_lambda(x, d);
        EXPECT_LE((lam - lambda_double_loop(x, d.values())).cwiseAbs().maxCoeff(), 1e-10);
        EXPECT_TRUE(lam == lam.transpose());
    }
}

TEST(WireLambda, SizeMismatchThrows) {
    EXPECT_THROW(wire_lambda(Matrix::Random(5, 2), DistanceMatrix(Matrix::Zero(4, 4))), DimensionError);
    EXPECT_THROW(wire_lambda(Matrix::Random(1, 2), DistanceMatrix(Matrix::Zero(1, 1))), ValidationError);
}

TEST(WireLambda, PositiveSemidefiniteForNegativeTypeMetrics) {
    Rng rng(31);
    for (int t = 0; t < 30; ++t) {
        const Index n = 20 + static_cast<Index>(rng.index(60));
        const Index p = 2 + static_cast<Index>(rng.index(8));
        const Matrix x = random_normal(n, p, rng);
        std::vector<DistanceMatrix> ds;
        ds.push_back(euclidean_of(random_normal(n, 3, rng)));
        ds.push_back(pairwise_distance_matrix(SpherePoints(fsdr::testing::random_sphere(n, 3, rng)),
                                              MetricSpec::geodesic_sphere()));
        ds.push_back(pairwise_distance_matrix(
            QuantileDistributions(random_normal(n, 1, rng), fsdr::testing::random_uniform(n, 1, rng, 0.1, 3.0)),
            MetricSpec::wasserstein()));
        for (const auto& d : ds) {
            const Matrix lam = wire_lambda(x, d);
            ASSERT_TRUE(lam == lam.transpose());
            const double min_eig = Eigen::SelfAdjointEigenSolver<Matrix>(lam).eigenvalues()(0);
            EXPECT_GE(min_eig, -1e-8 * lam.trace());
        }
    }
}

TEST(WireFit, BasisOrthonormalAndSingularValuesSorted) {
    Rng rng(7);
    const Matrix x = random_normal(80, 6, rng);
    Matrix y(80, 1);
    y.col(0) = x.col(0) + 0.1 * random_normal(80, 1, rng);
    const auto fit = wire_fit(x, euclidean_of(y), 2);
    EXPECT_TRUE((fit.basis.transpose() * fit.basis).isApprox(Matrix::Identity(2, 2), 1e-10));
    for (Index i = 1; i < fit.singular_values.size(); ++i)
        EXPECT_GE(fit.singular_values(i - 1), fit.singular_values(i));
    EXPECT_EQ(fit.singular_values.size(), 6);
    for (Index c = 0; c < fit.basis.cols(); ++c) {
        Index arg;
        fit.basis.col(c).cwiseAbs().maxCoeff(&arg);
        EXPECT_GT(fit.basis(arg, c), 0.0);
    }
    EXPECT_TRUE(fit.Sigma_hat.isApprox(fit.Sigma_hat.transpose(), 1e-14));
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Matrix>(fit.Sigma_hat).eigenvalues()(0), -1e-10);
}

TEST(WireFit, DistanceScalingScalesSingularValues) {
    Rng rng(12);
    const Matrix x = random_normal(60, 5, rng);
    const auto d = euclidean_of(random_normal(60, 2, rng) + x.leftCols(2));
    const auto a = wire_fit(x, d, 2);
    const auto b = wire_fit(x, DistanceMatrix(Matrix(3.5 * d.values())), 2);
    EXPECT_LE((a.basis - b.basis).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((3.5 * a.singular_values - b.singular_values).cwiseAbs().maxCoeff(), 1e-10 * b.singular_values(0));
}

TEST(WireFit, RotationEquivariance) {
    Rng rng(17);
    const Matrix x = random_normal(100, 5, rng);
    const auto d = euclidean_of(x.col(0) + 0.5 * x.col(1));
    const Matrix q = fsdr::testing::random_orthogonal(5, rng);
    const auto base = wire_fit(x, d, 2);
    const auto rot = wire_fit(x * q.transpose(), d, 2);
    EXPECT_NEAR(trace_correlation(q * base.basis, rot.basis), 1.0, 1e-8);
}

TEST(WireFit, TranslationAndScaleInvariance) {
    Rng rng(19);
    const Matrix x = random_normal(70, 4, rng);
    const auto d = euclidean_of(x.col(2).array().square().matrix() + x.col(0));
    const auto base = wire_fit(x, d, 1);
    Matrix shifted = x;
    shifted.rowwise() += Eigen::RowVector4d(3.0, -2.0, 10.0, 0.5);
    const auto t = wire_fit(shifted, d, 1);
    const auto s = wire_fit(4.0 * x, d, 1);
    const double scale = base.M_hat.cwiseAbs().maxCoeff();
    EXPECT_LE((t.M_hat - base.M_hat).cwiseAbs().maxCoeff(), 1e-10 * scale);
    EXPECT_LE((s.M_hat - base.M_hat).cwiseAbs().maxCoeff(), 1e-10 * scale);
    EXPECT_LE((t.basis - base.basis).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((t.singular_values - base.singular_values).cwiseAbs().maxCoeff(), 1e-10 * scale);
}

TEST(WireFit, ZeroDistancesYieldEmptySubspace) {
    Rng rng(2);
    const auto fit = wire_fit(random_normal(10, 3, rng), DistanceMatrix(Matrix::Zero(10, 10)), 1);
    EXPECT_EQ(fit.d, 0);
    EXPECT_EQ(fit.basis.cols(), 0);
    EXPECT_FALSE(fit.warnings.empty());
}

TEST(WireFit, RankDeficientCovarianceWarns) {
    Rng rng(3);
    Matrix x = random_normal(30, 3, rng);
    x.col(2) = x.col(0);
    const auto fit = wire_fit(x, euclidean_of(x.col(1)), 3);
    EXPECT_EQ(fit.sigma_rank, 2);
    EXPECT_FALSE(fit.warnings.empty());
    EXPECT_TRUE(fit.M_hat.allFinite());
}

TEST(WireFit, ParameterErrors) {
    Rng rng(1);
    const Matrix x = random_normal(10, 3, rng);
    const auto d = euclidean_of(x);
    EXPECT_THROW(wire_fit(x, d, 4), ParameterError);
    EXPECT_THROW(wire_fit(x, d, 0), ParameterError);
    EXPECT_THROW(wire_fit(x.topRows(9), d, 1), DimensionError);
}

TEST(WireFit, IndependentResponsesGiveSmallSingularValues) {
    double max_null = 0.0;
    double min_signal = 1e300;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        SimDesign design;
        design.n = 500;
        design.p = 5;
        design.seed = seed;
        const auto signal = generate(design, 0);
        const auto other = generate(design, 1);  // responses from an independent X
        const auto d_signal = pairwise_distance_matrix(signal.y, MetricSpec::wasserstein());
        const auto d_null = pairwise_distance_matrix(other.y, MetricSpec::wasserstein());
        max_null = std::max(max_null, wire_fit(signal.x, d_null, 1).singular_values(0));
        min_signal = std::min(min_signal, wire_fit(signal.x, d_signal, 1).singular_values(0));
    }
    EXPECT_LT(max_null, min_signal);
}

TEST(SufficientPredictors, CoordinateProjection) {
    Rng rng(5);
    const Matrix x = random_normal(12, 4, rng);
    SubspaceEstimate fit;
    fit.basis = Matrix::Identity(4, 2);
    EXPECT_TRUE(sufficient_predictors(x, fit) == x.leftCols(2));
}

TEST(SufficientPredictors, FullOrthonormalBasisIsIsometry) {
    Rng rng(6);
    const Matrix x = random_normal(15, 4, rng);
    SubspaceEstimate fit;
    fit.basis = fsdr::testing::random_orthogonal(4, rng);
    const Matrix z = sufficient_predictors(x, fit);
    for (Index i = 0; i < 15; ++i)
        for (Index j = 0; j < 15; ++j)
            EXPECT_NEAR((z.row(i) - z.row(j)).norm(), (x.row(i) - x.row(j)).norm(), 1e-10);
}

TEST(SufficientPredictors, MatchesRowDotProducts) {
    Rng rng(8);
    const Matrix x = random_normal(20, 5, rng);
    const auto fit = wire_fit(x, euclidean_of(x.col(0)), 2);
    const Matrix z = sufficient_predictors(x, fit);
    for (Index i = 0; i < 20; ++i)
        for (Index l = 0; l < 2; ++l) {
            double s = 0.0;
            for (Index k = 0; k < 5; ++k) s += x(i, k) * fit.basis(k, l);
            EXPECT_NEAR(z(i, l), s, 1e-12);
        }
    EXPECT_THROW(sufficient_predictors(x.leftCols(4), fit), DimensionError);
}
