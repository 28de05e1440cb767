#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "fsdr/error.hpp"
#include "fsdr/rng.hpp"
#include "fsdr/types.hpp"

namespace fsdr {

// Simulation designs for Frechet regression with distribution-valued and
// sphere-valued responses.
//
//   Model I   Y is N(mu_Y, sigma_Y^2) as a quantile function; Wasserstein.
//             mu_Y ~ N(exp(b1'X), 0.5^2); sigma_Y = 1 (i) or |b2'X| (ii).
//   Model II  Y on the unit circle around m(X) = (cos f1, sin f1).
//             f1 = b1'X (i) or |(x1, x2)| (ii).
//   Model III Y on the unit sphere in R^3; linear index (i) or spherical
//             angles (f1 + e1)^{1/3}, (f2 + e2)^{1/3} with f1 = x1^2+x2^2,
//             f2 = x_{p-1}^2+x_p^2 (ii).
//   Model IV  Y on the unit sphere in R^4 with a pure-noise fourth axis.

enum class Model { I, II, III, IV };
enum class Case { i, ii };
enum class Scenario { standard, S1, S2, S3, S4 };

/// Where Model III case (ii) applies its cube roots. `angle` takes
/// (f + e)^{1/3} as spherical angles, which puts Y exactly on the sphere;
/// `component` takes signed cube roots of each sine/cosine factor and then
/// renormalizes.
enum class CubeRoot { angle, component };

struct SimDesign {
    Model model = Model::I;
    Case kase = Case::i;
    int n = 100;
    int p = 10;
    Scenario scenario = Scenario::standard;
    std::uint64_t seed = 1;
    double noise_sd = 0.1;              // response noise for Models II-IV
    std::optional<Vector> model2_beta;  // Model II case (i) index; default (1,1,0,...,0)
    CubeRoot model3_cuberoot = CubeRoot::angle;

    void validate() const {
        if (p < 4) throw ParameterError("simulation designs need p >= 4");
        if (n < 2) throw ParameterError("simulation designs need n >= 2");
        if (!(noise_sd >= 0.0)) throw ParameterError("noise sd must be nonnegative");
        if (model2_beta && model2_beta->size() != p) throw ParameterError("Model II beta must have length p");
    }
};

struct SimSample {
    Matrix x;
    ResponseSet y;
    Matrix truth_basis;       // p x d_true, spans the central subspace
    Matrix truth_predictors;  // n x k, true sufficient predictors (X*basis for linear designs)
    int d_true = 0;           // structural dimension of the central subspace
    bool nonlinear = false;   // truth_predictors are nonlinear functions of X
};

inline std::string to_string(Model m) {
    switch (m) {
        case Model::I: return "I";
        case Model::II: return "II";
        case Model::III: return "III";
        case Model::IV: return "IV";
    }
    return "?";
}

inline std::string to_string(Case c) { return c == Case::i ? "i" : "ii"; }

inline std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::standard: return "default";
        case Scenario::S1: return "S1";
        case Scenario::S2: return "S2";
        case Scenario::S3: return "S3";
        case Scenario::S4: return "S4";
    }
    return "?";
}

namespace detail {

inline Vector pair_vector(int p, bool leading, double value) {
    Vector b = Vector::Zero(p);
    if (leading) {
        b(0) = value;
        b(1) = value;
    } else {
        b(p - 2) = value;
        b(p - 1) = value;
    }
    return b;
}

inline Matrix coordinate_basis(int p, std::initializer_list<int> coords) {
    Matrix b = Matrix::Zero(p, static_cast<Index>(coords.size()));
    Index c = 0;
    for (int k : coords) b(k, c++) = 1.0;
    return b;
}

/// True when the design's default predictor law is N(0, I).
inline bool gaussian_default(const SimDesign& d) { return d.model != Model::I && d.kase == Case::ii; }

}  // namespace detail

/// Draws the n x p predictor matrix. Under the default scenario Models
/// I and every case (i) use U[0,1]^p; the case (ii) designs of II-IV use
/// N(0, I_p). S1: N(a, I); S2: N(a, S) with S_ij = 0.2^|i-j|, a ~ U[0,1]^p
/// drawn once; S3: iid Poisson(1); S4: iid Exp(1).
inline Matrix gen_predictors(const SimDesign& design, Rng& rng) {
    design.validate();
    const int n = design.n;
    const int p = design.p;
    Matrix x(n, p);
    switch (design.scenario) {
        case Scenario::standard:
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < p; ++j) x(i, j) = detail::gaussian_default(design) ? rng.normal() : rng.uniform();
            break;
        case Scenario::S1:
        case Scenario::S2: {
            Vector shift(p);
            for (int j = 0; j < p; ++j) shift(j) = rng.uniform();
            Matrix chol = Matrix::Identity(p, p);
            if (design.scenario == Scenario::S2) {
                Matrix cov(p, p);
                for (int a = 0; a < p; ++a)
                    for (int b = 0; b < p; ++b) cov(a, b) = std::pow(0.2, std::abs(a - b));
                chol = cov.llt().matrixL();
            }
            Vector z(p);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < p; ++j) z(j) = rng.normal();
                x.row(i) = (shift + chol * z).transpose();
            }
            break;
        }
        case Scenario::S3:
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < p; ++j) x(i, j) = rng.poisson(1.0);
            break;
        case Scenario::S4:
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < p; ++j) x(i, j) = rng.exponential(1.0);
            break;
    }
    return x;
}

/// Draws responses for the given predictors and attaches the ground truth.
inline SimSample gen_response(const SimDesign& design, const Matrix& x, Rng& rng) {
    design.validate();
    const int p = design.p;
    const Index n = x.rows();
    if (x.cols() != p) throw DimensionError("gen_response: predictor columns differ from design p");
    const double sd = design.noise_sd;

    SimSample s;
    s.x = x;
    switch (design.model) {
        case Model::I: {
            const Vector b1 = detail::pair_vector(p, true, 1.0);
            const Vector b2 = detail::pair_vector(p, false, 1.0);
            Vector mu(n), sigma(n);
            for (Index i = 0; i < n; ++i) {
                mu(i) = rng.normal(std::exp(x.row(i).dot(b1)), 0.5);
                sigma(i) = design.kase == Case::i ? 1.0 : std::abs(x.row(i).dot(b2));
            }
            s.y = QuantileDistributions(std::move(mu), std::move(sigma));
            if (design.kase == Case::i) {
                s.truth_basis = b1;
            } else {
                s.truth_basis.resize(p, 2);
                s.truth_basis << b1, b2;
            }
            break;
        }
        case Model::II: {
            Matrix y(n, 2);
            Vector f(n);
            const Vector b1 = design.model2_beta.value_or(detail::pair_vector(p, true, 1.0));
            for (Index i = 0; i < n; ++i) {
                f(i) = design.kase == Case::i ? x.row(i).dot(b1) : std::hypot(x(i, 0), x(i, 1));
                const double e = rng.normal(0.0, sd);
                // cos(e) m + sin(e) t with t the unit tangent at m.
                y(i, 0) = std::cos(e) * std::cos(f(i)) - std::sin(e) * std::sin(f(i));
                y(i, 1) = std::cos(e) * std::sin(f(i)) + std::sin(e) * std::cos(f(i));
            }
            s.y = SpherePoints(std::move(y));
            if (design.kase == Case::i) {
                s.truth_basis = b1;
            } else {
                s.truth_basis = detail::coordinate_basis(p, {0, 1});
                s.truth_predictors = f;
                s.nonlinear = true;
            }
            break;
        }
        case Model::III: {
            Matrix y(n, 3);
            Matrix f(n, 2);
            const Vector b1 = detail::pair_vector(p, true, 0.5);
            const Vector b2 = detail::pair_vector(p, false, 0.5);
            for (Index i = 0; i < n; ++i) {
                const double e1 = rng.normal(0.0, sd);
                const double e2 = rng.normal(0.0, sd);
                if (design.kase == Case::i) {
                    const double a = x.row(i).dot(b1) + e1;
                    const double b = x.row(i).dot(b2) + e2;
                    y.row(i) << std::sin(a) * std::sin(b), std::sin(a) * std::cos(b), std::cos(a);
                } else {
                    f(i, 0) = x(i, 0) * x(i, 0) + x(i, 1) * x(i, 1);
                    f(i, 1) = x(i, p - 2) * x(i, p - 2) + x(i, p - 1) * x(i, p - 1);
                    const double a = f(i, 0) + e1;
                    const double b = f(i, 1) + e2;
                    Eigen::RowVector3d v;
                    if (design.model3_cuberoot == CubeRoot::angle) {
                        const double ta = std::cbrt(a);
                        const double tb = std::cbrt(b);
                        v << std::sin(ta) * std::sin(tb), std::sin(ta) * std::cos(tb), std::cos(ta);
                    } else {
                        v << std::cbrt(std::sin(a)) * std::cbrt(std::sin(b)),
                            std::cbrt(std::sin(a)) * std::cbrt(std::cos(b)), std::cbrt(std::cos(a));
                    }
                    y.row(i) = v / v.norm();
                }
                if (design.kase == Case::i) y.row(i) /= y.row(i).norm();
            }
            s.y = SpherePoints(std::move(y));
            if (design.kase == Case::i) {
                s.truth_basis.resize(p, 2);
                s.truth_basis << b1, b2;
            } else {
                s.truth_basis = detail::coordinate_basis(p, {0, 1, p - 2, p - 1});
                s.truth_predictors = f;
                s.nonlinear = true;
            }
            break;
        }
        case Model::IV: {
            Matrix y(n, 4);
            Matrix f(n, 2);
            const Vector b1 = detail::pair_vector(p, true, 0.5);
            const Vector b2 = detail::pair_vector(p, false, 0.5);
            for (Index i = 0; i < n; ++i) {
                if (design.kase == Case::i) {
                    f(i, 0) = x.row(i).dot(b1);
                    f(i, 1) = x.row(i).dot(b2);
                } else {
                    f(i, 0) = 0.5 * std::hypot(x(i, 0), x(i, 1));
                    f(i, 1) = 0.5 * std::hypot(x(i, p - 2), x(i, p - 1));
                }
                const double e = rng.normal(0.0, sd);
                const double c = std::cos(e);
                y.row(i) << c * std::sin(f(i, 0)) * std::sin(f(i, 1)), c * std::sin(f(i, 0)) * std::cos(f(i, 1)),
                    c * std::cos(f(i, 0)), std::sin(e);
                y.row(i) /= y.row(i).norm();
            }
            s.y = SpherePoints(std::move(y));
            if (design.kase == Case::i) {
                s.truth_basis.resize(p, 2);
                s.truth_basis << b1, b2;
            } else {
                s.truth_basis = detail::coordinate_basis(p, {0, 1, p - 2, p - 1});
                s.truth_predictors = f;
                s.nonlinear = true;
            }
            break;
        }
    }
    s.d_true = static_cast<int>(s.truth_basis.cols());
    if (!s.nonlinear) s.truth_predictors = x * s.truth_basis;
    return s;
}

/// Sample for replicate r, drawn from substream (seed, r).
inline SimSample generate(const SimDesign& design, std::uint64_t replicate = 0) {
    auto rng = Rng::substream(design.seed, replicate);
    const Matrix x = gen_predictors(design, rng);
    return gen_response(design, x, rng);
}

}  // namespace fsdr
