#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "trgc/structural.hpp"
#include "trgc/time_reversal.hpp"
#include "trgc/var_core.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

using namespace trgc;

namespace {

Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

// The common bivariate VAR(1) that all published parameterizations of the
// worked example map onto.
const Matrix kExpectedA = mat2(0.7, 0.0, -0.12, 0.9);
const Matrix kExpectedSigma = mat2(1.0, 0.6, 0.6, 1.0);

SvarModel svar_one() {
    SvarModel s;
    s.p = 1;
    s.d = 2;
    s.gamma0 = mat2(0, 0, 0.6, 0);
    s.gammas = {mat2(0.7, 0, -0.54, 0.9)};
    s.resid_cov = mat2(1.0, 0, 0, 0.64);
    return s;
}

SvarModel svar_two() {
    SvarModel s;
    s.p = 1;
    s.d = 2;
    s.gamma0 = mat2(0, 0.6, 0, 0);
    s.gammas = {mat2(0.772, -0.54, -0.12, 0.9)};
    s.resid_cov = mat2(0.64, 0, 0, 1.0);
    return s;
}

MixtureModel mixture_one() {
    MixtureModel m;
    m.mixing = mat2(1.0, 0, 0.6, 0.8);
    m.latent.p = 1;
    m.latent.d = 2;
    m.latent.coeffs = {mat2(0.7, 0, 0, 0.9)};
    m.latent.resid_cov = Matrix::Identity(2, 2);
    return m;
}

MixtureModel mixture_two() {
    MixtureModel m;
    const double a = std::sqrt(0.2), b = std::sqrt(0.8);
    m.mixing = mat2(-a, b, a, b);
    m.latent.p = 1;
    m.latent.d = 2;
    m.latent.coeffs = {mat2(0.86, 0.08, 0.08, 0.74)};
    m.latent.resid_cov = Matrix::Identity(2, 2);
    return m;
}

}  // namespace

TEST_CASE("SVAR conversion reproduces the worked example") {
    const VarModel m = svar_to_var(svar_one());
    CHECK((m.coeffs[0] - kExpectedA).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((m.resid_cov - kExpectedSigma).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("the bidirectional-looking SVAR maps to the same VAR") {
    const VarModel m = svar_to_var(svar_two());
    CHECK((m.coeffs[0] - kExpectedA).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((m.resid_cov - kExpectedSigma).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Gamma0 = 0 makes the conversion the identity") {
    SvarModel s = svar_one();
    s.gamma0 = Matrix::Zero(2, 2);
    const VarModel m = svar_to_var(s);
    CHECK((m.coeffs[0] - s.gammas[0]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((m.resid_cov - s.resid_cov).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("SVAR validation rejects a nonzero Gamma0 diagonal") {
    SvarModel s = svar_one();
    s.gamma0(0, 0) = 0.1;
    CHECK_THROWS_AS(svar_to_var(s), Error);
}

TEST_CASE("singular I - Gamma0 is rejected") {
    SvarModel s = svar_one();
    s.gamma0 = mat2(0, 1, 1, 0);
    try {
        svar_to_var(s);
        FAIL("expected singular-matrix");
    } catch (const Error& e) {
        CHECK(e.category() == "singular-matrix");
    }
}

TEST_CASE("mixture conversion reproduces the worked example") {
    const VarModel m = mixture_to_var(mixture_one());
    CHECK((m.coeffs[0] - kExpectedA).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((m.resid_cov - kExpectedSigma).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("M = I makes the conversion the identity") {
    MixtureModel m = mixture_one();
    m.mixing = Matrix::Identity(2, 2);
    const VarModel v = mixture_to_var(m);
    CHECK((v.coeffs[0] - m.latent.coeffs[0]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((v.resid_cov - m.latent.resid_cov).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("similarity preserves the coefficient eigenvalues") {
    const MixtureModel mix = mixture_one();
    const VarModel v = mixture_to_var(mix);
    Eigen::EigenSolver<Matrix> ea(v.coeffs[0], false);
    Eigen::EigenSolver<Matrix> eb(mix.latent.coeffs[0], false);
    auto mods = [](const Eigen::EigenSolver<Matrix>& e) {
        std::vector<double> m{std::abs(e.eigenvalues()(0)), std::abs(e.eigenvalues()(1))};
        std::sort(m.begin(), m.end());
        return m;
    };
    const auto ma = mods(ea), mb = mods(eb);
    CHECK(ma[0] == doctest::Approx(mb[0]).epsilon(1e-12));
    CHECK(ma[1] == doctest::Approx(mb[1]).epsilon(1e-12));
}

TEST_CASE("singular mixing matrix is rejected") {
    MixtureModel m = mixture_one();
    m.mixing = mat2(1, 2, 2, 4);
    try {
        mixture_to_var(m);
        FAIL("expected singular-matrix");
    } catch (const Error& e) {
        CHECK(e.category() == "singular-matrix");
    }
}

TEST_CASE("all published parameterizations agree to 1e-12") {
    std::vector<VarModel> models{svar_to_var(svar_one()), svar_to_var(svar_two()),
                                 mixture_to_var(mixture_one()), mixture_to_var(mixture_two())};
    for (const VarModel& m : models) {
        CHECK((m.coeffs[0] - kExpectedA).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((m.resid_cov - kExpectedSigma).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("diagonal-source mixtures feed the symmetry check") {
    const VarModel observed = mixture_to_var(mixture_one());
    const CrossCovSequence covs = solve_cross_covariances(observed, 4);
    CHECK(mixture_symmetry_check(covs).max_asymmetry < 1e-10);
}
