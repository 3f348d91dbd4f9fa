#include "trgc/time_reversal.hpp"

#include "trgc/var_core.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

namespace trgc {

Matrix PrecisionBlocks::block(int l, int k) const {
    if (l < 1 || l > p || k < 1 || k > p)
        throw Error("invalid-argument", "precision block index out of range");
    return full.block((l - 1) * dim, (k - 1) * dim, dim, dim);
}

namespace {

Matrix inverse_spd_checked(const Matrix& S, const char* what) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(S);
    const double lam_min = es.eigenvalues().minCoeff();
    const double lam_max = es.eigenvalues().maxCoeff();
    const double cond = lam_min > 0.0 ? lam_max / lam_min
                                      : std::numeric_limits<double>::infinity();
    if (lam_min <= 0.0 || cond > kMaxConditionNumber) {
        std::ostringstream msg;
        msg << what << " is singular or ill-conditioned (condition number " << cond << ")";
        throw Error("singular-matrix", msg.str());
    }
    Matrix inv = es.eigenvectors() *
                 es.eigenvalues().cwiseInverse().asDiagonal() *
                 es.eigenvectors().transpose();
    return (inv + inv.transpose()) / 2.0;
}

}  // namespace

PrecisionBlocks precision_blocks(const CrossCovSequence& covs, int p) {
    const Matrix cz0 = covs.stacked_zero(p);
    PrecisionBlocks q;
    q.p = p;
    q.dim = covs.dim;
    q.full = inverse_spd_checked(cz0, "stacked covariance C_Z(0)");
    return q;
}

VarModel reverse_var1(const VarModel& model) {
    model.validate();
    if (model.p != 1) throw Error("invalid-argument", "reverse_var1 requires p == 1");
    const CrossCovSequence covs = solve_cross_covariances(model, 0);
    const Matrix c0 = covs.at(0);
    const Matrix c0_inv = inverse_spd_checked(c0, "C(0)");
    const Matrix& a1 = model.coeffs[0];

    VarModel rev;
    rev.p = 1;
    rev.d = model.d;
    rev.coeffs = {c0 * a1.transpose() * c0_inv};
    Matrix sigma = c0 - c0 * a1.transpose() * c0_inv * a1 * c0;
    rev.resid_cov = (sigma + sigma.transpose()) / 2.0;
    return rev;
}

VarModel reverse_varp(const VarModel& model) {
    model.validate();
    const int d = model.d, p = model.p;
    const CrossCovSequence covs = solve_cross_covariances(model, std::max(p - 1, 0));
    const PrecisionBlocks q = precision_blocks(covs, p);
    const Matrix sigma_inv = inverse_spd_checked(model.resid_cov, "residual covariance");
    const Matrix& ap = model.coeffs[p - 1];

    const Matrix g = q.block(p, p) + ap.transpose() * sigma_inv * ap;
    const Matrix g_inv = inverse_spd_checked(g, "reversed-residual precision");

    VarModel rev;
    rev.p = p;
    rev.d = d;
    rev.coeffs.resize(p);
    for (int j = 1; j <= p; ++j) {
        // Q_{p,0} := 0 and A_0 := -I close the recursion at j = p.
        const Matrix q_term = (p - j >= 1) ? q.block(p, p - j) : Matrix(Matrix::Zero(d, d));
        const Matrix a_term = (p - j >= 1) ? model.coeffs[p - j - 1]
                                           : Matrix(-Matrix::Identity(d, d));
        rev.coeffs[j - 1] = -g_inv * (q_term + ap.transpose() * sigma_inv * a_term);
    }
    rev.resid_cov = (g_inv + g_inv.transpose()) / 2.0;

    // Andel proves the reversal of a stable process is stable; a violation
    // here signals a numerical fault.
    const StabilityReport rep = check_stability(rev);
    if (rep.spectral_radius >= 1.0)
        throw Error("internal", "time-reversed model came out unstable (spectral radius " +
                                    std::to_string(rep.spectral_radius) + ")");
    return rev;
}

SymmetryReport mixture_symmetry_check(const CrossCovSequence& covs) {
    SymmetryReport rep;
    rep.per_lag.resize(covs.max_lag() + 1);
    for (int h = 0; h <= covs.max_lag(); ++h) {
        const Matrix& c = covs.at(h);
        rep.per_lag[h] = (c - c.transpose()).cwiseAbs().maxCoeff();
        rep.max_asymmetry = std::max(rep.max_asymmetry, rep.per_lag[h]);
    }
    return rep;
}

}  // namespace trgc
