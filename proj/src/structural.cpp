#include "trgc/structural.hpp"

#include <cmath>

namespace trgc {

void SvarModel::validate() const {
    if (p < 1) throw Error("invalid-argument", "SVAR order must be >= 1");
    if (d < 1) throw Error("invalid-argument", "SVAR dimension must be >= 1");
    if (gamma0.rows() != d || gamma0.cols() != d)
        throw Error("invalid-argument", "Gamma0 is not d x d");
    for (int i = 0; i < d; ++i)
        if (gamma0(i, i) != 0.0)
            throw Error("invalid-argument", "Gamma0 must have a zero diagonal");
    if (static_cast<int>(gammas.size()) != p)
        throw Error("invalid-argument", "expected " + std::to_string(p) + " lag matrices");
    for (const Matrix& g : gammas)
        if (g.rows() != d || g.cols() != d)
            throw Error("invalid-argument", "lag matrix is not d x d");
    if (resid_cov.rows() != d || resid_cov.cols() != d)
        throw Error("invalid-argument", "residual covariance is not d x d");
}

void MixtureModel::validate() const {
    latent.validate();
    if (mixing.rows() != latent.d || mixing.cols() != latent.d)
        throw Error("invalid-argument", "mixing matrix is not d x d");
}

VarModel svar_to_var(const SvarModel& svar) {
    svar.validate();
    const Matrix lhs = Matrix::Identity(svar.d, svar.d) - svar.gamma0;
    Eigen::FullPivLU<Matrix> lu(lhs);
    if (!lu.isInvertible())
        throw Error("singular-matrix", "I - Gamma0 is singular");
    const Matrix inv = lu.inverse();

    VarModel model;
    model.p = svar.p;
    model.d = svar.d;
    model.coeffs.resize(svar.p);
    for (int h = 0; h < svar.p; ++h) model.coeffs[h] = inv * svar.gammas[h];
    Matrix sigma = inv * svar.resid_cov * inv.transpose();
    model.resid_cov = (sigma + sigma.transpose()) / 2.0;
    return model;
}

VarModel mixture_to_var(const MixtureModel& mix) {
    mix.validate();
    Eigen::FullPivLU<Matrix> lu(mix.mixing);
    if (!lu.isInvertible())
        throw Error("singular-matrix", "mixing matrix is singular");
    const Matrix m_inv = lu.inverse();

    VarModel model;
    model.p = mix.latent.p;
    model.d = mix.latent.d;
    model.coeffs.resize(model.p);
    for (int h = 0; h < model.p; ++h)
        model.coeffs[h] = mix.mixing * mix.latent.coeffs[h] * m_inv;
    Matrix sigma = mix.mixing * mix.latent.resid_cov * mix.mixing.transpose();
    model.resid_cov = (sigma + sigma.transpose()) / 2.0;
    return model;
}

}  // namespace trgc
