#ifndef TRGC_STRUCTURAL_HPP
#define TRGC_STRUCTURAL_HPP

#include "trgc/types.hpp"

namespace trgc {

/// Structural VAR with instantaneous coefficients Gamma_0 (zero diagonal):
///   z_t = Gamma_0 z_t + Gamma_1 z_{t-1} + ... + Gamma_p z_{t-p} + e_t.
struct SvarModel {
    int p = 0;
    int d = 0;
    Matrix gamma0;
    std::vector<Matrix> gammas;  // Gamma_1 .. Gamma_p
    Matrix resid_cov;

    void validate() const;
};

/// Observed data as an invertible instantaneous mixture of latent VAR
/// sources: z_t = M z^(l)_t, z^(l)_t = sum_h B_h z^(l)_{t-h} + e_t.
struct MixtureModel {
    Matrix mixing;  // M, d x d, invertible
    VarModel latent;

    void validate() const;
};

/// A_h = (I - Gamma_0)^{-1} Gamma_h,  Sigma = (I - Gamma_0)^{-1} S (I - Gamma_0)^{-T}.
VarModel svar_to_var(const SvarModel& svar);

/// A_h = M B_h M^{-1},  Sigma = M S M^T.
VarModel mixture_to_var(const MixtureModel& mix);

}  // namespace trgc

#endif
