#ifndef TRGC_TIME_REVERSAL_HPP
#define TRGC_TIME_REVERSAL_HPP

#include "trgc/types.hpp"
#include "trgc/var_core.hpp"

namespace trgc {

/// Block partition of Q = C_Z(0)^{-1}.
struct PrecisionBlocks {
    int p = 0;
    int dim = 0;
    Matrix full;  // (d*p) x (d*p)

    /// Q_{l,k}, 1-based block indices as in the Andel formulas.
    Matrix block(int l, int k) const;
};

PrecisionBlocks precision_blocks(const CrossCovSequence& covs, int p);

/// Bartlett reversal of a VAR(1):
///   A~ = C(0) A^T C(0)^{-1},  Sigma~ = C(0) - C(0) A^T C(0)^{-1} A C(0).
VarModel reverse_var1(const VarModel& model);

/// Andel reversal of a VAR(p): the unique VAR(p) whose cross-covariances
/// are the transposes of the input's,
///   A~_j   = -(Q_pp + A_p^T S^{-1} A_p)^{-1} (Q_{p,p-j} + A_p^T S^{-1} A_{p-j}),
///   Sigma~ =  (Q_pp + A_p^T S^{-1} A_p)^{-1},
/// with Q_{p,0} := 0 and A_0 := -I.
VarModel reverse_varp(const VarModel& model);

struct SymmetryReport {
    std::vector<double> per_lag;  // max |C(h) - C(h)^T| entrywise, h = 0..h_max
    double max_asymmetry = 0.0;
};

/// Mixtures of independent sources have symmetric cross-covariances at
/// every lag; the returned asymmetry is zero (within tolerance) exactly
/// for such processes.
SymmetryReport mixture_symmetry_check(const CrossCovSequence& covs);

}  // namespace trgc

#endif
