#ifndef TRGC_VAR_CORE_HPP
#define TRGC_VAR_CORE_HPP

#include "trgc/rng.hpp"
#include "trgc/types.hpp"

namespace trgc {

/// Spectral-radius margin below 1 that still counts as stable.
inline constexpr double kStabilityMargin = 1e-8;

/// Covariance inversions refuse to proceed past this condition number.
inline constexpr double kMaxConditionNumber = 1e12;

struct StabilityReport {
    bool stable = false;
    double spectral_radius = 0.0;
};

/// Full output of a least-squares VAR fit. `rss` holds residual
/// sums of squares and cross-products (d x d); `model.resid_cov` is
/// rss / (t_eff - d*p).
struct VarFit {
    VarModel model;
    Matrix rss;
    long t_eff = 0;
    Vector mean;  // removed channel means
};

CompanionForm companion_form(const VarModel& model);

StabilityReport check_stability(const VarModel& model);

/// Cross-covariances C(0)..C(h_max) of a stable model via the Yule-Walker
/// equations: C_Z(0) from the discrete Lyapunov equation
/// C_Z(0) = A C_Z(0) A^T + Sigma_E, higher lags from C(h) = sum_k A_k C(h-k).
CrossCovSequence solve_cross_covariances(const VarModel& model, int h_max);

/// Inverse map: coefficients and residual covariance from cross-covariances
/// (requires lags 0..p, with the stacked C_Z(0) invertible).
VarModel var_from_covariances(const CrossCovSequence& covs, int p);

/// Simulate T samples after discarding burn_in, with zero-mean Gaussian
/// innovations of covariance resid_cov. Deterministic given the rng state.
TimeSeries simulate(const VarModel& model, long T, Rng& rng, long burn_in = 1000);

/// Least-squares VAR(p) fit after per-channel mean removal.
/// direction == backward regresses z_t on z_{t+1}..z_{t+p}, implemented as
/// the forward fit of the index-reversed series so the two are identical
/// by construction. window_start (>= p) fixes the first target index; -1
/// means p (the full usable window).
VarFit fit_var_ols_full(const TimeSeries& series, int p, Direction direction,
                        long window_start = -1);
VarModel fit_var_ols(const TimeSeries& series, int p, Direction direction);

ArModel fit_ar_univariate(const TimeSeries& series, int p, Direction direction);

/// B with B B^T = S for a symmetric PSD S (eigenvalue square root).
Matrix psd_sqrt(const Matrix& S);

/// max_i |lambda_i| of a general square matrix.
double spectral_radius(const Matrix& A);

namespace detail {

/// Per-target least-squares on lagged regressors. For target channel c the
/// regressor columns are ordered own-channel lags first, then the remaining
/// channels in cyclic order; every computed quantity is then exactly
/// equivariant under channel permutation, so swap-antisymmetry of the
/// scores holds bitwise, not just approximately. Coefficients are reported
/// in natural (offset-major) order.
struct LaggedFit {
    Matrix coeffs;   // d x k, natural column order
    Matrix fitted;   // t_eff x d (centered scale)
    Matrix resid;    // t_eff x d
    Matrix rss;      // d x d
    Vector mean;     // channel means removed before fitting
    long t_eff = 0;
    long t_begin = 0;
};

/// offsets are relative sample positions of the regressors (e.g. {-1,-2}
/// for a forward VAR(2), {-1,-2,1,2} for the two-sided bootstrap fit).
LaggedFit ols_lagged(const Matrix& z, const std::vector<int>& offsets,
                     long t_begin, long t_end);

}  // namespace detail

}  // namespace trgc

#endif
