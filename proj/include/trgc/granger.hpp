#ifndef TRGC_GRANGER_HPP
#define TRGC_GRANGER_HPP

#include "trgc/types.hpp"

namespace trgc {

/// Granger scores of a bivariate series in one time direction:
///   F_xy = log(sigma_y / sigma_yy),  F_yx = log(sigma_x / sigma_xx),
/// where sigma_x, sigma_y are the restricted (univariate AR) residual
/// variances and sigma_xx, sigma_yy the unrestricted (bivariate VAR) ones.
struct GrangerScores {
    double F_xy = 0.0;
    double F_yx = 0.0;
    double F_net = 0.0;  // F_xy - F_yx
    double sigma_x = 0.0;
    double sigma_y = 0.0;
    double sigma_xx = 0.0;
    double sigma_yy = 0.0;
};

/// Forward and time-reversed scores plus their differences
///   D_yx = F_yx - Ftil_yx,  D_xy = F_xy - Ftil_xy,  D_net = D_xy - D_yx,
/// and the full-model-only variant
///   D_net_full = (log s~_yy - log s~_xx) - (log s_yy - log s_xx).
struct TrgcResult {
    GrangerScores forward;
    GrangerScores backward;
    double D_xy = 0.0;
    double D_yx = 0.0;
    double D_net = 0.0;
    double D_net_full = 0.0;
    /// Analytic results only provide restricted variances when a finite
    /// univariate AR representation exists (triangular coefficients).
    bool restricted_x_valid = true;
    bool restricted_y_valid = true;
};

enum class DecisionRule {
    standard_gc,
    net_gc,
    conj_trgc,
    diff_trgc,
    net_and_diff_trgc,
    diff_trgc_full,
};

enum class CausalDirection { none, x_to_y, y_to_x, both };

struct Decision {
    DecisionRule rule = DecisionRule::standard_gc;
    CausalDirection direction = CausalDirection::none;
};

/// Statistics backing a decision; which members must be present depends
/// on the rule.
struct SignificanceInputs {
    std::optional<FTestPair> f_tests;
    std::optional<ConfidenceInterval> f_net;
    std::optional<ConfidenceInterval> ftil_net;
    std::optional<ConfidenceInterval> d_net;
    std::optional<ConfidenceInterval> d_net_full;
};

GrangerScores granger_scores(const TimeSeries& series, int p, Direction direction);

TrgcResult trgc_from_series(const TimeSeries& series, int p);

/// Population scores of a stable bivariate model, from the analytic
/// time-reversed representation. Restricted variances are filled in only
/// for triangular coefficient structure (see TrgcResult flags); the
/// difference scores never need them.
TrgcResult trgc_analytic(const VarModel& model);

Decision decide(const TrgcResult& result, DecisionRule rule,
                const SignificanceInputs& inputs);

const char* to_string(DecisionRule rule);
const char* to_string(CausalDirection direction);
DecisionRule rule_from_string(const std::string& name);

}  // namespace trgc

#endif
