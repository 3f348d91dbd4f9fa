#include "trgc/granger.hpp"

#include "trgc/time_reversal.hpp"
#include "trgc/var_core.hpp"

#include <cmath>
#include <limits>

namespace trgc {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double checked_log_ratio(double num, double den) {
    if (!(num > 0.0) || !(den > 0.0))
        throw Error("degenerate-fit", "residual variance is not positive");
    return std::log(num) - std::log(den);
}

bool all_lower_triangular(const VarModel& m, double tol) {
    for (const Matrix& a : m.coeffs)
        for (int i = 0; i < m.d; ++i)
            for (int j = i + 1; j < m.d; ++j)
                if (std::abs(a(i, j)) > tol) return false;
    return true;
}

bool all_upper_triangular(const VarModel& m, double tol) {
    for (const Matrix& a : m.coeffs)
        for (int i = 0; i < m.d; ++i)
            for (int j = 0; j < i; ++j)
                if (std::abs(a(i, j)) > tol) return false;
    return true;
}

CausalDirection from_interval(const ConfidenceInterval& ci) {
    if (ci.lower > 0.0) return CausalDirection::x_to_y;
    if (ci.upper < 0.0) return CausalDirection::y_to_x;
    return CausalDirection::none;
}

const ConfidenceInterval& require_ci(const std::optional<ConfidenceInterval>& ci,
                                     const char* name) {
    if (!ci) throw Error("missing-input", std::string("decision rule needs a CI for ") + name);
    return *ci;
}

}  // namespace

GrangerScores granger_scores(const TimeSeries& series, int p, Direction direction) {
    series.validate();
    if (series.dim() != 2)
        throw Error("invalid-argument", "Granger scores require a bivariate series");
    const TimeSeries oriented =
        direction == Direction::forward ? series : series.reversed();

    const VarFit full = fit_var_ols_full(oriented, p, Direction::forward);
    const ArModel rx = fit_ar_univariate(oriented.channel(0), p, Direction::forward);
    const ArModel ry = fit_ar_univariate(oriented.channel(1), p, Direction::forward);

    GrangerScores s;
    s.sigma_x = rx.resid_var;
    s.sigma_y = ry.resid_var;
    s.sigma_xx = full.model.resid_cov(0, 0);
    s.sigma_yy = full.model.resid_cov(1, 1);
    s.F_xy = checked_log_ratio(s.sigma_y, s.sigma_yy);
    s.F_yx = checked_log_ratio(s.sigma_x, s.sigma_xx);
    s.F_net = s.F_xy - s.F_yx;
    return s;
}

TrgcResult trgc_from_series(const TimeSeries& series, int p) {
    TrgcResult r;
    r.forward = granger_scores(series, p, Direction::forward);
    r.backward = granger_scores(series, p, Direction::backward);
    r.D_xy = r.forward.F_xy - r.backward.F_xy;
    r.D_yx = r.forward.F_yx - r.backward.F_yx;
    r.D_net = r.D_xy - r.D_yx;
    r.D_net_full = (std::log(r.backward.sigma_yy) - std::log(r.backward.sigma_xx)) -
                   (std::log(r.forward.sigma_yy) - std::log(r.forward.sigma_xx));
    return r;
}

TrgcResult trgc_analytic(const VarModel& model) {
    model.validate();
    if (model.d != 2)
        throw Error("invalid-argument", "analytic TRGC requires a bivariate model");
    const VarModel rev = reverse_varp(model);

    TrgcResult r;
    r.forward.sigma_xx = model.resid_cov(0, 0);
    r.forward.sigma_yy = model.resid_cov(1, 1);
    r.backward.sigma_xx = rev.resid_cov(0, 0);
    r.backward.sigma_yy = rev.resid_cov(1, 1);
    r.D_yx = checked_log_ratio(r.backward.sigma_xx, r.forward.sigma_xx);
    r.D_xy = checked_log_ratio(r.backward.sigma_yy, r.forward.sigma_yy);
    r.D_net = r.D_xy - r.D_yx;
    r.D_net_full = r.D_net;  // identical at population level

    // Restricted variances exist in closed form only when one channel's own
    // past fully describes it: lower-triangular coefficients make x a finite
    // AR(p) with innovation variance sigma_xx, upper-triangular ditto for y.
    // The reversed restricted variances equal the forward ones.
    constexpr double tol = 1e-12;
    r.restricted_x_valid = all_lower_triangular(model, tol);
    r.restricted_y_valid = all_upper_triangular(model, tol);
    r.forward.sigma_x = r.backward.sigma_x = kNan;
    r.forward.sigma_y = r.backward.sigma_y = kNan;
    r.forward.F_xy = r.forward.F_yx = r.forward.F_net = kNan;
    r.backward.F_xy = r.backward.F_yx = r.backward.F_net = kNan;
    if (r.restricted_x_valid) {
        r.forward.sigma_x = r.backward.sigma_x = r.forward.sigma_xx;
        r.forward.F_yx = checked_log_ratio(r.forward.sigma_x, r.forward.sigma_xx);
        r.backward.F_yx = checked_log_ratio(r.backward.sigma_x, r.backward.sigma_xx);
    }
    if (r.restricted_y_valid) {
        r.forward.sigma_y = r.backward.sigma_y = r.forward.sigma_yy;
        r.forward.F_xy = checked_log_ratio(r.forward.sigma_y, r.forward.sigma_yy);
        r.backward.F_xy = checked_log_ratio(r.backward.sigma_y, r.backward.sigma_yy);
    }
    if (r.restricted_x_valid && r.restricted_y_valid) {
        r.forward.F_net = r.forward.F_xy - r.forward.F_yx;
        r.backward.F_net = r.backward.F_xy - r.backward.F_yx;
    }
    return r;
}

Decision decide(const TrgcResult&, DecisionRule rule, const SignificanceInputs& inputs) {
    Decision dec;
    dec.rule = rule;
    switch (rule) {
        case DecisionRule::standard_gc: {
            if (!inputs.f_tests)
                throw Error("missing-input", "standard-gc needs the two F-test outcomes");
            const bool xy = inputs.f_tests->x_to_y.significant;
            const bool yx = inputs.f_tests->y_to_x.significant;
            dec.direction = xy && yx   ? CausalDirection::both
                            : xy       ? CausalDirection::x_to_y
                            : yx       ? CausalDirection::y_to_x
                                       : CausalDirection::none;
            break;
        }
        case DecisionRule::net_gc:
            dec.direction = from_interval(require_ci(inputs.f_net, "F_net"));
            break;
        case DecisionRule::diff_trgc:
            dec.direction = from_interval(require_ci(inputs.d_net, "D_net"));
            break;
        case DecisionRule::diff_trgc_full:
            dec.direction = from_interval(require_ci(inputs.d_net_full, "D_net_full"));
            break;
        case DecisionRule::conj_trgc: {
            // Net flow must reverse sign on the time-reversed data.
            const auto fwd = from_interval(require_ci(inputs.f_net, "F_net"));
            const auto rev = from_interval(require_ci(inputs.ftil_net, "Ftil_net"));
            if (fwd == CausalDirection::x_to_y && rev == CausalDirection::y_to_x)
                dec.direction = CausalDirection::x_to_y;
            else if (fwd == CausalDirection::y_to_x && rev == CausalDirection::x_to_y)
                dec.direction = CausalDirection::y_to_x;
            else
                dec.direction = CausalDirection::none;
            break;
        }
        case DecisionRule::net_and_diff_trgc: {
            const auto net = from_interval(require_ci(inputs.f_net, "F_net"));
            const auto diff = from_interval(require_ci(inputs.d_net, "D_net"));
            dec.direction = (net == diff) ? net : CausalDirection::none;
            break;
        }
    }
    return dec;
}

const char* to_string(DecisionRule rule) {
    switch (rule) {
        case DecisionRule::standard_gc: return "standard-gc";
        case DecisionRule::net_gc: return "net-gc";
        case DecisionRule::conj_trgc: return "conj-trgc";
        case DecisionRule::diff_trgc: return "diff-trgc";
        case DecisionRule::net_and_diff_trgc: return "net-and-diff-trgc";
        case DecisionRule::diff_trgc_full: return "diff-trgc-full";
    }
    return "?";
}

const char* to_string(CausalDirection direction) {
    switch (direction) {
        case CausalDirection::none: return "none";
        case CausalDirection::x_to_y: return "x->y";
        case CausalDirection::y_to_x: return "y->x";
        case CausalDirection::both: return "both";
    }
    return "?";
}

DecisionRule rule_from_string(const std::string& name) {
    if (name == "standard-gc") return DecisionRule::standard_gc;
    if (name == "net-gc") return DecisionRule::net_gc;
    if (name == "conj-trgc") return DecisionRule::conj_trgc;
    if (name == "diff-trgc") return DecisionRule::diff_trgc;
    if (name == "net-and-diff-trgc") return DecisionRule::net_and_diff_trgc;
    if (name == "diff-trgc-full") return DecisionRule::diff_trgc_full;
    throw Error("invalid-config", "unknown method '" + name + "'");
}

}  // namespace trgc
