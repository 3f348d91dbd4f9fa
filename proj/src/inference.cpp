#include "trgc/inference.hpp"

#include "trgc/rng.hpp"
#include "trgc/var_core.hpp"

#include <algorithm>
#include <cmath>

namespace trgc {

void BootstrapSpec::validate() const {
    if (n_boot < 100) throw Error("invalid-argument", "n_boot must be >= 100");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw Error("invalid-argument", "alpha must be in (0, 1)");
}

namespace {

// Continued fraction for the regularized incomplete beta (Lentz's method).
double betacf(double a, double b, double x) {
    constexpr int max_iter = 300;
    constexpr double eps = 3e-15;
    constexpr double fpmin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw Error("invalid-argument", "incomplete beta requires a, b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double f_dist_sf(double f, long df1, long df2) {
    if (df1 < 1 || df2 < 1) throw Error("invalid-argument", "F degrees of freedom must be >= 1");
    if (f <= 0.0) return 1.0;
    const double x = df2 / (df2 + df1 * f);
    return incomplete_beta(df2 / 2.0, df1 / 2.0, x);
}

FTestPair f_test_gc(const TimeSeries& series, int p, double alpha) {
    series.validate();
    if (series.dim() != 2)
        throw Error("invalid-argument", "the GC F-test requires a bivariate series");
    const VarFit full = fit_var_ols_full(series, p, Direction::forward);
    const VarFit rx = fit_var_ols_full(series.channel(0), p, Direction::forward);
    const VarFit ry = fit_var_ols_full(series.channel(1), p, Direction::forward);

    const long t_eff = full.t_eff;
    const long df2 = t_eff - 2L * p - 1L;  // means removed count as one parameter
    if (df2 < 1) throw Error("insufficient-data", "not enough samples for the F-test");

    auto one_direction = [&](double rss_r, double rss_f) {
        if (!(rss_f > 0.0)) throw Error("degenerate-fit", "full-model RSS is zero");
        FTestResult res;
        res.df1 = p;
        res.df2 = df2;
        res.f_stat = std::max(0.0, (rss_r - rss_f) / p / (rss_f / df2));
        res.p_value = f_dist_sf(res.f_stat, res.df1, res.df2);
        res.significant = res.p_value < alpha;
        return res;
    };

    FTestPair pair;
    pair.alpha = alpha;
    pair.x_to_y = one_direction(ry.rss(0, 0), full.rss(1, 1));
    pair.y_to_x = one_direction(rx.rss(0, 0), full.rss(0, 0));
    return pair;
}

ConfidenceInterval percentile_interval(std::vector<double> samples, double alpha,
                                       double point) {
    if (samples.empty()) throw Error("invalid-argument", "no bootstrap samples");
    std::sort(samples.begin(), samples.end());
    const long n = static_cast<long>(samples.size());
    const double h = (alpha / 2.0) * (n - 1);
    const long i = static_cast<long>(std::floor(h));
    const double g = h - i;

    ConfidenceInterval ci;
    ci.point = point;
    // The upper bound interpolates the mirrored position from the top so
    // that negating every sample maps (lower, upper) to (-upper, -lower)
    // exactly.
    if (i + 1 >= n) {
        ci.lower = samples.front();
        ci.upper = samples.back();
        return ci;
    }
    ci.lower = (1.0 - g) * samples[i] + g * samples[i + 1];
    ci.upper = (1.0 - g) * samples[n - 1 - i] + g * samples[n - 2 - i];
    return ci;
}

const std::vector<double>& BootstrapDistribution::samples(BootStatistic s) const {
    switch (s) {
        case BootStatistic::f_net: return f_net;
        case BootStatistic::ftil_net: return ftil_net;
        case BootStatistic::d_net: return d_net;
        case BootStatistic::d_net_full: return d_net_full;
    }
    throw Error("internal", "unreachable");
}

double BootstrapDistribution::point_value(BootStatistic s) const {
    switch (s) {
        case BootStatistic::f_net: return point.forward.F_net;
        case BootStatistic::ftil_net: return point.backward.F_net;
        case BootStatistic::d_net: return point.D_net;
        case BootStatistic::d_net_full: return point.D_net_full;
    }
    throw Error("internal", "unreachable");
}

ConfidenceInterval BootstrapDistribution::ci(BootStatistic s, double alpha) const {
    return percentile_interval(samples(s), alpha, point_value(s));
}

BootstrapDistribution bootstrap_trgc(const TimeSeries& series, int p,
                                     const BootstrapSpec& spec) {
    spec.validate();
    series.validate();
    if (series.dim() != 2)
        throw Error("invalid-argument", "the bootstrap requires a bivariate series");
    const long T = series.length();
    if (T <= 4L * p + 2L * p + 2)
        throw Error("insufficient-data", "series too short for the two-sided regression");

    // Regress z_t on its p past and p future values, keep fitted values and
    // residuals; replicates reshuffle whole residual rows onto the fits.
    std::vector<int> offsets;
    for (int h = 1; h <= p; ++h) offsets.push_back(-h);
    for (int h = 1; h <= p; ++h) offsets.push_back(h);
    const detail::LaggedFit two_sided =
        detail::ols_lagged(series.values, offsets, p, T - p);
    const long n = two_sided.t_eff;
    Matrix fitted = two_sided.fitted.rowwise() + two_sided.mean.transpose();

    BootstrapDistribution dist;
    dist.point = trgc_from_series(series, p);
    dist.f_net.reserve(spec.n_boot);
    dist.ftil_net.reserve(spec.n_boot);
    dist.d_net.reserve(spec.n_boot);
    dist.d_net_full.reserve(spec.n_boot);

    TimeSeries synthetic;
    synthetic.values.resize(n, 2);
    for (int b = 0; b < spec.n_boot; ++b) {
        Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(b)));
        std::uniform_int_distribution<long> pick(0, n - 1);
        for (long t = 0; t < n; ++t) {
            const long s = pick(rng);
            synthetic.values.row(t) = fitted.row(t) + two_sided.resid.row(s);
        }
        const TrgcResult r = trgc_from_series(synthetic, p);
        dist.f_net.push_back(r.forward.F_net);
        dist.ftil_net.push_back(r.backward.F_net);
        dist.d_net.push_back(r.D_net);
        dist.d_net_full.push_back(r.D_net_full);
    }
    return dist;
}

ConfidenceInterval bootstrap_ci(const TimeSeries& series, int p,
                                const BootstrapSpec& spec) {
    const BootstrapDistribution dist = bootstrap_trgc(series, p, spec);
    return dist.ci(spec.statistic, spec.alpha);
}

int select_order_bic(const TimeSeries& series, int p_max) {
    series.validate();
    if (p_max < 1) throw Error("invalid-argument", "p_max must be >= 1");
    const int d = series.dim();
    const long T = series.length();
    const long t_eff = T - p_max;
    if (t_eff < static_cast<long>(d) * p_max + 2)
        throw Error("insufficient-data", "p_max too large for the series length");

    int best_p = 1;
    double best_bic = std::numeric_limits<double>::infinity();
    for (int p = 1; p <= p_max; ++p) {
        const VarFit fit = fit_var_ols_full(series, p, Direction::forward, p_max);
        const Matrix sigma_ml = fit.rss / static_cast<double>(fit.t_eff);
        const double log_det = std::log(sigma_ml.determinant());
        const double bic = log_det + static_cast<double>(d) * d * p *
                                         std::log(static_cast<double>(fit.t_eff)) /
                                         static_cast<double>(fit.t_eff);
        if (bic < best_bic) {
            best_bic = bic;
            best_p = p;
        }
    }
    return best_p;
}

}  // namespace trgc
