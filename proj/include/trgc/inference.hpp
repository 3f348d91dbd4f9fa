#ifndef TRGC_INFERENCE_HPP
#define TRGC_INFERENCE_HPP

#include "trgc/granger.hpp"
#include "trgc/types.hpp"

#include <cstdint>

namespace trgc {

enum class BootStatistic { f_net, ftil_net, d_net, d_net_full };

struct BootstrapSpec {
    int n_boot = 500;
    double alpha = 0.05;
    BootStatistic statistic = BootStatistic::d_net;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Point estimate plus the bootstrap sampling distribution of all four
/// net statistics, so that every decision rule can be evaluated from one
/// resampling pass.
struct BootstrapDistribution {
    TrgcResult point;
    std::vector<double> f_net;
    std::vector<double> ftil_net;
    std::vector<double> d_net;
    std::vector<double> d_net_full;

    const std::vector<double>& samples(BootStatistic s) const;
    double point_value(BootStatistic s) const;
    ConfidenceInterval ci(BootStatistic s, double alpha) const;
};

/// Two F-tests of nested model fit, one per direction, on the common
/// target window: F = ((RSS_r - RSS_f)/p) / (RSS_f/(T_eff - 2p - 1)).
FTestPair f_test_gc(const TimeSeries& series, int p, double alpha);

/// Residual bootstrap around the two-sided regression of z_t on
/// z_{t-p}..z_{t-1}, z_{t+1}..z_{t+p}: each replicate scores synthetic
/// series z*_t = zhat_t + ehat_{s(t)} with the standard one-sided pipeline.
BootstrapDistribution bootstrap_trgc(const TimeSeries& series, int p,
                                     const BootstrapSpec& spec);

/// Percentile interval of the selected statistic.
ConfidenceInterval bootstrap_ci(const TimeSeries& series, int p,
                                const BootstrapSpec& spec);

/// BIC order selection over 1..p_max, all candidates evaluated on the
/// common window defined by p_max; ties break toward smaller p.
int select_order_bic(const TimeSeries& series, int p_max);

/// Percentile interval with symmetric interpolation: negating the sample
/// set maps (lower, upper) to (-upper, -lower) exactly.
ConfidenceInterval percentile_interval(std::vector<double> samples,
                                       double alpha, double point);

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Upper tail probability P(F > f) for the F(df1, df2) distribution.
double f_dist_sf(double f, long df1, long df2);

}  // namespace trgc

#endif
