#ifndef TRGC_SCENARIOS_HPP
#define TRGC_SCENARIOS_HPP

#include "trgc/granger.hpp"
#include "trgc/rng.hpp"
#include "trgc/structural.hpp"
#include "trgc/types.hpp"

#include <map>

namespace trgc {

enum class Scenario {
    noiseless_unidir,
    linear_mixing,
    hidden_cause,
    additive_noise,
    long_memory,
    downsample,
    aggregate,
};

enum class NoiseKind { independent_white, mixed_white, mixed_autocorrelated };
enum class LatentKind { independent, coupled };
enum class GroundTruth { none, x_to_y, y_to_x };

struct ScenarioConfig {
    Scenario scenario = Scenario::noiseless_unidir;
    long T = 2000;
    int p_gen = 5;
    double sigma_A = 0.2;
    double gamma = 0.0;
    NoiseKind noise_kind = NoiseKind::independent_white;
    LatentKind latent = LatentKind::independent;
    int tau = 1;
    int n_reps = 300;
    std::uint64_t seed = 0;

    void validate() const;
};

/// One generated dataset plus everything the invariant tests need to
/// inspect: the latent model, the mixing matrix when one was drawn, and
/// the rejection-sampling effort.
struct GeneratedData {
    TimeSeries series;
    GroundTruth truth = GroundTruth::none;
    VarModel latent_model;
    std::optional<Matrix> mixing;
    int attempts = 1;
};

/// Random stable VAR draw: N(0, sigma_A^2) coefficients with the entries
/// listed in `zero_mask` forced to zero, diagonal residual covariance with
/// Uniform(0,1) variances, rejection-sampled to spectral radius < 0.97.
VarModel draw_stable_var(Rng& rng, int d, int p, double sigma_A,
                         const std::vector<std::pair<int, int>>& zero_mask,
                         int* attempts_out = nullptr);

GeneratedData gen_unidirectional(const ScenarioConfig& cfg, Rng& rng);
GeneratedData gen_mixing(const ScenarioConfig& cfg, Rng& rng);
GeneratedData gen_hidden_cause(const ScenarioConfig& cfg, Rng& rng);
GeneratedData gen_additive_noise(const ScenarioConfig& cfg, Rng& rng);
GeneratedData gen_long_memory(const ScenarioConfig& cfg, Rng& rng);

/// Dispatch on cfg.scenario (downsample/aggregate generate tau*T latent
/// samples and decimate to length T).
GeneratedData generate(const ScenarioConfig& cfg, Rng& rng);

TimeSeries downsample(const TimeSeries& series, int tau);
TimeSeries aggregate(const TimeSeries& series, int tau);

struct AnalysisSpec {
    int order = 0;  // 0 selects the order by BIC
    int p_max = 10;
    double alpha = 0.05;
    int n_boot = 500;
};

struct MethodOutcome {
    long tp = 0;
    long fp = 0;
};

struct ExperimentResult {
    ScenarioConfig config;
    std::vector<DecisionRule> methods;
    std::map<DecisionRule, MethodOutcome> counts;
    long n_valid = 0;
    long n_failed = 0;
    std::vector<std::string> failure_messages;

    double tp_rate(DecisionRule rule) const;
    double fp_rate(DecisionRule rule) const;
};

/// Repeated generate/score/test loop with per-repetition derived seeds.
/// Repetitions run on `threads` workers (0 = hardware count capped by the
/// TRGC_THREADS environment variable); results do not depend on the
/// thread count or completion order.
ExperimentResult run_experiment(const ScenarioConfig& cfg,
                                const std::vector<DecisionRule>& methods,
                                const AnalysisSpec& spec, int threads = 0);

const char* to_string(Scenario s);
const char* to_string(NoiseKind k);
const char* to_string(LatentKind k);
Scenario scenario_from_string(const std::string& name);
NoiseKind noise_kind_from_string(const std::string& name);
LatentKind latent_kind_from_string(const std::string& name);

}  // namespace trgc

#endif
