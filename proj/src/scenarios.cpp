#include "trgc/scenarios.hpp"

#include "trgc/inference.hpp"
#include "trgc/var_core.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

namespace trgc {

namespace {

constexpr int kMaxDrawAttempts = 10000;
constexpr double kGeneratorRadius = 0.97;

long burn_in_for(const ScenarioConfig& cfg) { return 10L * cfg.p_gen * cfg.tau; }

Matrix det_normalized_gaussian(Rng& rng, int d) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int attempt = 0; attempt < kMaxDrawAttempts; ++attempt) {
        Matrix m(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m(i, j) = gauss(rng);
        const double det = m.determinant();
        if (std::abs(det) < 1e-3) continue;
        return m / std::pow(std::abs(det), 1.0 / d);
    }
    throw Error("rejection-budget", "could not draw a usable mixing matrix");
}

/// Independent univariate AR(p) channels packed as a diagonal VarModel.
VarModel draw_independent_channels(Rng& rng, int d, int p, double sigma_A,
                                   int* attempts_out = nullptr) {
    std::vector<std::pair<int, int>> mask;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (i != j) mask.emplace_back(i, j);
    return draw_stable_var(rng, d, p, sigma_A, mask, attempts_out);
}

TimeSeries mix_series(const Matrix& m, const TimeSeries& latent) {
    TimeSeries out;
    out.values = latent.values * m.transpose();
    return out;
}

}  // namespace

void ScenarioConfig::validate() const {
    if (T < 1) throw Error("invalid-config", "T must be >= 1");
    if (p_gen < 1) throw Error("invalid-config", "p_gen must be >= 1");
    if (sigma_A < 0.0) throw Error("invalid-config", "sigma_A must be >= 0");
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw Error("invalid-config", "gamma must be in [0, 1]");
    if (tau < 1) throw Error("invalid-config", "tau must be >= 1");
    if (n_reps < 0) throw Error("invalid-config", "n_reps must be >= 0");
    const bool uses_tau = scenario == Scenario::downsample || scenario == Scenario::aggregate;
    if (tau > 1 && !uses_tau)
        throw Error("invalid-config", "tau applies only to downsample/aggregate scenarios");
    if (gamma > 0.0 &&
        !(scenario == Scenario::additive_noise || scenario == Scenario::long_memory))
        throw Error("invalid-config",
                    "gamma applies only to additive-noise/long-memory scenarios");
}

VarModel draw_stable_var(Rng& rng, int d, int p, double sigma_A,
                         const std::vector<std::pair<int, int>>& zero_mask,
                         int* attempts_out) {
    std::normal_distribution<double> gauss(0.0, sigma_A > 0.0 ? sigma_A : 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int attempt = 1; attempt <= kMaxDrawAttempts; ++attempt) {
        VarModel m;
        m.p = p;
        m.d = d;
        m.coeffs.assign(p, Matrix::Zero(d, d));
        if (sigma_A > 0.0) {
            for (int h = 0; h < p; ++h)
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j) m.coeffs[h](i, j) = gauss(rng);
            for (const auto& [i, j] : zero_mask)
                for (int h = 0; h < p; ++h) m.coeffs[h](i, j) = 0.0;
        }
        m.resid_cov = Matrix::Zero(d, d);
        for (int i = 0; i < d; ++i) m.resid_cov(i, i) = unif(rng);
        const CompanionForm cf = companion_form(m);
        if (spectral_radius(cf.matrix) < kGeneratorRadius) {
            if (attempts_out) *attempts_out = attempt;
            return m;
        }
    }
    std::ostringstream msg;
    msg << "no stable draw in " << kMaxDrawAttempts << " attempts (sigma_A = " << sigma_A
        << ", p = " << p << ")";
    throw Error("rejection-budget", msg.str());
}

GeneratedData gen_unidirectional(const ScenarioConfig& cfg, Rng& rng) {
    GeneratedData out;
    out.latent_model =
        draw_stable_var(rng, 2, cfg.p_gen, cfg.sigma_A, {{0, 1}}, &out.attempts);
    out.series = simulate(out.latent_model, cfg.T, rng, burn_in_for(cfg));
    out.truth = GroundTruth::x_to_y;
    return out;
}

GeneratedData gen_mixing(const ScenarioConfig& cfg, Rng& rng) {
    GeneratedData out;
    out.latent_model = draw_independent_channels(rng, 2, cfg.p_gen, cfg.sigma_A, &out.attempts);
    out.mixing = det_normalized_gaussian(rng, 2);
    const TimeSeries latent = simulate(out.latent_model, cfg.T, rng, burn_in_for(cfg));
    out.series = mix_series(*out.mixing, latent);
    out.truth = GroundTruth::none;
    return out;
}

GeneratedData gen_hidden_cause(const ScenarioConfig& cfg, Rng& rng) {
    GeneratedData out;
    // Channels (x, y, g): only the direct x<->y couplings are zeroed.
    out.latent_model =
        draw_stable_var(rng, 3, cfg.p_gen, cfg.sigma_A, {{0, 1}, {1, 0}}, &out.attempts);
    const TimeSeries full = simulate(out.latent_model, cfg.T, rng, burn_in_for(cfg));
    out.series = full.channels(0, 1);
    out.truth = GroundTruth::none;
    return out;
}

GeneratedData gen_additive_noise(const ScenarioConfig& cfg, Rng& rng) {
    GeneratedData out;
    if (cfg.latent == LatentKind::coupled)
        out.latent_model =
            draw_stable_var(rng, 2, cfg.p_gen, cfg.sigma_A, {{0, 1}}, &out.attempts);
    else
        out.latent_model = draw_independent_channels(rng, 2, cfg.p_gen, cfg.sigma_A, &out.attempts);
    const TimeSeries latent = simulate(out.latent_model, cfg.T, rng, burn_in_for(cfg));

    TimeSeries noise;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    switch (cfg.noise_kind) {
        case NoiseKind::independent_white: {
            VarModel white;
            white.p = 1;
            white.d = 2;
            white.coeffs = {Matrix::Zero(2, 2)};
            white.resid_cov = Matrix::Zero(2, 2);
            white.resid_cov(0, 0) = unif(rng);
            white.resid_cov(1, 1) = unif(rng);
            noise = simulate(white, cfg.T, rng, 0);
            break;
        }
        case NoiseKind::mixed_white: {
            VarModel white;
            white.p = 1;
            white.d = 2;
            white.coeffs = {Matrix::Zero(2, 2)};
            white.resid_cov = Matrix::Zero(2, 2);
            white.resid_cov(0, 0) = unif(rng);
            white.resid_cov(1, 1) = unif(rng);
            const Matrix b = det_normalized_gaussian(rng, 2);
            noise = mix_series(b, simulate(white, cfg.T, rng, 0));
            break;
        }
        case NoiseKind::mixed_autocorrelated: {
            const VarModel ar = draw_independent_channels(rng, 2, cfg.p_gen, cfg.sigma_A);
            const Matrix b = det_normalized_gaussian(rng, 2);
            noise = mix_series(b, simulate(ar, cfg.T, rng, burn_in_for(cfg)));
            break;
        }
    }

    out.series.values = (1.0 - cfg.gamma) * latent.values + cfg.gamma * noise.values;
    out.truth = (cfg.latent == LatentKind::coupled && cfg.gamma < 1.0) ? GroundTruth::x_to_y
                                                                       : GroundTruth::none;
    return out;
}

GeneratedData gen_long_memory(const ScenarioConfig& cfg, Rng& rng) {
    GeneratedData out;
    out.latent_model.p = 1;
    out.latent_model.d = 2;
    Matrix a(2, 2);
    a << 0.95, 0.0, 1.0, 0.5;
    out.latent_model.coeffs = {a};
    out.latent_model.resid_cov = Matrix::Identity(2, 2);
    const TimeSeries latent = simulate(out.latent_model, cfg.T, rng, 10L * cfg.tau);

    std::normal_distribution<double> gauss(0.0, 1.0);
    out.series.values.resize(cfg.T, 2);
    for (long t = 0; t < cfg.T; ++t) {
        out.series.values(t, 0) = (1.0 - cfg.gamma) * latent.values(t, 0) + cfg.gamma * gauss(rng);
        out.series.values(t, 1) = latent.values(t, 1);
    }
    out.truth = cfg.gamma < 1.0 ? GroundTruth::x_to_y : GroundTruth::none;
    return out;
}

TimeSeries downsample(const TimeSeries& series, int tau) {
    if (tau < 1) throw Error("invalid-argument", "tau must be >= 1");
    if (tau == 1) return series;
    const long n = (series.length() + tau - 1) / tau;
    TimeSeries out;
    out.values.resize(n, series.dim());
    for (long i = 0; i < n; ++i) out.values.row(i) = series.values.row(i * tau);
    return out;
}

TimeSeries aggregate(const TimeSeries& series, int tau) {
    if (tau < 1) throw Error("invalid-argument", "tau must be >= 1");
    if (tau == 1) return series;
    const long n = series.length() / tau;
    TimeSeries out;
    out.values.resize(n, series.dim());
    for (long i = 0; i < n; ++i)
        out.values.row(i) =
            series.values.middleRows(i * tau, tau).colwise().mean();
    return out;
}

GeneratedData generate(const ScenarioConfig& cfg, Rng& rng) {
    cfg.validate();
    switch (cfg.scenario) {
        case Scenario::noiseless_unidir: return gen_unidirectional(cfg, rng);
        case Scenario::linear_mixing: return gen_mixing(cfg, rng);
        case Scenario::hidden_cause: return gen_hidden_cause(cfg, rng);
        case Scenario::additive_noise: return gen_additive_noise(cfg, rng);
        case Scenario::long_memory: return gen_long_memory(cfg, rng);
        case Scenario::downsample:
        case Scenario::aggregate: {
            // tau * T source samples keep the observed length at T.
            const long source_len = static_cast<long>(cfg.tau) * cfg.T;
            GeneratedData out;
            out.latent_model =
                draw_stable_var(rng, 2, cfg.p_gen, cfg.sigma_A, {{0, 1}}, &out.attempts);
            const TimeSeries source =
                simulate(out.latent_model, source_len, rng, burn_in_for(cfg));
            out.series = cfg.scenario == Scenario::downsample ? downsample(source, cfg.tau)
                                                              : aggregate(source, cfg.tau);
            out.truth = GroundTruth::x_to_y;
            return out;
        }
    }
    throw Error("internal", "unreachable");
}

double ExperimentResult::tp_rate(DecisionRule rule) const {
    const auto it = counts.find(rule);
    if (it == counts.end() || n_valid == 0) return 0.0;
    return static_cast<double>(it->second.tp) / static_cast<double>(n_valid);
}

double ExperimentResult::fp_rate(DecisionRule rule) const {
    const auto it = counts.find(rule);
    if (it == counts.end() || n_valid == 0) return 0.0;
    return static_cast<double>(it->second.fp) / static_cast<double>(n_valid);
}

namespace {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* env = std::getenv("TRGC_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0 && cap < n) n = cap;
    }
    return n;
}

struct RepOutcome {
    bool failed = false;
    std::string message;
    std::vector<Decision> decisions;
};

bool needs_bootstrap(const std::vector<DecisionRule>& methods) {
    for (DecisionRule r : methods)
        if (r != DecisionRule::standard_gc) return true;
    return false;
}

RepOutcome run_one_rep(const ScenarioConfig& cfg, const std::vector<DecisionRule>& methods,
                       const AnalysisSpec& spec, std::uint64_t rep_seed) {
    RepOutcome out;
    try {
        Rng rng(rep_seed);
        const GeneratedData data = generate(cfg, rng);
        const int p = spec.order > 0 ? spec.order
                                     : select_order_bic(data.series, spec.p_max);

        SignificanceInputs inputs;
        TrgcResult result{};
        if (needs_bootstrap(methods)) {
            BootstrapSpec bspec;
            bspec.n_boot = spec.n_boot;
            bspec.alpha = spec.alpha;
            bspec.seed = derive_seed(rep_seed, 1);
            const BootstrapDistribution dist = bootstrap_trgc(data.series, p, bspec);
            result = dist.point;
            inputs.f_net = dist.ci(BootStatistic::f_net, spec.alpha);
            inputs.ftil_net = dist.ci(BootStatistic::ftil_net, spec.alpha);
            inputs.d_net = dist.ci(BootStatistic::d_net, spec.alpha);
            inputs.d_net_full = dist.ci(BootStatistic::d_net_full, spec.alpha);
        }
        bool wants_standard = false;
        for (DecisionRule r : methods) wants_standard |= r == DecisionRule::standard_gc;
        if (wants_standard) inputs.f_tests = f_test_gc(data.series, p, spec.alpha);

        for (DecisionRule r : methods) out.decisions.push_back(decide(result, r, inputs));
    } catch (const Error& e) {
        out.failed = true;
        out.message = std::string(e.category()) + ": " + e.what();
    } catch (const std::exception& e) {
        out.failed = true;
        out.message = std::string("internal: ") + e.what();
    }
    return out;
}

GroundTruth truth_of(const ScenarioConfig& cfg) {
    switch (cfg.scenario) {
        case Scenario::noiseless_unidir:
        case Scenario::long_memory:
        case Scenario::downsample:
        case Scenario::aggregate:
            return cfg.gamma < 1.0 ? GroundTruth::x_to_y : GroundTruth::none;
        case Scenario::additive_noise:
            return (cfg.latent == LatentKind::coupled && cfg.gamma < 1.0)
                       ? GroundTruth::x_to_y
                       : GroundTruth::none;
        case Scenario::linear_mixing:
        case Scenario::hidden_cause:
            return GroundTruth::none;
    }
    return GroundTruth::none;
}

}  // namespace

ExperimentResult run_experiment(const ScenarioConfig& cfg,
                                const std::vector<DecisionRule>& methods,
                                const AnalysisSpec& spec, int threads) {
    cfg.validate();
    if (methods.empty()) throw Error("invalid-config", "no methods requested");

    ExperimentResult result;
    result.config = cfg;
    result.methods = methods;
    for (DecisionRule r : methods) result.counts[r] = MethodOutcome{};
    if (cfg.n_reps == 0) return result;

    std::vector<RepOutcome> outcomes(cfg.n_reps);
    std::atomic<int> next{0};
    const int n_workers = std::min(resolve_threads(threads), cfg.n_reps);
    auto worker = [&]() {
        while (true) {
            const int rep = next.fetch_add(1);
            if (rep >= cfg.n_reps) break;
            outcomes[rep] = run_one_rep(cfg, methods, spec, derive_seed(cfg.seed, rep));
        }
    };
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    const GroundTruth truth = truth_of(cfg);
    for (const RepOutcome& rep : outcomes) {
        if (rep.failed) {
            ++result.n_failed;
            if (result.failure_messages.size() < 10)
                result.failure_messages.push_back(rep.message);
            continue;
        }
        ++result.n_valid;
        for (size_t i = 0; i < methods.size(); ++i) {
            const CausalDirection dir = rep.decisions[i].direction;
            MethodOutcome& mo = result.counts[methods[i]];
            if (truth == GroundTruth::none) {
                if (dir != CausalDirection::none) ++mo.fp;
            } else {
                const CausalDirection want = truth == GroundTruth::x_to_y
                                                 ? CausalDirection::x_to_y
                                                 : CausalDirection::y_to_x;
                const CausalDirection wrong = truth == GroundTruth::x_to_y
                                                  ? CausalDirection::y_to_x
                                                  : CausalDirection::x_to_y;
                if (dir == want || dir == CausalDirection::both) ++mo.tp;
                if (dir == wrong || dir == CausalDirection::both) ++mo.fp;
            }
        }
    }
    return result;
}

const char* to_string(Scenario s) {
    switch (s) {
        case Scenario::noiseless_unidir: return "noiseless-unidir";
        case Scenario::linear_mixing: return "linear-mixing";
        case Scenario::hidden_cause: return "hidden-cause";
        case Scenario::additive_noise: return "additive-noise";
        case Scenario::long_memory: return "long-memory";
        case Scenario::downsample: return "downsample";
        case Scenario::aggregate: return "aggregate";
    }
    return "?";
}

const char* to_string(NoiseKind k) {
    switch (k) {
        case NoiseKind::independent_white: return "independent-white";
        case NoiseKind::mixed_white: return "mixed-white";
        case NoiseKind::mixed_autocorrelated: return "mixed-autocorrelated";
    }
    return "?";
}

const char* to_string(LatentKind k) {
    return k == LatentKind::independent ? "independent" : "coupled";
}

Scenario scenario_from_string(const std::string& name) {
    if (name == "noiseless-unidir") return Scenario::noiseless_unidir;
    if (name == "linear-mixing") return Scenario::linear_mixing;
    if (name == "hidden-cause") return Scenario::hidden_cause;
    if (name == "additive-noise") return Scenario::additive_noise;
    if (name == "long-memory") return Scenario::long_memory;
    if (name == "downsample") return Scenario::downsample;
    if (name == "aggregate") return Scenario::aggregate;
    throw Error("invalid-config", "unknown scenario '" + name + "'");
}

NoiseKind noise_kind_from_string(const std::string& name) {
    if (name == "independent-white") return NoiseKind::independent_white;
    if (name == "mixed-white") return NoiseKind::mixed_white;
    if (name == "mixed-autocorrelated") return NoiseKind::mixed_autocorrelated;
    throw Error("invalid-config", "unknown noise kind '" + name + "'");
}

LatentKind latent_kind_from_string(const std::string& name) {
    if (name == "independent") return LatentKind::independent;
    if (name == "coupled") return LatentKind::coupled;
    throw Error("invalid-config", "unknown latent kind '" + name + "'");
}

}  // namespace trgc
