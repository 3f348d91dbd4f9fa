#include "trgc/granger.hpp"
#include "trgc/inference.hpp"
#include "trgc/io.hpp"
#include "trgc/scenarios.hpp"
#include "trgc/structural.hpp"
#include "trgc/time_reversal.hpp"
#include "trgc/var_core.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace {

using namespace trgc;

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::string tok;
    std::istringstream ss(csv);
    while (std::getline(ss, tok, ',')) {
        const auto b = tok.find_first_not_of(" \t");
        const auto e = tok.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(tok.substr(b, e - b + 1));
    }
    return out;
}

struct OrderChoice {
    bool bic = false;
    int p = 0;
};

OrderChoice parse_order(const std::string& s) {
    OrderChoice oc;
    if (s == "bic") {
        oc.bic = true;
        return oc;
    }
    try {
        oc.p = std::stoi(s);
    } catch (const std::exception&) {
        throw Error("invalid-config", "--order expects an integer or 'bic'");
    }
    if (oc.p < 1) throw Error("invalid-config", "--order must be >= 1");
    return oc;
}

Json ci_to_json(const ConfidenceInterval& ci) {
    return Json{{"lower", ci.lower}, {"upper", ci.upper}, {"point", ci.point}};
}

Json ftest_to_json(const FTestResult& f) {
    return Json{{"f", f.f_stat},
                {"p_value", f.p_value},
                {"significant", f.significant},
                {"df1", f.df1},
                {"df2", f.df2}};
}

int cmd_simulate(const std::string& model_path, long T, std::uint64_t seed, long burn_in,
                 const std::string& out_path) {
    const VarModel model = model_from_json(read_json_file(model_path));
    Rng rng(seed);
    TimeSeries series = simulate(model, T, rng, burn_in);
    series.seed = seed;
    write_csv(series, out_path);
    return 0;
}

int cmd_reverse(const std::string& in_path, const std::string& out_path) {
    const VarModel model = model_from_json(read_json_file(in_path));
    const VarModel rev = reverse_varp(model);
    write_json_file(model_to_json(rev), out_path);
    return 0;
}

int cmd_analyze(const std::string& in_path, const std::string& order_str, int p_max,
                const std::string& methods_csv, double alpha, int n_boot,
                std::uint64_t seed, const std::string& out_path) {
    const TimeSeries series = read_csv(in_path);
    if (series.dim() < 2) throw Error("schema", "series is missing column 'y'");
    const TimeSeries biv = series.dim() == 2 ? series : series.channels(0, 1);

    const OrderChoice order = parse_order(order_str);
    const int p = order.bic ? select_order_bic(biv, p_max) : order.p;

    std::vector<DecisionRule> methods;
    for (const std::string& name : split_list(methods_csv))
        methods.push_back(rule_from_string(name));
    if (methods.empty()) throw Error("invalid-config", "no methods requested");

    const TrgcResult scores = trgc_from_series(biv, p);

    Json report;
    report["input"] = in_path;
    report["T"] = biv.length();
    report["seed"] = seed;
    report["alpha"] = alpha;
    report["order"] = Json{{"mode", order.bic ? "bic" : "fixed"},
                           {"p_max", order.bic ? p_max : 0},
                           {"selected", p}};
    report["scores"] = Json{{"F_xy", scores.forward.F_xy},
                            {"F_yx", scores.forward.F_yx},
                            {"F_net", scores.forward.F_net},
                            {"Ftil_xy", scores.backward.F_xy},
                            {"Ftil_yx", scores.backward.F_yx},
                            {"Ftil_net", scores.backward.F_net},
                            {"D_xy", scores.D_xy},
                            {"D_yx", scores.D_yx},
                            {"D_net", scores.D_net},
                            {"D_net_full", scores.D_net_full}};

    SignificanceInputs inputs;
    bool wants_bootstrap = false, wants_standard = false;
    for (DecisionRule r : methods) {
        wants_bootstrap |= r != DecisionRule::standard_gc;
        wants_standard |= r == DecisionRule::standard_gc;
    }
    if (wants_bootstrap) {
        BootstrapSpec spec;
        spec.n_boot = n_boot;
        spec.alpha = alpha;
        spec.seed = seed;
        const BootstrapDistribution dist = bootstrap_trgc(biv, p, spec);
        inputs.f_net = dist.ci(BootStatistic::f_net, alpha);
        inputs.ftil_net = dist.ci(BootStatistic::ftil_net, alpha);
        inputs.d_net = dist.ci(BootStatistic::d_net, alpha);
        inputs.d_net_full = dist.ci(BootStatistic::d_net_full, alpha);
        report["n_boot"] = n_boot;
        report["ci"] = Json{{"F_net", ci_to_json(*inputs.f_net)},
                            {"Ftil_net", ci_to_json(*inputs.ftil_net)},
                            {"D_net", ci_to_json(*inputs.d_net)},
                            {"D_net_full", ci_to_json(*inputs.d_net_full)}};
    }
    if (wants_standard) {
        inputs.f_tests = f_test_gc(biv, p, alpha);
        report["f_test"] = Json{{"x_to_y", ftest_to_json(inputs.f_tests->x_to_y)},
                                {"y_to_x", ftest_to_json(inputs.f_tests->y_to_x)}};
    }

    Json decisions;
    for (DecisionRule r : methods)
        decisions[to_string(r)] = to_string(decide(scores, r, inputs).direction);
    report["decisions"] = decisions;

    if (out_path.empty())
        std::cout << report.dump(2) << "\n";
    else
        write_json_file(report, out_path);
    return 0;
}

// ---- experiment config -------------------------------------------------

struct ExperimentSetup {
    ScenarioConfig base;
    AnalysisSpec spec;
    std::vector<DecisionRule> methods{DecisionRule::standard_gc, DecisionRule::net_gc,
                                      DecisionRule::diff_trgc};
    std::string grid_key;           // "", "gamma", "tau", "T", "sigma_A"
    std::vector<double> grid_values;
    std::string raw_text;
};

ExperimentSetup parse_experiment_config(const std::string& path) {
    ExperimentSetup setup;
    setup.raw_text = read_text_file(path);

    std::map<std::string, std::string> kv;
    std::istringstream in(setup.raw_text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw Error("invalid-config",
                            "line " + std::to_string(lineno) + ": expected 'key = value'");
            continue;
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    auto grab = [&](const char* key) -> std::optional<std::string> {
        const auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        return it->second;
    };
    auto numbers = [&](const std::string& v) {
        std::vector<double> out;
        for (const std::string& tok : split_list(v)) {
            try {
                out.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw Error("invalid-config", "cannot parse number '" + tok + "'");
            }
        }
        if (out.empty()) throw Error("invalid-config", "empty value list");
        return out;
    };
    auto scalar_or_grid = [&](const char* key, double& slot) {
        const auto v = grab(key);
        if (!v) return;
        const std::vector<double> vals = numbers(*v);
        if (vals.size() == 1) {
            slot = vals[0];
            return;
        }
        if (!setup.grid_key.empty())
            throw Error("invalid-config", "only one key may hold a value list (found lists for '" +
                                              setup.grid_key + "' and '" + key + "')");
        setup.grid_key = key;
        setup.grid_values = vals;
    };

    if (const auto v = grab("scenario")) setup.base.scenario = scenario_from_string(*v);
    if (const auto v = grab("noise_kind")) setup.base.noise_kind = noise_kind_from_string(*v);
    if (const auto v = grab("latent")) setup.base.latent = latent_kind_from_string(*v);
    if (const auto v = grab("seed")) setup.base.seed = std::stoull(*v);
    if (const auto v = grab("n_reps")) setup.base.n_reps = std::stoi(*v);
    if (const auto v = grab("p_gen")) setup.base.p_gen = std::stoi(*v);
    if (const auto v = grab("methods")) {
        setup.methods.clear();
        for (const std::string& name : split_list(*v))
            setup.methods.push_back(rule_from_string(name));
    }
    if (const auto v = grab("alpha")) setup.spec.alpha = std::stod(*v);
    if (const auto v = grab("n_boot")) setup.spec.n_boot = std::stoi(*v);
    if (const auto v = grab("p_max")) setup.spec.p_max = std::stoi(*v);
    if (const auto v = grab("order")) {
        const OrderChoice oc = parse_order(*v);
        setup.spec.order = oc.bic ? 0 : oc.p;
    }

    // hidden-cause and decimation runs draw stronger coefficients by default
    if (!kv.count("sigma_A") && (setup.base.scenario == Scenario::hidden_cause ||
                                 setup.base.scenario == Scenario::downsample ||
                                 setup.base.scenario == Scenario::aggregate))
        setup.base.sigma_A = 0.3;

    double t_slot = static_cast<double>(setup.base.T);
    double tau_slot = setup.base.tau;
    scalar_or_grid("gamma", setup.base.gamma);
    scalar_or_grid("tau", tau_slot);
    scalar_or_grid("T", t_slot);
    scalar_or_grid("sigma_A", setup.base.sigma_A);
    setup.base.T = static_cast<long>(t_slot);
    setup.base.tau = static_cast<int>(tau_slot);

    static const char* known[] = {"scenario", "noise_kind", "latent", "seed",   "n_reps",
                                  "p_gen",    "methods",    "alpha",  "n_boot", "p_max",
                                  "order",    "gamma",      "tau",    "T",      "sigma_A"};
    for (const auto& [key, value] : kv) {
        bool ok = false;
        for (const char* k : known) ok |= key == k;
        if (!ok) throw Error("invalid-config", "unknown config key '" + key + "'");
    }
    return setup;
}

ScenarioConfig with_condition(const ScenarioConfig& base, const std::string& key, double value) {
    ScenarioConfig cfg = base;
    if (key == "gamma") cfg.gamma = value;
    else if (key == "tau") cfg.tau = static_cast<int>(value);
    else if (key == "T") cfg.T = static_cast<long>(value);
    else if (key == "sigma_A") cfg.sigma_A = value;
    return cfg;
}

int cmd_experiment(const std::string& config_path, const std::string& out_prefix) {
    const ExperimentSetup setup = parse_experiment_config(config_path);

    std::vector<std::pair<std::string, ScenarioConfig>> conditions;
    if (setup.grid_key.empty()) {
        conditions.emplace_back("-", setup.base);
    } else {
        for (double v : setup.grid_values)
            conditions.emplace_back(setup.grid_key + "=" + format_double(v),
                                    with_condition(setup.base, setup.grid_key, v));
    }

    std::ostringstream csv;
    csv << "scenario,method,condition,tpr,fpr,n\n";
    Json results = Json::array();
    for (const auto& [label, cfg] : conditions) {
        const ExperimentResult res = run_experiment(cfg, setup.methods, setup.spec);
        Json entry;
        entry["condition"] = label;
        entry["n_valid"] = res.n_valid;
        entry["n_failed"] = res.n_failed;
        if (!res.failure_messages.empty()) entry["failures"] = res.failure_messages;
        Json per_method;
        for (DecisionRule r : setup.methods) {
            const MethodOutcome& mo = res.counts.at(r);
            per_method[to_string(r)] = Json{{"tp", mo.tp},
                                            {"fp", mo.fp},
                                            {"tpr", res.tp_rate(r)},
                                            {"fpr", res.fp_rate(r)}};
            csv << to_string(cfg.scenario) << "," << to_string(r) << "," << label << ","
                << format_double(res.tp_rate(r)) << "," << format_double(res.fp_rate(r))
                << "," << res.n_valid << "\n";
        }
        entry["methods"] = per_method;
        results.push_back(entry);
    }

    Json out;
    out["config_file"] = config_path;
    out["config_text"] = setup.raw_text;
    out["scenario"] = to_string(setup.base.scenario);
    out["seed"] = setup.base.seed;
    out["results"] = results;

    write_text_file(csv.str(), out_prefix + ".csv");
    write_json_file(out, out_prefix + ".json");
    return 0;
}

int cmd_convert(const std::string& in_path, const std::string& out_path) {
    const Json j = read_json_file(in_path);
    VarModel model;
    if (j.contains("Gamma0"))
        model = svar_to_var(svar_from_json(j));
    else if (j.contains("M"))
        model = mixture_to_var(mixture_from_json(j));
    else
        throw Error("schema", "input is neither an SVAR ('Gamma0') nor a mixture ('M') model");
    write_json_file(model_to_json(model), out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-reversed Granger causality for bivariate VAR processes"};
    app.require_subcommand(1);

    std::string model_path, in_path, out_path, config_path;
    std::string order_str = "bic";
    std::string methods_csv = "standard-gc,net-gc,diff-trgc";
    long T = 2000, burn_in = 1000;
    std::uint64_t seed = 0;
    double alpha = 0.05;
    int n_boot = 500, p_max = 10;

    CLI::App* sim = app.add_subcommand("simulate", "simulate a VAR model to CSV");
    sim->add_option("--model", model_path, "model JSON")->required();
    sim->add_option("--T", T, "number of samples");
    sim->add_option("--seed", seed, "RNG seed");
    sim->add_option("--burnin", burn_in, "discarded leading samples");
    sim->add_option("--out", out_path, "output CSV")->required();

    CLI::App* rev = app.add_subcommand("reverse", "time-reverse a VAR model");
    rev->add_option("--in", in_path, "model JSON")->required();
    rev->add_option("--out", out_path, "output model JSON")->required();

    CLI::App* ana = app.add_subcommand("analyze", "score a bivariate series");
    ana->add_option("--in", in_path, "series CSV")->required();
    ana->add_option("--order", order_str, "lag order (integer or 'bic')");
    ana->add_option("--p-max", p_max, "maximum order for BIC");
    ana->add_option("--method", methods_csv, "comma-separated decision rules");
    ana->add_option("--alpha", alpha, "significance level");
    ana->add_option("--boot", n_boot, "bootstrap samples");
    ana->add_option("--seed", seed, "RNG seed");
    ana->add_option("--out", out_path, "report JSON (stdout if omitted)");

    CLI::App* exp = app.add_subcommand("experiment", "run a scenario experiment");
    exp->add_option("--config", config_path, "experiment config file")->required();
    exp->add_option("--out", out_path, "output prefix (.csv and .json)")->required();

    CLI::App* conv = app.add_subcommand("convert", "convert SVAR/mixture JSON to model JSON");
    conv->add_option("--in", in_path, "SVAR or mixture JSON")->required();
    conv->add_option("--out", out_path, "output model JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(model_path, T, seed, burn_in, out_path);
        if (rev->parsed()) return cmd_reverse(in_path, out_path);
        if (ana->parsed())
            return cmd_analyze(in_path, order_str, p_max, methods_csv, alpha, n_boot, seed,
                               out_path);
        if (exp->parsed()) return cmd_experiment(config_path, out_path);
        if (conv->parsed()) return cmd_convert(in_path, out_path);
    } catch (const trgc::Error& e) {
        std::cerr << "error[" << e.category() << "]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error[internal]: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
