#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "trgc/io.hpp"
#include "trgc/rng.hpp"
#include "trgc/var_core.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace trgc;
namespace fs = std::filesystem;

namespace {

Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("trgc_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

struct RunResult {
    int exit_code = 0;
    std::string out;
    std::string err;
};

RunResult run_cli(const TempDir& dir, const std::string& args) {
    const std::string out_file = dir.file("stdout.txt");
    const std::string err_file = dir.file("stderr.txt");
    const std::string cmd = std::string(TRGC_CLI_PATH) + " " + args + " > " + out_file +
                            " 2> " + err_file;
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_text_file(out_file);
    r.err = read_text_file(err_file);
    return r;
}

VarModel example_model() {
    VarModel m;
    m.p = 1;
    m.d = 2;
    m.coeffs = {mat2(0.5, 0.1, 0.4, 0.3)};
    m.resid_cov = mat2(1.0, 0.2, 0.2, 0.8);
    return m;
}

}  // namespace

TEST_CASE("CSV round-trip is bit exact") {
    TempDir dir;
    Rng rng(3);
    std::normal_distribution<double> gauss(0.0, 1.0);
    TimeSeries s;
    s.values.resize(64, 2);
    for (long t = 0; t < s.length(); ++t) {
        s.values(t, 0) = gauss(rng) * std::pow(10.0, static_cast<int>(rng() % 17) - 8);
        s.values(t, 1) = gauss(rng);
    }
    s.values(0, 0) = 0.1;  // not representable exactly, classic round-trip trap
    s.values(1, 0) = 1.0 / 3.0;
    s.seed = 123456789ULL;

    const std::string path = dir.file("series.csv");
    write_csv(s, path);
    const TimeSeries back = read_csv(path);
    REQUIRE(back.length() == s.length());
    CHECK((back.values - s.values).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(back.seed.has_value());
    CHECK(*back.seed == 123456789ULL);
}

TEST_CASE("model JSON round-trip is bit exact") {
    TempDir dir;
    VarModel m = example_model();
    m.coeffs[0](0, 0) = 0.1 + 1e-17;
    const std::string path = dir.file("model.json");
    write_json_file(model_to_json(m), path);
    const VarModel back = model_from_json(read_json_file(path));
    CHECK((back.coeffs[0] - m.coeffs[0]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.resid_cov - m.resid_cov).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("malformed inputs raise schema errors") {
    TempDir dir;
    const std::string path = dir.file("bad.csv");
    write_text_file("a,b\n1,2\n", path);
    CHECK_THROWS_AS(read_csv(path), Error);

    const std::string j = dir.file("bad.json");
    write_text_file("{\"p\": 1, \"d\": 2}", j);
    CHECK_THROWS_AS(model_from_json(read_json_file(j)), Error);
}

TEST_CASE("simulate writes a seeded, reproducible CSV") {
    TempDir dir;
    write_json_file(model_to_json(example_model()), dir.file("model.json"));
    const std::string args = "simulate --model " + dir.file("model.json") +
                             " --T 100 --seed 7 --out " + dir.file("a.csv");
    CHECK(run_cli(dir, args).exit_code == 0);
    const std::string a = read_text_file(dir.file("a.csv"));
    CHECK(a.find("# seed=7") != std::string::npos);
    CHECK(a.find("t,x,y") != std::string::npos);

    const std::string args2 = "simulate --model " + dir.file("model.json") +
                              " --T 100 --seed 7 --out " + dir.file("b.csv");
    CHECK(run_cli(dir, args2).exit_code == 0);
    CHECK(read_text_file(dir.file("b.csv")) == a);

    const TimeSeries s = read_csv(dir.file("a.csv"));
    CHECK(s.length() == 100);
    CHECK(s.dim() == 2);
}

TEST_CASE("simulate rejects an unstable model with a category") {
    TempDir dir;
    VarModel bad = example_model();
    bad.coeffs[0] = mat2(1.1, 0, 0, 0.3);
    write_json_file(model_to_json(bad), dir.file("bad.json"));
    const RunResult r = run_cli(dir, "simulate --model " + dir.file("bad.json") +
                                         " --T 50 --out " + dir.file("x.csv"));
    CHECK(r.exit_code != 0);
    CHECK(r.err.find("error[unstable-model]") != std::string::npos);
}

TEST_CASE("reverse is a semantic involution and fixes diagonal models") {
    TempDir dir;
    write_json_file(model_to_json(example_model()), dir.file("m.json"));
    CHECK(run_cli(dir, "reverse --in " + dir.file("m.json") + " --out " + dir.file("r.json"))
              .exit_code == 0);
    CHECK(run_cli(dir, "reverse --in " + dir.file("r.json") + " --out " + dir.file("rr.json"))
              .exit_code == 0);
    const VarModel twice = model_from_json(read_json_file(dir.file("rr.json")));
    const VarModel orig = example_model();
    CHECK((twice.coeffs[0] - orig.coeffs[0]).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((twice.resid_cov - orig.resid_cov).cwiseAbs().maxCoeff() < 1e-8);

    VarModel diag = example_model();
    diag.coeffs[0] = mat2(0.5, 0, 0, 0.3);
    diag.resid_cov = mat2(1.0, 0, 0, 0.8);
    write_json_file(model_to_json(diag), dir.file("d.json"));
    CHECK(run_cli(dir, "reverse --in " + dir.file("d.json") + " --out " + dir.file("dr.json"))
              .exit_code == 0);
    const VarModel fixed = model_from_json(read_json_file(dir.file("dr.json")));
    CHECK((fixed.coeffs[0] - diag.coeffs[0]).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("analyze emits the full score report and is seed-stable") {
    TempDir dir;
    write_json_file(model_to_json(example_model()), dir.file("m.json"));
    REQUIRE(run_cli(dir, "simulate --model " + dir.file("m.json") +
                             " --T 600 --seed 3 --out " + dir.file("s.csv"))
                .exit_code == 0);
    const std::string args = "analyze --in " + dir.file("s.csv") +
                             " --order 2 --boot 150 --seed 5 --method "
                             "standard-gc,net-gc,diff-trgc,conj-trgc,net-and-diff-trgc,"
                             "diff-trgc-full --out " +
                             dir.file("rep.json");
    REQUIRE(run_cli(dir, args).exit_code == 0);
    const Json rep = read_json_file(dir.file("rep.json"));
    for (const char* key : {"F_xy", "F_yx", "F_net", "Ftil_xy", "Ftil_yx", "D_xy", "D_yx",
                            "D_net", "D_net_full"})
        CHECK(rep["scores"].contains(key));
    CHECK(rep["decisions"].size() == 6);
    CHECK(rep["order"]["selected"] == 2);

    const std::string first = read_text_file(dir.file("rep.json"));
    REQUIRE(run_cli(dir, "analyze --in " + dir.file("s.csv") +
                             " --order 2 --boot 150 --seed 5 --method "
                             "standard-gc,net-gc,diff-trgc,conj-trgc,net-and-diff-trgc,"
                             "diff-trgc-full --out " +
                             dir.file("rep2.json"))
                .exit_code == 0);
    CHECK(read_text_file(dir.file("rep2.json")) == first);
}

TEST_CASE("analyze reports the missing column by name") {
    TempDir dir;
    write_text_file("t,x\n0,1.5\n1,-0.5\n2,0.25\n", dir.file("one.csv"));
    const RunResult r =
        run_cli(dir, "analyze --in " + dir.file("one.csv") + " --order 1");
    CHECK(r.exit_code != 0);
    CHECK(r.err.find("error[schema]") != std::string::npos);
    CHECK(r.err.find("'y'") != std::string::npos);
}

TEST_CASE("convert reproduces the worked example from both forms") {
    TempDir dir;
    const Json svar = {{"p", 1},
                       {"d", 2},
                       {"Gamma0", {{0.0, 0.0}, {0.6, 0.0}}},
                       {"Gamma", {{{0.7, 0.0}, {-0.54, 0.9}}}},
                       {"Sigma", {{1.0, 0.0}, {0.0, 0.64}}}};
    write_json_file(svar, dir.file("svar.json"));
    REQUIRE(run_cli(dir, "convert --in " + dir.file("svar.json") + " --out " +
                             dir.file("m1.json"))
                .exit_code == 0);
    const VarModel m1 = model_from_json(read_json_file(dir.file("m1.json")));
    CHECK((m1.coeffs[0] - mat2(0.7, 0, -0.12, 0.9)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((m1.resid_cov - mat2(1.0, 0.6, 0.6, 1.0)).cwiseAbs().maxCoeff() < 1e-12);

    const Json mix = {{"p", 1},
                      {"d", 2},
                      {"M", {{1.0, 0.0}, {0.6, 0.8}}},
                      {"B", {{{0.7, 0.0}, {0.0, 0.9}}}},
                      {"Sigma", {{1.0, 0.0}, {0.0, 1.0}}}};
    write_json_file(mix, dir.file("mix.json"));
    REQUIRE(run_cli(dir, "convert --in " + dir.file("mix.json") + " --out " +
                             dir.file("m2.json"))
                .exit_code == 0);
    const VarModel m2 = model_from_json(read_json_file(dir.file("m2.json")));
    CHECK((m2.coeffs[0] - m1.coeffs[0]).cwiseAbs().maxCoeff() < 1e-12);

    SUBCASE("nonzero Gamma0 diagonal is rejected") {
        Json bad = svar;
        bad["Gamma0"][0][0] = 0.2;
        write_json_file(bad, dir.file("bad.json"));
        const RunResult r =
            run_cli(dir, "convert --in " + dir.file("bad.json") + " --out " + dir.file("o.json"));
        CHECK(r.exit_code != 0);
        CHECK(r.err.find("error[invalid-argument]") != std::string::npos);
    }
    SUBCASE("singular mixing matrix is rejected") {
        Json bad = mix;
        bad["M"] = {{1.0, 2.0}, {2.0, 4.0}};
        write_json_file(bad, dir.file("badm.json"));
        const RunResult r = run_cli(
            dir, "convert --in " + dir.file("badm.json") + " --out " + dir.file("o.json"));
        CHECK(r.exit_code != 0);
        CHECK(r.err.find("error[singular-matrix]") != std::string::npos);
    }
}

TEST_CASE("experiment emits one CSV row per method and condition") {
    TempDir dir;
    write_text_file(
        "scenario = additive-noise\n"
        "latent = independent\n"
        "noise_kind = independent-white\n"
        "T = 400\n"
        "gamma = 0, 0.5\n"
        "n_reps = 4\n"
        "seed = 9\n"
        "order = 2\n"
        "n_boot = 120\n"
        "methods = net-gc, diff-trgc\n",
        dir.file("exp.cfg"));
    REQUIRE(run_cli(dir, "experiment --config " + dir.file("exp.cfg") + " --out " +
                             dir.file("res"))
                .exit_code == 0);
    const std::string csv = read_text_file(dir.file("res.csv"));
    CHECK(csv.find("scenario,method,condition,tpr,fpr,n") == 0);
    int rows = 0;
    for (char c : csv) rows += c == '\n';
    CHECK(rows == 1 + 2 * 2);  // header + methods x gamma grid

    const Json res = read_json_file(dir.file("res.json"));
    CHECK(res["config_text"].get<std::string>().find("gamma = 0, 0.5") != std::string::npos);
    CHECK(res["results"].size() == 2);
    CHECK(res["results"][0]["n_valid"] == 4);

    SUBCASE("a rerun is byte identical") {
        REQUIRE(run_cli(dir, "experiment --config " + dir.file("exp.cfg") + " --out " +
                                 dir.file("res2"))
                    .exit_code == 0);
        CHECK(read_text_file(dir.file("res2.csv")) == read_text_file(dir.file("res.csv")));
        CHECK(read_text_file(dir.file("res2.json")) == read_text_file(dir.file("res.json")));
    }
}

TEST_CASE("experiment config rejects unknown keys and double grids") {
    TempDir dir;
    write_text_file("scenario = additive-noise\nbogus = 1\n", dir.file("a.cfg"));
    RunResult r = run_cli(dir, "experiment --config " + dir.file("a.cfg") + " --out " +
                                   dir.file("o"));
    CHECK(r.exit_code != 0);
    CHECK(r.err.find("error[invalid-config]") != std::string::npos);

    write_text_file("scenario = additive-noise\ngamma = 0,1\nT = 100,200\n", dir.file("b.cfg"));
    r = run_cli(dir, "experiment --config " + dir.file("b.cfg") + " --out " + dir.file("o"));
    CHECK(r.exit_code != 0);
    CHECK(r.err.find("error[invalid-config]") != std::string::npos);
}
