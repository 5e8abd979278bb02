#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "islab/config.hpp"
#include "islab/errors.hpp"
#include "islab/harness.hpp"
#include "islab/report.hpp"
#include "islab/rng.hpp"
#include "islab/suites.hpp"

using namespace islab;

namespace {
std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
}  // namespace

TEST_CASE("config parsing") {
    const RunConfig cfg = parse_config_text(
        "# example\n"
        "kappa = 0.5\n"
        "lambda0 = 0.8\n"
        "n_cells = 64\n"
        "b0 = 0.0\n"
        "x_far = 2.0\n"
        "T = 0.5\n"
        "cfl = 0.3\n"
        "seed = 42\n"
        "output_dir = out_test\n");
    CHECK(cfg.kappa == 0.5);
    CHECK(cfg.n_cells == 64);
    CHECK(cfg.seed == 42);
    CHECK(cfg.constants().tau_pi == doctest::Approx(0.5 / 2.0));

    CHECK_THROWS_WITH_AS(parse_config_text("kappa = 1\nwhatever = 3\n"),
                         doctest::Contains("unknown key 'whatever'"), spec_error);
    CHECK_THROWS_AS(parse_config_text("kappa = banana\n"), spec_error);
    CHECK_THROWS_AS(parse_config_text("T = -1\n"), spec_error);
    CHECK_THROWS_AS(parse_config_text("n_cells = 8\n"), spec_error);
    CHECK_THROWS_AS(parse_config_text("cfl = 1.5\n"), spec_error);
}

TEST_CASE("real formatting round-trips") {
    CounterRng rng(99);
    for (int i = 0; i < 200; ++i) {
        const double x = rng.normal() * std::pow(10.0, rng.uniform(-12, 12));
        const std::string s = format_real(x);
        CHECK(std::stod(s) == x);
    }
}

TEST_CASE("counter rng is a pure function of seed and counter") {
    CounterRng a(1234), b(1234);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    CounterRng c(1235);
    CHECK(a.next_u64() != c.next_u64());
}

TEST_CASE("suite registry") {
    const auto& reg = suite_registry();
    CHECK(reg.size() >= 9);
    for (const char* name :
         {"identities", "spectra", "elliptic-ratios", "embeddings", "energy-growth",
          "gronwall", "causality", "decay", "orders"})
        CHECK(is_suite(name));
    CHECK_FALSE(is_suite("nonsense"));

    const std::string listing = list_suites_text();
    CHECK(listing.find("identities") != std::string::npos);
    CHECK(listing.find("gronwall") != std::string::npos);

    RunConfig cfg;
    cfg.experiment = "verify";
    const SuiteResult fast = run_suite("orders", cfg);
    CHECK(fast.pass());
    CHECK_THROWS_AS(run_suite("nonsense", cfg), spec_error);
}

TEST_CASE("experiments are deterministic byte for byte") {
    RunConfig cfg;
    cfg.n_cells = 48;
    cfg.T = 0.02;
    cfg.seed = 5;
    cfg.kappa = 1.0;

    const std::string dir1 = "harness_test_out1";
    const std::string dir2 = "harness_test_out2";
    cfg.output_dir = dir1;
    CHECK(experiment_simulate_linearized(cfg) == 0);
    cfg.output_dir = dir2;
    CHECK(experiment_simulate_linearized(cfg) == 0);
    CHECK(slurp(dir1 + "/energy.csv") == slurp(dir2 + "/energy.csv"));
    CHECK(slurp(dir1 + "/norms.json") == slurp(dir2 + "/norms.json"));
    CHECK(!slurp(dir1 + "/energy.csv").empty());

    cfg.output_dir = dir1;
    CHECK(experiment_norms(cfg) == 0);
    const std::string norms1 = slurp(dir1 + "/norms.json");
    cfg.output_dir = dir2;
    CHECK(experiment_norms(cfg) == 0);
    CHECK(norms1 == slurp(dir2 + "/norms.json"));

    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
}

TEST_CASE("nonlinear simulate experiment writes artifacts") {
    RunConfig cfg;
    cfg.n_cells = 48;
    cfg.T = 0.02;
    cfg.seed = 9;
    cfg.output_dir = "harness_test_out3";
    CHECK(experiment_simulate_nonlinear(cfg) == 0);
    const std::string snap = slurp(cfg.output_dir + "/snapshots.csv");
    CHECK(snap.rfind("t,x,r,u0,u1,u2,u3,pi,interior_mask", 0) == 0);
    const std::string meta = slurp(cfg.output_dir + "/run_metadata.json");
    CHECK(meta.find("pinned-to-background") != std::string::npos);
    CHECK(meta.find("splitmix64-counter") != std::string::npos);
    std::filesystem::remove_all(cfg.output_dir);
}
