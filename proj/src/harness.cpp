#include "islab/harness.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include "islab/elliptic_ops.hpp"
#include "islab/errors.hpp"
#include "islab/linearized_system.hpp"
#include "islab/report.hpp"
#include "islab/rng.hpp"
#include "islab/suites.hpp"
#include "islab/weighted_spaces.hpp"

namespace islab {

namespace {

Json metadata_json(const RunConfig& cfg, double dt) {
    Json m;
    m["kappa"] = cfg.kappa;
    m["lambda0"] = cfg.lambda0;
    m["tau_pi"] = cfg.constants().tau_pi;
    m["zeta"] = "rho^(2 kappa + 1)";
    m["lambda"] = "lambda0 / (1 + rho)";
    m["grid"] = {{"n_cells", cfg.n_cells}, {"b0", cfg.b0}, {"x_far", cfg.x_far}};
    m["time"] = {{"T", cfg.T}, {"cfl", cfg.cfl}, {"dt", dt}};
    m["seed"] = cfg.seed;
    m["far_boundary"] = "pinned-to-background";  // artificial right edge
    m["rng"] = "splitmix64-counter";
    return m;
}

// Seeded physical-vacuum initial data; shared by the simulate experiments.
struct InitialData {
    FieldState state;
    std::function<std::array<double, 3>(double, double)> far_values;
};

InitialData seeded_initial_data(const RunConfig& cfg, const MovingGrid& g) {
    CounterRng rng(cfg.seed, 1);
    const double s = rng.uniform(0.15, 0.28);
    const double gam = rng.uniform(0.0, 0.3);
    const double a00 = rng.uniform(0.7, 1.5);
    const double beta = rng.uniform(0.05, 0.25);
    const double b0 = cfg.b0;
    const double len = cfg.x_far - cfg.b0;
    auto r0 = [s, gam, b0, len](double x) {
        const double d = (x - b0) / len;
        return s * d * (1.0 + gam * d) / (1.0 + gam);
    };
    auto pi0 = [a00, r0, b0, len](double x) {
        const double d = (x - b0) / len;
        return a00 * (1.0 + 0.1 * std::sin(3.14159265358979324 * d)) * r0(x);
    };
    auto u0 = [beta, b0, len](double x) {
        const double d = (x - b0) / len;
        return beta * d * (1.0 - d) * (1.0 - d);
    };
    InitialData out;
    out.state.r.resize(g.n_cells);
    out.state.u1.resize(g.n_cells);
    out.state.pi.resize(g.n_cells);
    for (int q = 0; q < g.n_cells; ++q) {
        const double x = g.nodes[q];
        out.state.r[q] = r0(x);
        out.state.u1[q] = u0(x);
        out.state.pi[q] = pi0(x);
    }
    out.far_values = [r0, u0, pi0](double, double x) {
        return std::array<double, 3>{r0(x), u0(x), pi0(x)};
    };
    return out;
}

}  // namespace

int experiment_simulate_nonlinear(const RunConfig& cfg) {
    ensure_directory(cfg.output_dir);
    const ModelConstants c = cfg.constants();
    MovingGrid g = MovingGrid::uniform(cfg.b0, cfg.x_far, cfg.n_cells);
    const InitialData init = seeded_initial_data(cfg, g);
    const double dt = cfl_dt(g, cfg.cfl);
    EvolutionOptions opt;
    opt.cfl = cfg.cfl;
    opt.far_pin = FarPin::background;
    opt.far_values = init.far_values;

    write_json(cfg.output_dir + "/run_metadata.json", metadata_json(cfg, dt));

    const int nsteps = static_cast<int>(std::llround(cfg.T / dt));
    const int stride = std::max(1, nsteps / 10);
    CsvWriter csv({"t", "x", "r", "u0", "u1", "u2", "u3", "pi", "interior_mask"});
    FieldState s = init.state;
    double t = 0.0;
    auto emit = [&]() {
        for (int q = 0; q < g.n_cells; ++q) {
            const double u0v = std::sqrt(1.0 + s.u1[q] * s.u1[q]);
            csv.add_row({t, g.nodes[q], s.r[q], u0v, s.u1[q], 0.0, 0.0, s.pi[q],
                         static_cast<double>(g.interior_mask[q])});
        }
    };
    emit();
    for (int step = 0; step < nsteps; ++step) {
        rk4_step(s, g, t, dt, c, opt);
        if ((step + 1) % stride == 0 || step + 1 == nsteps) emit();
    }
    csv.write(cfg.output_dir + "/snapshots.csv");

    CsvWriter gridcsv({"t", "x", "interior_mask"});
    for (int q = 0; q < g.n_cells; ++q)
        gridcsv.add_row({t, g.nodes[q], static_cast<double>(g.interior_mask[q])});
    gridcsv.write(cfg.output_dir + "/grid.csv");
    return 0;
}

int experiment_simulate_linearized(const RunConfig& cfg) {
    ensure_directory(cfg.output_dir);
    const ModelConstants c = cfg.constants();
    const MovingGrid g = MovingGrid::uniform(cfg.b0, cfg.x_far, cfg.n_cells);
    const InitialData init = seeded_initial_data(cfg, g);
    const double dt = cfl_dt(g, cfg.cfl);
    LinearizedRunOptions opt;
    opt.cfl = cfg.cfl;
    opt.bg.far_pin = FarPin::background;
    opt.bg.far_values = init.far_values;

    PerturbationState p;
    p.r_t.resize(g.n_cells);
    p.u1_t.resize(g.n_cells);
    p.pi_t.resize(g.n_cells);
    CounterRng rng(cfg.seed, 2);
    const double x0 = rng.uniform(0.35, 0.65) * (cfg.x_far - cfg.b0) + cfg.b0;
    for (int q = 0; q < g.n_cells; ++q) {
        const double sdev = 0.07 * (cfg.x_far - cfg.b0);
        const double z = (g.nodes[q] - x0) / sdev;
        p.r_t[q] = std::exp(-z * z);
        p.u1_t[q] = 0.5 * std::exp(-z * z);
        p.pi_t[q] = 0.3 * std::exp(-z * z);
    }

    write_json(cfg.output_dir + "/run_metadata.json", metadata_json(cfg, dt));
    const LinearizedRun run = evolve_linearized(p, init.state, g, cfg.T, dt, c, opt);

    CsvWriter energy({"t", "E", "H_norm", "source_norm", "K_measured"});
    for (std::size_t i = 0; i < run.times.size(); ++i)
        energy.add_row({run.times[i], run.energy[i], run.h_norm[i], run.source_norm[i],
                        run.K_measured});
    energy.write(cfg.output_dir + "/energy.csv");

    Json norms = Json::array();
    for (std::size_t i = 0; i < run.times.size(); i += std::max<std::size_t>(
                                                      1, run.times.size() / 20)) {
        const LinearizedState ls = to_linearized_state(run.perturbation[i], run.background[i]);
        const TransformedState ts = to_transformed_state(run.background[i]);
        const StateNormReport rep = base_space_norm(ls, ts.r, c.kappa, run.grids[i]);
        Json j;
        j["t"] = run.times[i];
        j["E"] = run.energy[i];
        j["H_norm"] = rep.total;
        j["components"] = {{"r", rep.r_norm}, {"u", rep.u_norm}, {"pi", rep.pi_norm}};
        norms.push_back(j);
    }
    write_json(cfg.output_dir + "/norms.json", norms);
    return 0;
}

int experiment_spectrum(const RunConfig& cfg) {
    ensure_directory(cfg.output_dir);
    EllipticBackground1D bg{[&cfg](double x) { return x - cfg.b0; },
                            [](double) { return 0.2; }};
    const MovingGrid g = MovingGrid::uniform(cfg.b0, cfg.x_far, cfg.n_cells);
    std::vector<double> r_bg(g.n_cells);
    for (int q = 0; q < g.n_cells; ++q) r_bg[q] = bg.r(g.nodes[q]);
    CounterRng rng(cfg.seed, 12);
    Json out = Json::array();
    for (const bool vector_sector : {false, true}) {
        const DiscreteOperator op = vector_sector
                                        ? assemble_l23hat_1d(bg, g, cfg.kappa)
                                        : assemble_l1hat_1d(bg, g, cfg.kappa);
        const SpectrumReport rep = spectrum_dense(op);
        // elliptic-estimate ratio over a small random smooth ensemble
        double max_ratio = 0.0;
        const double shi = vector_sector ? 0.5 / cfg.kappa + 1.0 : 0.5 / cfg.kappa + 0.5;
        const double slo = vector_sector ? 0.5 / cfg.kappa : 0.5 / cfg.kappa - 0.5;
        for (int s = 0; s < 16; ++s) {
            std::vector<double> f(g.n_cells);
            double coef[4];
            for (double& cc : coef) cc = rng.normal();
            for (int q = 0; q < g.n_cells; ++q) {
                const double xs = (g.nodes[q] - cfg.b0) / (cfg.x_far - cfg.b0);
                double acc = 0.0;
                for (int k = 1; k <= 4; ++k)
                    acc += coef[k - 1] * std::sin(k * 3.14159265358979324 * xs);
                f[q] = acc;
            }
            const auto lf = vector_sector ? apply_L2_tilde_1d(f, bg, g, cfg.kappa)
                                          : apply_L1_tilde_1d(f, bg, g, cfg.kappa);
            const double num = hjsigma_norm(f, {2, shi}, r_bg, g);
            const double den = hjsigma_norm(lf, {0, slo}, r_bg, g) +
                               hjsigma_norm(f, {0, slo}, r_bg, g);
            if (den > 0.0) max_ratio = std::max(max_ratio, num / den);
        }
        Json j;
        j["operator"] = vector_sector ? "l23hat" : "l1hat";
        j["kappa"] = cfg.kappa;
        j["h"] = g.h();
        j["min_eig"] = rep.min_eig;
        j["max_eig"] = rep.max_eig;
        j["sym_defect"] = rep.sym_defect;
        j["max_ratio"] = max_ratio;
        j["method"] = rep.method;
        out.push_back(j);
    }
    write_json(cfg.output_dir + "/spectrum.json", out);
    return 0;
}

int experiment_norms(const RunConfig& cfg) {
    ensure_directory(cfg.output_dir);
    const ModelConstants c = cfg.constants();
    const MovingGrid g = MovingGrid::uniform(cfg.b0, cfg.x_far, cfg.n_cells);
    const InitialData init = seeded_initial_data(cfg, g);
    const TransformedState ts = to_transformed_state(init.state);

    CounterRng rng(cfg.seed, 3);
    std::vector<LinearizedState> ensemble;
    for (int s = 0; s < 32; ++s) {
        LinearizedState ls;
        ls.r_t.resize(g.n_cells);
        ls.pi_t.resize(g.n_cells);
        ls.u_t.resize(g.n_cells);
        double cr[4], cu[4], cp[4];
        for (int k = 0; k < 4; ++k) {
            cr[k] = rng.normal();
            cu[k] = rng.normal();
            cp[k] = rng.normal();
        }
        for (int q = 0; q < g.n_cells; ++q) {
            const double xs = (g.nodes[q] - cfg.b0) / (cfg.x_far - cfg.b0);
            double vr = 0, vu = 0, vp = 0;
            for (int k = 1; k <= 4; ++k) {
                vr += cr[k - 1] * std::sin(k * 3.14159265358979324 * xs);
                vu += cu[k - 1] * std::sin(k * 3.14159265358979324 * xs);
                vp += cp[k - 1] * std::sin(k * 3.14159265358979324 * xs);
            }
            ls.r_t[q] = vr;
            ls.pi_t[q] = vp;
            ls.u_t[q] = enforce_orthogonality(Vec4{0.0, vu, 0.0, 0.0}, ts.u[q]);
        }
        ensemble.push_back(std::move(ls));
    }
    Json records = Json::array();
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
        const StateNormReport b = base_space_norm(ensemble[i], ts.r, c.kappa, g);
        const StateNormReport h2 = high_order_norm(ensemble[i], 1, ts.r, c.kappa, g);
        Json j;
        j["sample"] = i;
        j["E"] = energy_functional(ensemble[i], ts, c, g);
        j["H_norm"] = b.total;
        j["H2_norm"] = h2.total;
        j["components"] = {{"r", b.r_norm}, {"u", b.u_norm}, {"pi", b.pi_norm}};
        records.push_back(j);
    }
    const EquivalenceBracket br = energy_equivalence_check(ensemble, ts, c, g);
    Json out;
    out["records"] = records;
    out["equivalence"] = {{"c_low", br.c_low}, {"c_high", br.c_high}};
    write_json(cfg.output_dir + "/norms.json", out);
    return 0;
}

int experiment_verify(const RunConfig& cfg) {
    ensure_directory(cfg.output_dir);
    std::vector<SuiteResult> results;
    if (cfg.suite.empty() || cfg.suite == "all") {
        results = run_all_suites(cfg, 1);
    } else {
        results.push_back(run_suite(cfg.suite, cfg));
    }
    const Json j = suite_results_to_json(results);
    write_json(cfg.output_dir + "/verification_report.json", j);
    for (const SuiteResult& s : results) {
        for (const CheckResult& c : s.checks) {
            std::cout << (c.pass ? "PASS " : "FAIL ") << c.name
                      << "  measured=" << format_real(c.measured)
                      << (c.details.empty() ? "" : "  (" + c.details + ")") << "\n";
        }
    }
    const bool all = j["pass"].get<bool>();
    std::cout << (all ? "all checks passed" : "CHECK FAILURES PRESENT") << " ("
              << j["checks_passed"] << "/" << j["checks_total"] << ")\n";
    return all ? 0 : 1;
}

std::string list_suites_text() {
    std::ostringstream out;
    for (const SuiteInfo& s : suite_registry())
        out << s.name << "\n    " << s.doc << "\n";
    return out.str();
}

int run_experiment(const RunConfig& cfg) {
    if (cfg.experiment == "simulate-nonlinear") return experiment_simulate_nonlinear(cfg);
    if (cfg.experiment == "simulate-linearized")
        return experiment_simulate_linearized(cfg);
    if (cfg.experiment == "verify") return experiment_verify(cfg);
    if (cfg.experiment == "spectrum") return experiment_spectrum(cfg);
    if (cfg.experiment == "norms") return experiment_norms(cfg);
    throw spec_error("unknown experiment '" + cfg.experiment + "'");
}

}  // namespace islab
