#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "islab/config.hpp"
#include "islab/errors.hpp"
#include "islab/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"islab - numerical laboratory for bulk-viscous relativistic fluids "
                 "near a vacuum boundary"};
    app.require_subcommand(1);

    std::string config_path, suite, out_dir;
    auto add_common = [&](CLI::App* sub, bool config_required) {
        sub->add_option("--config", config_path, "key = value configuration file")
            ->required(config_required);
        sub->add_option("--suite", suite, "verification suite name (or 'all')");
        sub->add_option("--out", out_dir, "output directory (overrides config)");
    };
    add_common(app.add_subcommand("simulate-nonlinear",
                                  "evolve the nonlinear system, emit snapshots"),
               true);
    add_common(app.add_subcommand("simulate-linearized",
                                  "evolve the linearized system, emit the energy series"),
               true);
    add_common(app.add_subcommand("verify", "run verification suites"), true);
    add_common(app.add_subcommand("spectrum", "assembled-operator spectrum report"), true);
    add_common(app.add_subcommand("norms", "weighted norm and energy reports"), true);
    app.add_subcommand("list-suites", "print the available verification suites");

    CLI11_PARSE(app, argc, argv);
    const std::string sub = app.get_subcommands().front()->get_name();

    if (sub == "list-suites") {
        std::cout << islab::list_suites_text();
        return 0;
    }

    islab::RunConfig cfg;
    try {
        cfg = islab::parse_config_file(config_path);
        if (!cfg.experiment.empty() && cfg.experiment != sub)
            throw islab::spec_error("config experiment '" + cfg.experiment +
                                    "' does not match subcommand '" + sub + "'");
        cfg.experiment = sub;
        if (!suite.empty()) cfg.suite = suite;
        if (!out_dir.empty()) cfg.output_dir = out_dir;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        return islab::run_experiment(cfg);
    } catch (const islab::numerical_abort& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
