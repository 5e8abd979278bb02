#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "islab/fluid_model.hpp"

namespace islab {

// Runtime configuration, parsed from a "key = value" file (# comments, blank
// lines allowed; unknown keys rejected by name).
struct RunConfig {
    double kappa = 1.0;
    double lambda0 = 1.0;
    std::optional<double> tau_pi;  // defaults to 1/(2 + 1/kappa)
    int n_cells = 128;
    double b0 = 0.0;
    double x_far = 1.0;
    double T = 0.25;
    double cfl = 0.4;
    std::string experiment;  // set by the CLI subcommand; optional in the file
    std::string suite;
    std::string output_dir = "out";
    std::uint64_t seed = 1;

    ModelConstants constants() const;
    void validate() const;  // T > 0, n_cells >= 32, cfl in (0,1)
};

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);

}  // namespace islab
