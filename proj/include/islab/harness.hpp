#pragma once

#include <string>

#include "islab/config.hpp"

namespace islab {

// Experiment entry points; each writes its artifacts under cfg.output_dir and
// returns a process exit code (0 success, 2 config error, 3 numerical abort).
int run_experiment(const RunConfig& cfg);

int experiment_simulate_nonlinear(const RunConfig& cfg);
int experiment_simulate_linearized(const RunConfig& cfg);
int experiment_verify(const RunConfig& cfg);
int experiment_spectrum(const RunConfig& cfg);
int experiment_norms(const RunConfig& cfg);
std::string list_suites_text();

}  // namespace islab
