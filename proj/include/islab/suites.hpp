#pragma once

#include <string>
#include <vector>

#include "islab/config.hpp"
#include "islab/report.hpp"

namespace islab {

struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    std::string details;
};

struct SuiteResult {
    std::string suite;
    std::vector<CheckResult> checks;
    double seconds = 0.0;

    bool pass() const;
};

struct SuiteInfo {
    std::string name;
    std::string doc;
};

const std::vector<SuiteInfo>& suite_registry();
bool is_suite(const std::string& name);
SuiteResult run_suite(const std::string& name, const RunConfig& cfg);
// All suites; ISLAB_THREADS (or max_threads) caps the fan-out. Result order is
// fixed regardless of parallelism.
std::vector<SuiteResult> run_all_suites(const RunConfig& cfg, int max_threads = 1);

Json suite_results_to_json(const std::vector<SuiteResult>& results);

// Individual checks, shared between the CLI suites and the acceptance tests.
namespace checks {

std::vector<CheckResult> identity_group(const RunConfig& cfg);        // blue/purple
std::vector<CheckResult> curl_group(const RunConfig& cfg);            // L3 annihilation
CheckResult matrix_consistency(const RunConfig& cfg);                 // A-form vs material form
std::vector<CheckResult> spectra_group(const RunConfig& cfg);         // sym defect + eigs
CheckResult shifted_solves(const RunConfig& cfg);                     // (Lhat + I) recovery
std::vector<CheckResult> elliptic_ratio_group(const RunConfig& cfg);  // estimate ratios
std::vector<CheckResult> embedding_group(const RunConfig& cfg);       // Hardy ladders
std::vector<CheckResult> energy_growth_group(const RunConfig& cfg);   // E(t) bound + K sweep
std::vector<CheckResult> gronwall_group(const RunConfig& cfg);
std::vector<CheckResult> causality_group(const RunConfig& cfg);
std::vector<CheckResult> decay_group(const RunConfig& cfg);
CheckResult linearization_consistency(const RunConfig& cfg);
CheckResult coefficient_bound_persistence(const RunConfig& cfg);
std::vector<CheckResult> order_group(const RunConfig& cfg);

}  // namespace checks

}  // namespace islab
