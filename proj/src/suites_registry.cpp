#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <future>

#include "islab/errors.hpp"
#include "islab/suites.hpp"

namespace islab {

bool SuiteResult::pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.pass; });
}

const std::vector<SuiteInfo>& suite_registry() {
    static const std::vector<SuiteInfo> reg = {
        {"identities",
         "perfect-derivative groups of the energy identity, curl annihilation, and "
         "agreement of the characteristic-matrix and material-derivative forms"},
        {"spectra",
         "self-adjointness and non-negativity of the assembled weighted operators, "
         "plus shifted-operator solvability"},
        {"elliptic-ratios",
         "boundedness of the weighted elliptic-estimate ratios under grid refinement"},
        {"embeddings", "Hardy-type weighted-space embedding ladders"},
        {"energy-growth",
         "exponential bound on the linearized energy and growth of the rate with the "
         "background bound"},
        {"gronwall", "closed-form sublinear Gronwall bound and its saturation"},
        {"causality", "hyperbolicity margin of the bulk-viscous system"},
        {"decay", "vacuum-boundary decay-rate classification and exponent fitting"},
        {"orders", "half-integer bookkeeping order calculus"},
        {"consistency",
         "formulation consistency: time-derivative recovery and the linearized flow as "
         "the derivative of the nonlinear flow"},
        {"coefficient-bounds",
         "persistence of the pointwise coefficient bounds up to the predicted time"},
    };
    return reg;
}

bool is_suite(const std::string& name) {
    const auto& reg = suite_registry();
    return std::any_of(reg.begin(), reg.end(),
                       [&](const SuiteInfo& s) { return s.name == name; });
}

SuiteResult run_suite(const std::string& name, const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    SuiteResult out;
    out.suite = name;
    auto append = [&out](const std::vector<CheckResult>& cs) {
        out.checks.insert(out.checks.end(), cs.begin(), cs.end());
    };
    if (name == "identities") {
        append(checks::identity_group(cfg));
        append(checks::curl_group(cfg));
        out.checks.push_back(checks::matrix_consistency(cfg));
    } else if (name == "spectra") {
        append(checks::spectra_group(cfg));
        out.checks.push_back(checks::shifted_solves(cfg));
    } else if (name == "elliptic-ratios") {
        append(checks::elliptic_ratio_group(cfg));
    } else if (name == "embeddings") {
        append(checks::embedding_group(cfg));
    } else if (name == "energy-growth") {
        append(checks::energy_growth_group(cfg));
    } else if (name == "gronwall") {
        append(checks::gronwall_group(cfg));
    } else if (name == "causality") {
        append(checks::causality_group(cfg));
    } else if (name == "decay") {
        append(checks::decay_group(cfg));
    } else if (name == "orders") {
        append(checks::order_group(cfg));
    } else if (name == "consistency") {
        out.checks.push_back(checks::matrix_consistency(cfg));
        out.checks.push_back(checks::linearization_consistency(cfg));
    } else if (name == "coefficient-bounds") {
        out.checks.push_back(checks::coefficient_bound_persistence(cfg));
    } else {
        throw spec_error("unknown suite '" + name + "'");
    }
    out.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

std::vector<SuiteResult> run_all_suites(const RunConfig& cfg, int max_threads) {
    if (const char* env = std::getenv("ISLAB_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) max_threads = cap;
    }
    const auto& reg = suite_registry();
    std::vector<SuiteResult> results(reg.size());
    if (max_threads <= 1) {
        for (std::size_t i = 0; i < reg.size(); ++i)
            results[i] = run_suite(reg[i].name, cfg);
        return results;
    }
    // Each suite computes its numbers independently; only the scheduling is
    // concurrent, so emitted values do not depend on the thread count.
    std::vector<std::future<SuiteResult>> futures(reg.size());
    std::size_t next = 0;
    while (next < reg.size()) {
        const std::size_t batch =
            std::min<std::size_t>(max_threads, reg.size() - next);
        for (std::size_t j = 0; j < batch; ++j) {
            const std::string nm = reg[next + j].name;
            futures[next + j] =
                std::async(std::launch::async, [nm, &cfg] { return run_suite(nm, cfg); });
        }
        for (std::size_t j = 0; j < batch; ++j)
            results[next + j] = futures[next + j].get();
        next += batch;
    }
    return results;
}

Json suite_results_to_json(const std::vector<SuiteResult>& results) {
    Json out = Json::object();
    Json suites = Json::array();
    bool all = true;
    int total = 0, passed = 0;
    for (const SuiteResult& s : results) {
        Json js;
        js["suite"] = s.suite;
        js["pass"] = s.pass();
        js["seconds"] = s.seconds;
        Json jc = Json::array();
        for (const CheckResult& c : s.checks) {
            Json one;
            one["name"] = c.name;
            one["pass"] = c.pass;
            one["measured"] = c.measured;
            one["details"] = c.details;
            jc.push_back(one);
            ++total;
            if (c.pass) ++passed;
        }
        js["checks"] = jc;
        suites.push_back(js);
        all = all && s.pass();
    }
    out["pass"] = all;
    out["checks_total"] = total;
    out["checks_passed"] = passed;
    out["suites"] = suites;
    return out;
}

}  // namespace islab
