// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Each criterion reuses the harness check functions at their
// pinned tolerances; the time budget is printed for reference.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "islab/config.hpp"
#include "islab/report.hpp"
#include "islab/suites.hpp"

namespace {

struct Criterion {
    std::string name;
    double budget_seconds;
    std::vector<islab::CheckResult> results;
    double seconds = 0.0;

    bool pass() const {
        for (const auto& r : results)
            if (!r.pass) return false;
        return !results.empty();
    }
};

}  // namespace

int main() {
    using clock = std::chrono::steady_clock;
    islab::RunConfig cfg;
    cfg.experiment = "verify";
    cfg.seed = 20240613;

    std::vector<Criterion> criteria;
    auto run = [&](const std::string& name, double budget, auto&& fn) {
        Criterion c;
        c.name = name;
        c.budget_seconds = budget;
        const auto t0 = clock::now();
        auto out = fn();
        if constexpr (std::is_same_v<std::decay_t<decltype(out)>,
                                     islab::CheckResult>) {
            c.results.push_back(out);
        } else {
            c.results = out;
        }
        c.seconds = std::chrono::duration<double>(clock::now() - t0).count();
        criteria.push_back(std::move(c));
    };

    run("01 identity suite: blue perfect derivative + purple Leibniz <= 1e-10", 5.0,
        [&] { return islab::checks::identity_group(cfg); });
    run("02 self-adjointness and non-negativity, 1D n=2000 and 16^3", 60.0,
        [&] { return islab::checks::spectra_group(cfg); });
    run("03 shifted invertibility: 100 manufactured recoveries <= 1e-9", 60.0,
        [&] { return islab::checks::shifted_solves(cfg); });
    run("04 elliptic-ratio boundedness, kappa in {1/2,1,2}, both sectors", 120.0,
        [&] { return islab::checks::elliptic_ratio_group(cfg); });
    run("05 curl annihilation: cubic phi on 16^3 <= 1e-10; 1D identically zero", 10.0,
        [&] { return islab::checks::curl_group(cfg); });
    run("06 embedding suite: three ladder pairs, refinement-stable", 30.0,
        [&] { return islab::checks::embedding_group(cfg); });
    run("07 energy estimate: fitted C stable under refinement, increasing in K", 300.0,
        [&] { return islab::checks::energy_growth_group(cfg); });
    run("08 sublinear Gronwall: saturation on 100 draws; alpha=1/2 closed form", 10.0,
        [&] { return islab::checks::gronwall_group(cfg); });
    run("09 causality margin exact to 1e-12 and decay classification table", 1.0, [&] {
        auto a = islab::checks::causality_group(cfg);
        const auto b = islab::checks::decay_group(cfg);
        a.insert(a.end(), b.begin(), b.end());
        return a;
    });
    run("10 formulation consistency: matrices vs material form; linearization slope",
        120.0, [&] {
            std::vector<islab::CheckResult> out;
            out.push_back(islab::checks::matrix_consistency(cfg));
            out.push_back(islab::checks::linearization_consistency(cfg));
            return out;
        });
    run("11 coefficient-bound persistence up to the predicted T*", 120.0,
        [&] { return islab::checks::coefficient_bound_persistence(cfg); });
    run("12 bookkeeping orders reproduce the half-integer displays", 1.0,
        [&] { return islab::checks::order_group(cfg); });

    int failures = 0;
    for (const Criterion& c : criteria) {
        const bool ok = c.pass();
        if (!ok) ++failures;
        std::printf("%s  %s  [%.2fs of %.0fs budget]\n", ok ? "PASS" : "FAIL",
                    c.name.c_str(), c.seconds, c.budget_seconds);
        for (const auto& r : c.results) {
            if (!r.pass)
                std::printf("      failed check: %s  measured=%s  %s\n", r.name.c_str(),
                            islab::format_real(r.measured).c_str(), r.details.c_str());
        }
        if (c.seconds > c.budget_seconds)
            std::printf("      note: exceeded the reference time budget\n");
    }
    std::printf("%d/%zu acceptance criteria passed\n", int(criteria.size()) - failures,
                criteria.size());
    return failures == 0 ? 0 : 1;
}
