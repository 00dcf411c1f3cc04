// Acceptance suite: end-to-end checks of the solver, diagnostics and scenario
// pipeline at their production tolerances. Prints one pass/fail line per
// criterion and exits nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "nladv/characteristics.hpp"
#include "nladv/diagnostics.hpp"
#include "nladv/scenarios.hpp"
#include "nladv/solver.hpp"

using namespace nladv;

namespace {

int failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %2d: %-28s %s\n", ok ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// ---- 1. kernel fourier certificate -----------------------------------------

void criterion_1() {
    Timer timer;
    PeriodicGrid grid(256);
    PeriodizedKernel K = PeriodizedKernel::periodize(BaseKernel::gaussian(), grid, 4);
    const auto c = K.fourier_coefficients(16);

    double worst = 0;
    bool positive = true;
    for (int n = 0; n <= 16; ++n) {
        const double oracle = std::exp(-double(n) * n / (4 * two_pi / 2));  // e^{-n^2/(4 pi)}
        worst = std::max(worst, std::abs(c[n] - oracle) / oracle);
        if (n > 0 && !(c[n] > 0)) positive = false;
    }
    const double sec = timer.seconds();
    report(1, "kernel certificate", worst < 1e-8 && positive && sec < 1.0,
           fmt("max rel err %.2e, positive=%d, %.2fs", worst, int(positive), sec));
}

// ---- 2. advection mass conservation ----------------------------------------

void criterion_2() {
    Timer timer;
    PeriodicGrid grid(256);
    PeriodizedKernel K = PeriodizedKernel::periodize(BaseKernel::gaussian(), grid, 4);
    Field u1 = InitialProfile::bump(two_pi / 2, 2.0, 0.5).sample(grid);
    Field u2(grid, 0.0);
    const double m0 = l1_norm(u1);

    SolverConfig cfg;
    cfg.t_end = 5.0;
    SimState out = run(SimState(u1, u2), K, cfg);
    const double drift = std::abs(l1_norm(out.u1) - m0) / m0;
    const double sec = timer.seconds();
    report(2, "advection mass conservation", drift < 1e-12 && sec < 10.0,
           fmt("rel drift %.2e, %.2fs", drift, sec));
}

// ---- 3..8 share the coexistence run ----------------------------------------

struct CoexistenceData {
    ScenarioResult result;
    double wall = 0;
};

CoexistenceData run_coexistence() {
    Timer timer;
    ScenarioConfig cfg = builtin_scenario("coexistence");
    CoexistenceData d;
    d.result = run_scenario(cfg);
    d.wall = timer.seconds();
    return d;
}

void criterion_3(const CoexistenceData& d) {
    bool monotone = true;
    double defect = 0, violation = 0;
    std::string note;
    try {
        const auto audit = dissipation_audit(d.result.records, 1e-8, 1e-6);
        defect = audit.max_relative_defect;
        violation = audit.worst_monotonicity_violation;
    } catch (const MonotonicityViolated& e) {
        monotone = false;
        note = e.what();
    }
    report(3, "energy monotonicity + audit",
           monotone && defect < 0.05 && d.wall < 120.0,
           fmt("worst increment %.2e, audit defect %.2f%%, %.1fs %s", violation,
               100 * defect, d.wall, note.c_str()));
}

void criterion_4(const CoexistenceData& d) {
    const SimState& fin = *d.result.final_state;
    const Field total = fin.total();
    double l1_flat = 0;
    for (double v : total.values()) l1_flat += std::abs(v - 0.2);
    l1_flat /= total.size();

    const bool got_report = d.result.asymptotic.has_value();
    double e_inf = 0, m1 = 0, m2 = 0;
    Verdict verdict = Verdict::Undecided;
    if (got_report) {
        e_inf = d.result.asymptotic->E_infinity;
        m1 = d.result.asymptotic->mass1_infinity;
        m2 = d.result.asymptotic->mass2_infinity;
        verdict = d.result.asymptotic->verdict;
    }
    const bool ok = got_report && l1_flat < 1e-2 && std::abs(e_inf - 0.2) < 1e-2 &&
                    m1 > 0.02 && m1 < 0.18 && m2 > 0.02 && m2 < 0.18 &&
                    verdict == Verdict::Coexistence;
    report(4, "coexistence limit", ok,
           fmt("|u-r|_L1/2pi=%.2e, E_inf=%.4f, masses=(%.3f, %.3f), %s", l1_flat, e_inf, m1,
               m2, to_string(verdict).c_str()));
}

// ---- 5. exclusion -----------------------------------------------------------

ScenarioResult run_exclusion() { return run_scenario(builtin_scenario("exclusion")); }

void criterion_5(const ScenarioResult& r) {
    const auto& last = r.records.back();
    const bool got = r.asymptotic.has_value();
    const Verdict verdict = got ? r.asymptotic->verdict : Verdict::Undecided;
    const bool ok = last.energy_1 < 1e-2 && std::abs(last.energy_2 - 0.2) < 1e-2 &&
                    std::abs(last.mass_1 - 0.5) < 1e-2 && last.mass_2 < 1e-2 &&
                    verdict == Verdict::Exclusion1Wins;
    report(5, "exclusion limit", ok,
           fmt("E1=%.2e, E2=%.4f, masses=(%.4f, %.2e), %s", last.energy_1, last.energy_2,
               last.mass_1, last.mass_2, to_string(verdict).c_str()));
}

// ---- 6. segregation ----------------------------------------------------------

void criterion_6(const CoexistenceData& coex, const ScenarioResult& excl) {
    auto scan = [](const std::vector<DiagnosticsRecord>& recs) {
        double worst = 0;
        for (const auto& rec : recs) {
            if (rec.t <= 1.0) continue;
            const double bound = rec.mass_1 * rec.mass_2;
            // denormal overlaps count as zero (extinction endgame)
            if (bound <= 0 || rec.overlap < 1e-30) continue;
            worst = std::max(worst, rec.overlap / bound);
        }
        return worst;
    };
    const double worst_coex = scan(coex.result.records);
    const double worst_excl = scan(excl.records);
    report(6, "segregation overlap", std::max(worst_coex, worst_excl) < 1e-6,
           fmt("max overlap/(m1 m2): coexistence %.2e, exclusion %.2e (tolerance 1e-6)",
               worst_coex, worst_excl));
}

// ---- 7. fourier decay --------------------------------------------------------

void criterion_7(const CoexistenceData& d) {
    const auto& moduli = d.result.records.back().fourier_moduli;
    double worst = 0;
    for (size_t k = 1; k < moduli.size() && k <= 16; ++k) worst = std::max(worst, moduli[k]);
    report(7, "fourier decay", worst < 1e-3, fmt("max |c_k|, k=1..16: %.2e", worst));
}

// ---- 8. two-dirac weights ------------------------------------------------------

void criterion_8(const CoexistenceData& d) {
    const double r = 0.2;
    const Field total = d.result.final_state->total();
    const Histogram h = young_histogram(total, r, 32, 0.01);  // +-0.01 r window
    const bool flat_ok = h.weight_at_root > 0.95;

    PeriodicGrid grid(256);
    Field half(grid, 0.0);
    for (int i = 0; i < 128; ++i) half[i] = r;
    const Histogram hh = young_histogram(half, r, 32, 0.05);
    const bool half_ok = std::abs(hh.weight_at_zero - 0.5) <= 0.01 &&
                         std::abs(hh.weight_at_root - 0.5) <= 0.01;

    report(8, "two-dirac weights", flat_ok && half_ok,
           fmt("flat-limit mass near r: %.4f; half state weights (%.2f, %.2f)",
               h.weight_at_root, hh.weight_at_zero, hh.weight_at_root));
}

// ---- 9. location sensitivity ---------------------------------------------------

void criterion_9() {
    ScenarioConfig a = builtin_scenario("sensitivity-a");
    ScenarioConfig b = builtin_scenario("sensitivity-b");
    const SensitivityReport rep = location_sensitivity(a, b);

    // control: both species translated by the same 32-cell offset
    ScenarioConfig c = a;
    c.name = "sensitivity-a-translated";
    const double offset = 32 * (two_pi / a.n_cells);
    c.initial[0].center += offset;
    c.initial[1].center += offset;
    const SensitivityReport ctrl = location_sensitivity(a, c);

    const bool ok = rep.difference[1] > 0.01 && ctrl.difference[0] < 1e-8 &&
                    ctrl.difference[1] < 1e-8;
    report(9, "location sensitivity", ok,
           fmt("|dU2|=%.4f (>0.01), translated pair diff=(%.1e, %.1e)", rep.difference[1],
               ctrl.difference[0], ctrl.difference[1]));
}

// ---- 10. characteristics cross-check -------------------------------------------

void criterion_10() {
    Timer timer;
    bool converged = true, ratio_ok = true;
    double jac_defect = 0;
    std::vector<double> gaps;
    for (int n : {128, 256, 512}) {
        PeriodicGrid grid(n);
        PeriodizedKernel K = PeriodizedKernel::periodize(BaseKernel::gaussian(), grid, 4);
        ScenarioConfig cfg = builtin_scenario("coexistence");
        cfg.n_cells = n;
        Field u1 = cfg.initial[0].sample(grid);
        Field u2 = cfg.initial[1].sample(grid);
        const auto m1 = cfg.reactions[0].build();
        const auto m2 = cfg.reactions[1].build();
        try {
            CharacteristicSolution sol = fixed_point_iterate(u1, u2, K, m1, m2, 0.05);
            if (sol.residuals.size() >= 2) {
                const double a = sol.residuals[sol.residuals.size() - 2];
                ratio_ok = ratio_ok && sol.residuals.back() < a;
            }
            SolverConfig scfg;
            scfg.t_end = 0.05;
            scfg.reaction1 = m1;
            scfg.reaction2 = m2;
            SimState fv = run(SimState(u1, u2), K, scfg);
            const auto cc = cross_validate(sol, fv, 0.05);
            gaps.push_back(cc.l1_diff_1 + cc.l1_diff_2);
        } catch (const NoContraction&) {
            converged = false;
        }
    }

    {
        // frozen-field jacobian identity: v = sin(x), div v = cos(x)
        FunctionVelocity frozen([](double, double x) { return std::sin(x); },
                                [](double, double x) { return std::cos(x); }, 0.0, 1.0);
        PeriodicGrid grid(256);
        std::vector<double> seeds(2 * grid.n_cells());
        for (size_t j = 0; j < seeds.size(); ++j) seeds[j] = j * grid.dx() / 2;
        const FlowMap flow = integrate_flow(frozen, seeds, 0.1, 0.1 / 64);
        jac_defect = jacobian_identity_check(flow, frozen).max_rel_defect;
    }

    const bool decreasing = gaps.size() == 3 && gaps[1] < gaps[0] && gaps[2] < gaps[1];
    const double sec = timer.seconds();
    const bool ok = converged && ratio_ok && decreasing && jac_defect < 1e-4 && sec < 30.0;
    report(10, "characteristics cross-check", ok,
           fmt("L1 gaps %.2e/%.2e/%.2e, jacobian defect %.2e, %.1fs",
               gaps.size() > 0 ? gaps[0] : -1.0, gaps.size() > 1 ? gaps[1] : -1.0,
               gaps.size() > 2 ? gaps[2] : -1.0, jac_defect, sec));
}

// ---- 11. scheme order ------------------------------------------------------------

void criterion_11() {
    ScenarioConfig cfg = builtin_scenario("advection");
    cfg.n_cells = 64;
    cfg.t_end = 0.5;
    cfg.snapshot_times = {};
    const ConvergenceReport rep = convergence_study(cfg, 4);
    report(11, "scheme order", rep.observed_order >= 1.0,
           fmt("observed order %.2f (errors %.2e %.2e %.2e)", rep.observed_order,
               rep.errors[0], rep.errors[1], rep.errors[2]));
}

} // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion_1();
    criterion_2();

    CoexistenceData coex = run_coexistence();
    criterion_3(coex);
    criterion_4(coex);

    ScenarioResult excl = run_exclusion();
    criterion_5(excl);
    criterion_6(coex, excl);
    criterion_7(coex);
    criterion_8(coex);
    criterion_9();
    criterion_10();
    criterion_11();

    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
