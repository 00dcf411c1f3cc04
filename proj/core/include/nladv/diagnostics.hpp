#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nladv/grid.hpp"
#include "nladv/kernel.hpp"
#include "nladv/reaction.hpp"
#include "nladv/solver.hpp"

namespace nladv {

/// Relative-entropy density G(u) = u ln(u/r) - u + r, extended by G(0) = r.
/// Nonnegative, convex, vanishing only at u = r.
double entropy_density(double u, double r);

/// E[u] = (1/2pi) int G(u(x)) dx over the torus. Throws NegativeDensity.
double energy(const Field& u, double r);

/// (1/2pi) int u1 u2 dx; exactly zero for disjoint supports.
double overlap(const Field& u1, const Field& u2);

/// |c_k[u_total]| for k = 0..k_report. Throws AliasingRisk for k_report >= n/2.
std::vector<double> fourier_moduli(const Field& u_total, int k_report);

struct Histogram {
    std::vector<double> edges;   // n_bins + 1 ascending edges
    std::vector<double> masses;  // fraction of cells per bin, sums to 1
    double weight_at_zero = 0;   // mass with |u| <= delta
    double weight_at_root = 0;   // mass with |u - r| <= delta
    double delta = 0;
};

/// Empirical value distribution of the cells of u_total over
/// [0, max(observed max, 1.5 r)], plus the mass near 0 and near r
/// (half-width delta = dirac_frac * r).
Histogram young_histogram(const Field& u_total, double r, int n_bins,
                          double dirac_frac = 0.05);

struct DiagnosticsRecord {
    double t = 0;
    double energy_1 = 0, energy_2 = 0, energy_total = 0;
    double mass_1 = 0, mass_2 = 0;
    double overlap = 0;
    double linf_1 = 0, linf_2 = 0;
    std::vector<double> fourier_moduli;  // |c_k[u1+u2]|, k = 0..k_report
    double div_v_sup = 0;
    Histogram histogram;
    // dissipation integrands sampled at this instant, for the energy audit
    double d_fourier = 0;   // sum_k k^2 c_k[K] |c_k[u]|^2 over all resolved modes
    // reaction entropy production as the dynamics produce it, with the growth
    // law coupled to the total density:
    //   -(1/2pi) int sum_i u_i h_i(u1+u2) ln(u_i/r_i) dx
    double d_reaction = 0;
    // the same integral in its segregated form (1/2pi) int sum_i u_i |h_i(u_i)
    // ln(u_i/r_i)| dx; the two agree wherever the species do not share cells
    double d_reaction_segregated = 0;
    bool has_energy = false;
};

struct DiagnosticsOptions {
    int k_report = 16;
    int n_bins = 32;
    double dirac_frac = 0.05;
};

/// Assembles one DiagnosticsRecord per snapshot from the solver state.
class DiagnosticsCollector {
public:
    DiagnosticsCollector(const PeriodizedKernel& K, std::optional<ReactionModel> m1,
                         std::optional<ReactionModel> m2, DiagnosticsOptions opts = {});
    DiagnosticsRecord collect(const SimState& state) const;

private:
    const PeriodizedKernel* kernel_;
    std::optional<ReactionModel> m1_, m2_;
    DiagnosticsOptions opts_;
};

struct DissipationInterval {
    double t0 = 0, t1 = 0;
    double measured_drop = 0;    // E(t0) - E(t1)
    double predicted_drop = 0;   // trapezoidal quadrature of the two dissipation terms
    double relative_defect = 0;
};

struct DissipationAuditReport {
    double worst_monotonicity_violation = 0;  // max positive energy increment
    double max_relative_defect = 0;           // over intervals with drop > drop_floor
    std::vector<DissipationInterval> intervals;
};

/// Check that the energy history is nonincreasing (within tol_monotone per
/// interval; throws MonotonicityViolated beyond that) and compare each
/// measured drop against the time-quadrature of the dissipation integrands.
/// Intervals with drop <= drop_floor are excluded from the defect statistic.
DissipationAuditReport dissipation_audit(std::span<const DiagnosticsRecord> history,
                                         double tol_monotone = 1e-8,
                                         double drop_floor = 1e-6);

enum class Verdict { Coexistence, Exclusion1Wins, Exclusion2Wins, Undecided };

std::string to_string(Verdict v);

struct AsymptoticReport {
    double E_infinity = 0;
    double E1_infinity = 0, E2_infinity = 0;
    double c1_mean = 0, c2_mean = 0;       // mean c_i = 1 - E_i,inf / r_i
    double mass1_infinity = 0, mass2_infinity = 0;
    double dirac_weight_zero = 0, dirac_weight_root = 0;  // defined when r1 == r2
    bool plateau_detected = false;
    bool two_dirac_bounds_ok = true;       // r <= E_inf <= 2r when r1 == r2
    Verdict verdict = Verdict::Undecided;
    double window_start = 0;
};

struct AsymptoticOptions {
    double window_frac = 0.10;      // plateau window = last fraction of the time span
    double plateau_tol_frac = 1e-4; // plateau when max-min < frac * max(r1, r2)
    double eps_c = 0.02;            // verdict classification margin
};

/// Long-time limits from the tail of the diagnostics history. Throws
/// NoPlateauDetected when the energy still moves over the window.
AsymptoticReport asymptotic_report(std::span<const DiagnosticsRecord> history, double r1,
                                   double r2, AsymptoticOptions opts = {});

} // namespace nladv
