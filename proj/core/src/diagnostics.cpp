#include "nladv/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "nladv/spectral.hpp"

namespace nladv {

double entropy_density(double u, double r) {
    if (u < 0) throw NegativeDensity("entropy_density: u < 0");
    // below this floor u ln(u/r) is numerically 0 and the continuous extension applies
    if (u < 1e-16 * r) return r - u;
    return u * std::log(u / r) - u + r;
}

double energy(const Field& u, double r) {
    if (!(r > 0)) throw ConfigError("energy: r must be positive");
    double s = 0;
    for (double v : u.values()) s += entropy_density(v, r);
    return s / u.size();
}

double overlap(const Field& u1, const Field& u2) {
    require_same_grid(u1, u2);
    double s = 0;
    for (int i = 0; i < u1.size(); ++i) s += u1[i] * u2[i];
    return s / u1.size();
}

std::vector<double> fourier_moduli(const Field& u_total, int k_report) {
    if (k_report >= u_total.grid().n_cells() / 2)
        throw AliasingRisk("fourier_moduli: k_report must be below n_cells/2");
    auto c = spectral::analyze_centers(u_total.grid(), u_total.values());
    std::vector<double> out(k_report + 1);
    for (int k = 0; k <= k_report; ++k) out[k] = std::abs(c[k]);
    return out;
}

Histogram young_histogram(const Field& u_total, double r, int n_bins, double dirac_frac) {
    if (n_bins < 10) throw ConfigError("young_histogram: n_bins must be >= 10");
    if (u_total.min_value() < -1e-12) throw NegativeDensity("young_histogram: negative density");

    double hi = 1.5 * r;
    for (double v : u_total.values()) hi = std::max(hi, v);
    hi *= 1.0 + 1e-12;

    Histogram h;
    h.edges.resize(n_bins + 1);
    for (int b = 0; b <= n_bins; ++b) h.edges[b] = hi * b / n_bins;
    h.masses.assign(n_bins, 0.0);
    h.delta = dirac_frac * r;

    const double w = 1.0 / u_total.size();
    for (double v : u_total.values()) {
        int b = static_cast<int>(std::floor(std::max(v, 0.0) / hi * n_bins));
        b = std::clamp(b, 0, n_bins - 1);
        h.masses[b] += w;
        if (std::abs(v) <= h.delta) h.weight_at_zero += w;
        if (std::abs(v - r) <= h.delta) h.weight_at_root += w;
    }
    return h;
}

DiagnosticsCollector::DiagnosticsCollector(const PeriodizedKernel& K,
                                           std::optional<ReactionModel> m1,
                                           std::optional<ReactionModel> m2,
                                           DiagnosticsOptions opts)
    : kernel_(&K), m1_(std::move(m1)), m2_(std::move(m2)), opts_(opts) {}

DiagnosticsRecord DiagnosticsCollector::collect(const SimState& state) const {
    DiagnosticsRecord rec;
    rec.t = state.t;
    const Field total = state.total();

    rec.mass_1 = mean(state.u1);
    rec.mass_2 = mean(state.u2);
    rec.overlap = overlap(state.u1, state.u2);
    rec.linf_1 = linf_norm(state.u1);
    rec.linf_2 = linf_norm(state.u2);
    rec.fourier_moduli = fourier_moduli(total, opts_.k_report);
    rec.div_v_sup = linf_norm(kernel_->divergence_v(total));

    rec.has_energy = m1_.has_value() && m2_.has_value();
    if (rec.has_energy) {
        rec.energy_1 = energy(state.u1, m1_->root());
        rec.energy_2 = energy(state.u2, m2_->root());
        rec.energy_total = rec.energy_1 + rec.energy_2;
        rec.histogram =
            young_histogram(total, std::max(m1_->root(), m2_->root()), opts_.n_bins,
                            opts_.dirac_frac);
    } else {
        rec.histogram = young_histogram(total, std::max(linf_norm(total), 1e-12),
                                        opts_.n_bins, opts_.dirac_frac);
    }

    // instantaneous dissipation integrands for the energy audit
    const auto cu = spectral::analyze_centers(total.grid(), total.values());
    const auto ck = kernel_->fourier_coeffs();
    const int n_max = static_cast<int>(ck.size()) - 1;
    double df = 0;
    for (int k = 1; k <= n_max; ++k) {
        const double mod2 = std::norm(cu[k]);
        df += 2.0 * k * k * ck[k] * mod2;  // +/- k modes of a real field pair up
    }
    rec.d_fourier = df;

    if (rec.has_energy) {
        double dr = 0, dr_seg = 0;
        auto add_species = [&](const Field& u, const ReactionModel& m) {
            const double r = m.root();
            for (int i = 0; i < u.size(); ++i) {
                const double v = u[i];
                if (v < 1e-16 * r) continue;
                const double lg = std::log(v / r);
                dr += -v * m.eval(std::max(total[i], 0.0)) * lg;
                dr_seg += v * std::abs(m.eval(v) * lg);
            }
        };
        add_species(state.u1, *m1_);
        add_species(state.u2, *m2_);
        rec.d_reaction = dr / total.size();
        rec.d_reaction_segregated = dr_seg / total.size();
    }
    return rec;
}

DissipationAuditReport dissipation_audit(std::span<const DiagnosticsRecord> history,
                                         double tol_monotone, double drop_floor) {
    if (history.size() < 2) throw ConfigError("dissipation_audit: need at least 2 snapshots");
    DissipationAuditReport rep;
    for (size_t i = 0; i + 1 < history.size(); ++i) {
        const auto& a = history[i];
        const auto& b = history[i + 1];
        if (!a.has_energy || !b.has_energy)
            throw ConfigError("dissipation_audit: history lacks energy values");

        const double increment = b.energy_total - a.energy_total;
        rep.worst_monotonicity_violation =
            std::max(rep.worst_monotonicity_violation, increment);
        if (increment > tol_monotone)
            throw MonotonicityViolated("energy increased by " + std::to_string(increment) +
                                       " over [" + std::to_string(a.t) + ", " +
                                       std::to_string(b.t) + "]");

        DissipationInterval iv;
        iv.t0 = a.t;
        iv.t1 = b.t;
        iv.measured_drop = -increment;
        const double tau = b.t - a.t;
        iv.predicted_drop = 0.5 * tau *
                            ((a.d_fourier + a.d_reaction) + (b.d_fourier + b.d_reaction));
        iv.relative_defect = iv.measured_drop > 0
                                 ? std::abs(iv.predicted_drop - iv.measured_drop) /
                                       iv.measured_drop
                                 : 0.0;
        if (iv.measured_drop > drop_floor)
            rep.max_relative_defect = std::max(rep.max_relative_defect, iv.relative_defect);
        rep.intervals.push_back(iv);
    }
    return rep;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Coexistence: return "coexistence";
        case Verdict::Exclusion1Wins: return "exclusion-species1-wins";
        case Verdict::Exclusion2Wins: return "exclusion-species2-wins";
        default: return "undecided";
    }
}

AsymptoticReport asymptotic_report(std::span<const DiagnosticsRecord> history, double r1,
                                   double r2, AsymptoticOptions opts) {
    if (history.size() < 2) throw ConfigError("asymptotic_report: need at least 2 snapshots");
    for (const auto& rec : history)
        if (!rec.has_energy) throw ConfigError("asymptotic_report: history lacks energy values");

    const double t0 = history.front().t;
    const double t1 = history.back().t;
    const double w_start = t1 - opts.window_frac * (t1 - t0);

    AsymptoticReport rep;
    rep.window_start = w_start;
    double e_min = 0, e_max = 0, se = 0, se1 = 0, se2 = 0, sm1 = 0, sm2 = 0;
    int count = 0;
    for (const auto& rec : history) {
        if (rec.t < w_start - 1e-12) continue;
        if (count == 0) {
            e_min = e_max = rec.energy_total;
        } else {
            e_min = std::min(e_min, rec.energy_total);
            e_max = std::max(e_max, rec.energy_total);
        }
        se += rec.energy_total;
        se1 += rec.energy_1;
        se2 += rec.energy_2;
        sm1 += rec.mass_1;
        sm2 += rec.mass_2;
        ++count;
    }
    if (count < 2) throw NoPlateauDetected("asymptotic_report: window holds fewer than 2 snapshots");

    const double r_ref = std::max(r1, r2);
    rep.plateau_detected = (e_max - e_min) < opts.plateau_tol_frac * r_ref;
    if (!rep.plateau_detected)
        throw NoPlateauDetected("energy still moves by " + std::to_string(e_max - e_min) +
                                " over the trailing window");

    rep.E_infinity = se / count;
    rep.E1_infinity = se1 / count;
    rep.E2_infinity = se2 / count;
    rep.mass1_infinity = sm1 / count;
    rep.mass2_infinity = sm2 / count;
    rep.c1_mean = 1.0 - rep.E1_infinity / r1;
    rep.c2_mean = 1.0 - rep.E2_infinity / r2;

    if (std::abs(r1 - r2) < 1e-12) {
        const double r = r1;
        rep.dirac_weight_zero = std::clamp(rep.E_infinity / r - 1.0, 0.0, 1.0);
        rep.dirac_weight_root = std::clamp(2.0 - rep.E_infinity / r, 0.0, 1.0);
        const double tol = opts.plateau_tol_frac * r + 1e-9;
        rep.two_dirac_bounds_ok =
            rep.E_infinity >= r - tol && rep.E_infinity <= 2 * r + tol;
    }

    const double e = opts.eps_c;
    const bool c1_high = rep.c1_mean > 1 - e, c1_low = rep.c1_mean < e;
    const bool c2_high = rep.c2_mean > 1 - e, c2_low = rep.c2_mean < e;
    if (!c1_high && !c1_low && !c2_high && !c2_low)
        rep.verdict = Verdict::Coexistence;
    else if (c1_high && c2_low)
        rep.verdict = Verdict::Exclusion1Wins;
    else if (c2_high && c1_low)
        rep.verdict = Verdict::Exclusion2Wins;
    else
        rep.verdict = Verdict::Undecided;
    return rep;
}

} // namespace nladv
