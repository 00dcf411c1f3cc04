#include "nladv/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "nladv/spectral.hpp"

namespace nladv {

void VelocityField::require_in_range(double t) const {
    const double eps = 1e-9 * std::max(1.0, std::abs(t_end()));
    if (t < t_begin() - eps || t > t_end() + eps)
        throw VelocityUndefined("velocity requested at t=" + std::to_string(t) +
                                " outside [" + std::to_string(t_begin()) + ", " +
                                std::to_string(t_end()) + "]");
}

SampledSpectralVelocity::SampledSpectralVelocity(
    std::vector<double> times, std::vector<std::vector<std::complex<double>>> level_coeffs)
    : times_(std::move(times)), coeffs_(std::move(level_coeffs)) {
    if (times_.size() != coeffs_.size() || times_.size() < 2)
        throw ConfigError("SampledSpectralVelocity: need matching times and levels");
    kcut_.resize(coeffs_.size());
    for (size_t m = 0; m < coeffs_.size(); ++m) {
        const auto& c = coeffs_[m];
        const int half = static_cast<int>(c.size()) / 2;
        double peak = 0;
        for (int k = 0; k <= half; ++k) peak = std::max(peak, std::abs(c[k]));
        int cut = 0;
        for (int k = 1; k < half; ++k)
            if (std::abs(c[k]) > 1e-16 * peak) cut = k;
        kcut_[m] = cut;
    }
}

double SampledSpectralVelocity::series(int level, double x, int deriv) const {
    const auto& c = coeffs_[level];
    double s = deriv == 0 ? c[0].real() : 0.0;
    for (int k = 1; k <= kcut_[level]; ++k) {
        const double re = c[k].real(), im = c[k].imag();
        const double ck = std::cos(k * x), sk = std::sin(k * x);
        if (deriv == 0)
            s += 2 * (re * ck - im * sk);
        else
            s += 2 * k * (-re * sk - im * ck);
    }
    return s;
}

double SampledSpectralVelocity::value(double t, double x) const {
    require_in_range(t);
    const double tc = std::clamp(t, times_.front(), times_.back());
    auto it = std::upper_bound(times_.begin(), times_.end(), tc);
    int hi = std::clamp(static_cast<int>(it - times_.begin()), 1,
                        static_cast<int>(times_.size()) - 1);
    const int lo = hi - 1;
    const double a = (tc - times_[lo]) / (times_[hi] - times_[lo]);
    return (1 - a) * series(lo, x, 0) + a * series(hi, x, 0);
}

double SampledSpectralVelocity::divergence(double t, double x) const {
    require_in_range(t);
    const double tc = std::clamp(t, times_.front(), times_.back());
    auto it = std::upper_bound(times_.begin(), times_.end(), tc);
    int hi = std::clamp(static_cast<int>(it - times_.begin()), 1,
                        static_cast<int>(times_.size()) - 1);
    const int lo = hi - 1;
    const double a = (tc - times_[lo]) / (times_[hi] - times_[lo]);
    return (1 - a) * series(lo, x, 1) + a * series(hi, x, 1);
}

bool FlowMap::monotone_in_seed() const {
    for (const auto& level : positions)
        for (size_t j = 1; j < level.size(); ++j)
            if (!(level[j] > level[j - 1])) return false;
    return true;
}

FlowMap integrate_flow(const VelocityField& v, std::vector<double> seeds, double t_end,
                       double dt) {
    if (!(dt > 0)) throw ConfigError("integrate_flow: dt must be positive");
    const int n_steps = std::max(1, static_cast<int>(std::ceil(t_end / dt - 1e-12)));
    const double h = t_end / n_steps;

    FlowMap flow;
    flow.seeds = std::move(seeds);
    flow.times.resize(n_steps + 1);
    flow.positions.assign(n_steps + 1, flow.seeds);
    for (int m = 0; m <= n_steps; ++m) flow.times[m] = m * h;

    for (int m = 0; m < n_steps; ++m) {
        const double t = flow.times[m];
        const auto& cur = flow.positions[m];
        auto& nxt = flow.positions[m + 1];
        for (size_t j = 0; j < cur.size(); ++j) {
            const double z = cur[j];
            const double k1 = v.value(t, z);
            const double k2 = v.value(t + h / 2, z + h / 2 * k1);
            const double k3 = v.value(t + h / 2, z + h / 2 * k2);
            const double k4 = v.value(t + h, z + h * k3);
            nxt[j] = z + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        }
    }
    return flow;
}

namespace {

// int_0^{t_m} f(l) dl for samples on the uniform stored levels (trapezoid)
std::vector<double> cumulative_trapezoid(const std::vector<double>& times,
                                         const std::vector<double>& f) {
    std::vector<double> F(times.size(), 0.0);
    for (size_t m = 1; m < times.size(); ++m)
        F[m] = F[m - 1] + 0.5 * (times[m] - times[m - 1]) * (f[m] + f[m - 1]);
    return F;
}

} // namespace

JacobianReport jacobian_identity_check(const FlowMap& flow, const VelocityField& v) {
    const size_t ns = flow.seeds.size();
    if (ns < 3) throw ConfigError("jacobian_identity_check: need at least 3 seeds");
    const size_t last = flow.times.size() - 1;

    JacobianReport rep;
    std::vector<double> div_along(flow.times.size());
    for (size_t j = 0; j < ns; ++j) {
        // centered difference with periodic lift at the ends
        const size_t jp = (j + 1) % ns, jm = (j + ns - 1) % ns;
        double xp = flow.positions[last][jp], xm = flow.positions[last][jm];
        double zp = flow.seeds[jp], zm = flow.seeds[jm];
        if (jp < j) { xp += two_pi; zp += two_pi; }
        if (jm > j) { xm -= two_pi; zm -= two_pi; }
        const double fd = (xp - xm) / (zp - zm);

        for (size_t m = 0; m < flow.times.size(); ++m)
            div_along[m] = v.divergence(flow.times[m], flow.positions[m][j]);
        const double expo = std::exp(cumulative_trapezoid(flow.times, div_along).back());

        const double defect = std::abs(fd - expo) / std::max(std::abs(expo), 1e-300);
        rep.max_rel_defect = std::max(rep.max_rel_defect, defect);
    }
    return rep;
}

namespace {

struct PicardWorkspace {
    const PeriodicGrid* grid;
    const PeriodizedKernel* kernel;
    std::vector<double> times;
    std::vector<double> seeds;        // 2n points j*dx/2
    std::vector<double> u1_0, u2_0;   // initial data at the seeds
    std::vector<int> center_seed;     // indices of the n cell-center seeds
};

// exponential growth factors e^{int_0^{t_m} h_i(w1+w2)} per seed
std::vector<std::vector<double>> growth_factors(const PicardWorkspace& ws,
                                                const std::vector<std::vector<double>>& w1,
                                                const std::vector<std::vector<double>>& w2,
                                                const std::optional<ReactionModel>& m) {
    const size_t levels = ws.times.size(), ns = ws.seeds.size();
    std::vector<std::vector<double>> g(levels, std::vector<double>(ns, 1.0));
    if (!m) return g;
    std::vector<double> h(levels);
    for (size_t j = 0; j < ns; ++j) {
        for (size_t l = 0; l < levels; ++l)
            h[l] = m->eval(std::max(w1[l][j] + w2[l][j], 0.0));
        const auto H = cumulative_trapezoid(ws.times, h);
        for (size_t l = 0; l < levels; ++l) g[l][j] = std::exp(H[l]);
    }
    return g;
}

} // namespace

CharacteristicSolution fixed_point_iterate(const Field& u1_0, const Field& u2_0,
                                           const PeriodizedKernel& K,
                                           const std::optional<ReactionModel>& m1,
                                           const std::optional<ReactionModel>& m2,
                                           double tau, int max_iter, double tol,
                                           int n_levels) {
    require_same_grid(u1_0, u2_0);
    if (!(tau > 0)) throw ConfigError("fixed_point_iterate: tau must be positive");
    const PeriodicGrid& grid = u1_0.grid();
    const int n = grid.n_cells();
    const int ns = 2 * n;
    const double dx = grid.dx();

    PicardWorkspace ws;
    ws.grid = &grid;
    ws.kernel = &K;
    ws.times.resize(n_levels + 1);
    for (int m = 0; m <= n_levels; ++m) ws.times[m] = tau * m / n_levels;
    ws.seeds.resize(ns);
    ws.u1_0.resize(ns);
    ws.u2_0.resize(ns);
    for (int j = 0; j < ns; ++j) {
        ws.seeds[j] = j * dx / 2;
        if (j % 2 == 1) {  // cell center of cell (j-1)/2
            ws.u1_0[j] = u1_0[(j - 1) / 2];
            ws.u2_0[j] = u2_0[(j - 1) / 2];
        } else {           // interface: average the adjacent cells
            const int c = j / 2;
            const int cm = (c + n - 1) % n;
            ws.u1_0[j] = 0.5 * (u1_0[c] + u1_0[cm]);
            ws.u2_0[j] = 0.5 * (u2_0[c] + u2_0[cm]);
        }
        if (j % 2 == 1) ws.center_seed.push_back(j);
    }

    const size_t levels = ws.times.size();

    // initial iterate: densities frozen at u0, velocity induced by u0
    std::vector<std::vector<double>> w1(levels, ws.u1_0), w2(levels, ws.u2_0);
    const Field v0 = K.velocity(u1_0 + u2_0);
    auto v0_hat = spectral::analyze_centers(grid, v0.values());
    std::vector<std::vector<std::complex<double>>> v_hat(levels, v0_hat);
    std::vector<std::vector<double>> v_grid(levels,
                                            std::vector<double>(v0.values().begin(),
                                                                v0.values().end()));

    CharacteristicSolution sol;
    sol.times = ws.times;
    sol.seeds = ws.seeds;

    std::vector<std::vector<double>> div_along(levels, std::vector<double>(ns, 0.0));
    FlowMap flow;

    bool converged = false;
    for (int it = 0; it < max_iter && !converged; ++it) {
        // flow of the current velocity iterate
        SampledSpectralVelocity vel(ws.times, v_hat);
        flow = integrate_flow(vel, ws.seeds, tau, ws.times[1] - ws.times[0]);

        const auto g1 = growth_factors(ws, w1, w2, m1);
        const auto g2 = growth_factors(ws, w1, w2, m2);

        // new velocity on the grid: quadrature over the cell-center seeds
        std::vector<std::vector<double>> v1_grid(levels, std::vector<double>(n, 0.0));
        std::vector<std::vector<std::complex<double>>> v1_hat(levels);
        for (size_t l = 0; l < levels; ++l) {
            for (int i = 0; i < n; ++i) {
                const double x = grid.center(i);
                double s = 0;
                for (int c : ws.center_seed) {
                    const double weight = g1[l][c] * ws.u1_0[c] + g2[l][c] * ws.u2_0[c];
                    if (weight == 0) continue;
                    s += K.deriv_at(x - flow.positions[l][c]) * weight;
                }
                v1_grid[l][i] = -s / n;
            }
            v1_hat[l] = spectral::analyze_centers(grid, v1_grid[l]);
        }

        // div v1 along the OLD flow positions, for every seed
        for (size_t l = 0; l < levels; ++l) {
            for (int j = 0; j < ns; ++j) {
                const double y = flow.positions[l][j];
                double s = 0;
                for (int c : ws.center_seed) {
                    const double weight = g1[l][c] * ws.u1_0[c] + g2[l][c] * ws.u2_0[c];
                    if (weight == 0) continue;
                    s += K.second_deriv_at(y - flow.positions[l][c]) * weight;
                }
                div_along[l][j] = -s / n;
            }
        }

        // new densities along characteristics
        std::vector<std::vector<double>> w1_new(levels, std::vector<double>(ns)),
            w2_new(levels, std::vector<double>(ns));
        std::vector<double> divj(levels);
        double res = 0;
        for (int j = 0; j < ns; ++j) {
            for (size_t l = 0; l < levels; ++l) divj[l] = div_along[l][j];
            const auto D = cumulative_trapezoid(ws.times, divj);
            for (size_t l = 0; l < levels; ++l) {
                const double shrink = std::exp(-D[l]);
                w1_new[l][j] = ws.u1_0[j] * g1[l][j] * shrink;
                w2_new[l][j] = ws.u2_0[j] * g2[l][j] * shrink;
                if (!std::isfinite(w1_new[l][j]) || !std::isfinite(w2_new[l][j])) {
                    res = std::numeric_limits<double>::infinity();
                    continue;
                }
                res = std::max(res, std::abs(w1_new[l][j] - w1[l][j]));
                res = std::max(res, std::abs(w2_new[l][j] - w2[l][j]));
            }
        }
        for (size_t l = 0; l < levels; ++l)
            for (int i = 0; i < n; ++i) {
                if (!std::isfinite(v1_grid[l][i])) res = std::numeric_limits<double>::infinity();
                else res = std::max(res, std::abs(v1_grid[l][i] - v_grid[l][i]));
            }

        w1 = std::move(w1_new);
        w2 = std::move(w2_new);
        v_grid = std::move(v1_grid);
        v_hat = std::move(v1_hat);
        sol.residuals.push_back(res);
        sol.iterations = it + 1;
        converged = res < tol;
    }
    if (!converged)
        throw NoContraction("fixed_point_iterate: no contraction after " +
                            std::to_string(max_iter) + " iterations (tau too large?)");

    sol.w1 = std::move(w1);
    sol.w2 = std::move(w2);
    sol.flow = std::move(flow);
    sol.jacobian.assign(levels, std::vector<double>(ns, 1.0));
    std::vector<double> divj(levels);
    for (int j = 0; j < ns; ++j) {
        for (size_t l = 0; l < levels; ++l) divj[l] = div_along[l][j];
        const auto D = cumulative_trapezoid(ws.times, divj);
        for (size_t l = 0; l < levels; ++l) sol.jacobian[l][j] = std::exp(D[l]);
    }
    return sol;
}

CharacteristicSolution fixed_point_solve(const Field& u1_0, const Field& u2_0,
                                         const PeriodizedKernel& K,
                                         const std::optional<ReactionModel>& m1,
                                         const std::optional<ReactionModel>& m2, double tau,
                                         int max_halvings) {
    double t = tau;
    for (int attempt = 0;; ++attempt) {
        try {
            return fixed_point_iterate(u1_0, u2_0, K, m1, m2, t);
        } catch (const NoContraction&) {
            if (attempt >= max_halvings) throw;
            t /= 2;
        }
    }
}

CrossCheckReport cross_validate(const CharacteristicSolution& sol, const SimState& fv,
                                double t) {
    if (std::abs(sol.times.back() - t) > 1e-9 || std::abs(fv.t - t) > 1e-9)
        throw TimeMismatch("cross_validate: solutions are not at the requested time");

    const PeriodicGrid& grid = fv.grid();
    const int n = grid.n_cells();
    const size_t last = sol.times.size() - 1;
    const size_t ns = sol.seeds.size();

    // Eulerian sample points (wrapped, monotone up to one cyclic break)
    std::vector<double> xs(ns), w1(ns), w2(ns);
    size_t start = 0;
    for (size_t j = 0; j < ns; ++j) {
        xs[j] = grid.wrap(sol.flow.positions[last][j]);
        w1[j] = sol.w1[last][j];
        w2[j] = sol.w2[last][j];
        if (j > 0 && xs[j] < xs[start]) start = j;
    }

    auto interp = [&](double x, const std::vector<double>& w) {
        // positions ascend cyclically starting at index `start`
        size_t lo = start, hi = start;
        for (size_t c = 0; c < ns; ++c) {
            const size_t j = (start + c) % ns;
            const size_t jn = (j + 1) % ns;
            double xj = xs[j], xn = xs[jn];
            double xq = x;
            if (xn < xj) xn += two_pi;           // the cyclic break segment
            if (xq < xj) xq += two_pi;
            if (xq >= xj && xq <= xn) {
                lo = j;
                hi = jn;
                const double a = (xq - xj) / std::max(xn - xj, 1e-300);
                return (1 - a) * w[lo] + a * w[hi];
            }
        }
        return w[lo];
    };

    CrossCheckReport rep;
    rep.t = t;
    double l1 = 0, l2 = 0, ref = 0;
    for (int i = 0; i < n; ++i) {
        const double x = grid.center(i);
        l1 += std::abs(interp(x, w1) - fv.u1[i]);
        l2 += std::abs(interp(x, w2) - fv.u2[i]);
        ref += std::abs(fv.u1[i]) + std::abs(fv.u2[i]);
    }
    rep.l1_diff_1 = l1 * grid.dx();
    rep.l1_diff_2 = l2 * grid.dx();
    rep.l1_rel = (l1 + l2) / std::max(ref, 1e-300);
    return rep;
}

CharacteristicsValidation validate_characteristics(const Field& u1_0, const Field& u2_0,
                                                   const PeriodizedKernel& K,
                                                   const std::optional<ReactionModel>& m1,
                                                   const std::optional<ReactionModel>& m2,
                                                   double tau) {
    CharacteristicsValidation out;

    // frozen analytic field: v = sin(x), div v = cos(x)
    FunctionVelocity frozen([](double, double x) { return std::sin(x); },
                            [](double, double x) { return std::cos(x); }, 0.0, 1.0);
    const PeriodicGrid& grid = u1_0.grid();
    std::vector<double> seeds(2 * grid.n_cells());
    for (size_t j = 0; j < seeds.size(); ++j) seeds[j] = j * grid.dx() / 2;
    const FlowMap frozen_flow = integrate_flow(frozen, seeds, 0.1, 0.1 / 64);
    out.frozen_field_jacobian = jacobian_identity_check(frozen_flow, frozen);

    // composition: 0 -> t in one pass vs 0 -> t/2 -> t
    {
        const double T = 0.1;
        const FlowMap full = integrate_flow(frozen, seeds, T, T / 64);
        const FlowMap half = integrate_flow(frozen, seeds, T / 2, T / 128);
        std::vector<double> mid = half.positions.back();
        FunctionVelocity shifted([](double, double x) { return std::sin(x); },
                                 [](double, double x) { return std::cos(x); }, 0.0, 1.0);
        const FlowMap second = integrate_flow(shifted, mid, T / 2, T / 128);
        double d = 0;
        for (size_t j = 0; j < seeds.size(); ++j)
            d = std::max(d, std::abs(second.positions.back()[j] - full.positions.back()[j]));
        out.composition_defect = d;
    }

    CharacteristicSolution sol = fixed_point_iterate(u1_0, u2_0, K, m1, m2, tau);
    out.picard_iterations = sol.iterations;
    out.converged = true;
    if (sol.residuals.size() >= 2) {
        const double a = sol.residuals[sol.residuals.size() - 2];
        const double b = sol.residuals.back();
        out.contraction_ratio = a > 0 ? b / a : 0.0;
    }

    SolverConfig cfg;
    cfg.t_end = tau;
    cfg.reaction1 = m1;
    cfg.reaction2 = m2;
    SimState fv = run(SimState(u1_0, u2_0), K, cfg);
    out.cross_check = cross_validate(sol, fv, tau);
    return out;
}

void write_validation_report(std::ostream& out, const CharacteristicsValidation& v) {
    auto line = [&](bool ok, const std::string& name, double value) {
        out << (ok ? "[pass] " : "[FAIL] ") << name << " = " << value << "\n";
    };
    out << "characteristics validation\n";
    line(v.frozen_field_jacobian.max_rel_defect < 1e-4, "jacobian identity defect",
         v.frozen_field_jacobian.max_rel_defect);
    line(v.composition_defect < 1e-9, "flow composition defect", v.composition_defect);
    line(v.converged && v.contraction_ratio < 1.0, "picard contraction ratio",
         v.contraction_ratio);
    out << "       picard iterations = " << v.picard_iterations << "\n";
    out << "       L1 gap vs finite-volume solution = "
        << v.cross_check.l1_diff_1 + v.cross_check.l1_diff_2 << " (relative "
        << v.cross_check.l1_rel << ")\n";
}

} // namespace nladv
