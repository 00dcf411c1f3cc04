#include "nladv/solver.hpp"

#include <algorithm>
#include <cmath>

namespace nladv {

namespace {
constexpr double v_floor = 1e-30;  // CFL denominator floor for v == 0
} // namespace

void reconstruct(std::span<const double> u, Limiter limiter,
                 std::vector<double>& u_minus, std::vector<double>& u_plus) {
    const int n = static_cast<int>(u.size());
    u_minus.resize(n);
    u_plus.resize(n);
    for (int i = 0; i < n; ++i) {
        double s = 0;
        if (limiter == Limiter::Minmod) {
            const double up = u[(i + 1) % n] - u[i];
            const double um = u[i] - u[(i + n - 1) % n];
            s = minmod(up, um);
        }
        u_minus[i] = u[i] - 0.5 * s;
        u_plus[i] = u[i] + 0.5 * s;
    }
}

std::vector<double> interface_velocities(const PeriodizedKernel& K, const Field& u_total) {
    const Field l = K.convolve(u_total);
    const int n = l.size();
    const double dx = u_total.grid().dx();
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = -(l[(i + 1) % n] - l[i]) / dx;
    return v;
}

double stable_dt(const SimState& state, const PeriodizedKernel& K, const SolverConfig& cfg) {
    const Field total = state.total();
    const auto v = interface_velocities(K, total);
    double vmax = v_floor;
    for (double w : v) vmax = std::max(vmax, std::abs(w));
    double dt = cfg.cfl * state.grid().dx() / vmax;

    const double umax = linf_norm(total);
    for (const auto& m : {cfg.reaction1, cfg.reaction2}) {
        if (!m) continue;
        const double habs = m->max_abs_h(umax);
        if (habs > 0) dt = std::min(dt, cfg.cfl / habs);
        const double hd = m->max_abs_dh(umax);
        if (hd > 0) dt = std::min(dt, 0.5 / hd);
    }
    return std::min(dt, cfg.dt_max);
}

namespace {

// Advance with a precomputed face velocity field (frozen at step entry).
SimState advance(const SimState& state, const std::vector<double>& v_faces,
                 const SolverConfig& cfg, double dt, RunStats* stats) {
    const int n = state.grid().n_cells();
    const double dx = state.grid().dx();
    const Field total = state.total();

    SimState next = state;
    next.t = state.t + dt;
    next.step_count = state.step_count + 1;
    next.v_faces = v_faces;

    std::vector<double> um, up, flux(n);
    double clipped = 0;

    auto advect_species = [&](const Field& u, const std::optional<ReactionModel>& h) {
        reconstruct(u.values(), cfg.limiter, um, up);
        for (int i = 0; i < n; ++i) {
            // interface i+1/2: left state from cell i, right state from cell i+1
            flux[i] = numerical_flux(v_faces[i], up[i], um[(i + 1) % n]);
        }
        Field out(u.grid());
        for (int i = 0; i < n; ++i) {
            const double div_flux = (flux[i] - flux[(i + n - 1) % n]) / dx;
            double growth = 0;
            if (h) growth = u[i] * h->eval(std::max(total[i], 0.0));
            double v = u[i] - dt * div_flux + dt * growth;
            if (v < 0) {
                clipped += -v * dx;
                v = 0;
            }
            out[i] = v;
        }
        return out;
    };

    next.u1 = advect_species(state.u1, cfg.reaction1);
    next.u2 = advect_species(state.u2, cfg.reaction2);

    if (!next.u1.all_finite() || !next.u2.all_finite())
        throw NonFiniteState("solver produced non-finite values at t=" + std::to_string(next.t));
    if (stats) {
        stats->steps += 1;
        stats->dt_min = std::min(stats->dt_min, dt);
        stats->dt_max = std::max(stats->dt_max, dt);
        stats->clipped_mass += clipped;
    }
    return next;
}

} // namespace

SimState step(const SimState& state, const PeriodizedKernel& K, const SolverConfig& cfg,
              double dt, RunStats* stats) {
    if (!(dt > 0)) throw CflViolation("step: dt must be positive");
    const double bound = stable_dt(state, K, cfg);
    if (dt > bound * (1 + 1e-12))
        throw CflViolation("step: dt=" + std::to_string(dt) + " exceeds stable bound " +
                           std::to_string(bound));
    const Field total = state.total();
    auto v = interface_velocities(K, total);
    SimState next = advance(state, v, cfg, dt, stats);
    // keep the stored face velocities consistent with the carried densities
    next.v_faces = interface_velocities(K, next.total());
    return next;
}

SimState run(SimState state, const PeriodizedKernel& K, const SolverConfig& cfg,
             const std::function<void(const SimState&)>& on_snapshot, RunStats* stats) {
    if (!(cfg.cfl > 0) || cfg.cfl > 1) throw ConfigError("run: cfl must lie in (0, 1]");
    for (size_t i = 0; i < cfg.snapshot_times.size(); ++i) {
        const double s = cfg.snapshot_times[i];
        if (s < 0 || s > cfg.t_end + 1e-12) throw ConfigError("run: snapshot outside [0, t_end]");
        if (i > 0 && s < cfg.snapshot_times[i - 1]) throw ConfigError("run: snapshots not sorted");
    }
    if (!state.u1.all_finite() || !state.u2.all_finite() ||
        state.u1.min_value() < 0 || state.u2.min_value() < 0)
        throw NonFiniteState("run: initial state violates invariants");

    state.v_faces = interface_velocities(K, state.total());

    size_t next_snap = 0;
    auto fire_snapshots_at = [&](double t) {
        bool refreshed = false;
        while (next_snap < cfg.snapshot_times.size() &&
               std::abs(cfg.snapshot_times[next_snap] - t) < 1e-9) {
            if (!refreshed) {
                state.v_faces = interface_velocities(K, state.total());
                refreshed = true;
            }
            if (on_snapshot) on_snapshot(state);
            ++next_snap;
        }
    };
    fire_snapshots_at(0.0);

    const double t_eps = 1e-12 * std::max(1.0, cfg.t_end);
    while (state.t < cfg.t_end - t_eps) {
        double dt = stable_dt(state, K, cfg);
        double target = cfg.t_end;
        if (next_snap < cfg.snapshot_times.size())
            target = std::min(target, cfg.snapshot_times[next_snap]);
        if (state.t + dt > target - t_eps) dt = target - state.t;

        const auto v = interface_velocities(K, state.total());
        state = advance(state, v, cfg, dt, stats);
        if (std::abs(state.t - target) < t_eps) state.t = target;
        fire_snapshots_at(state.t);
    }
    state.v_faces = interface_velocities(K, state.total());
    return state;
}

} // namespace nladv
