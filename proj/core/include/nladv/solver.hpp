#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "nladv/grid.hpp"
#include "nladv/kernel.hpp"
#include "nladv/reaction.hpp"

namespace nladv {

enum class Limiter { Minmod, None };

struct SolverConfig {
    double cfl = 0.45;                       // in (0, 1]
    double t_end = 0;
    std::vector<double> snapshot_times;      // sorted, within [0, t_end]
    Limiter limiter = Limiter::Minmod;
    std::optional<ReactionModel> reaction1;  // nullopt = no growth term
    std::optional<ReactionModel> reaction2;
    double dt_max = std::numeric_limits<double>::infinity();
};

struct SimState {
    double t = 0;
    Field u1;
    Field u2;
    std::vector<double> v_faces;  // v_{i+1/2}, index i = interface right of cell i
    long step_count = 0;

    SimState(Field a, Field b) : u1(std::move(a)), u2(std::move(b)) {
        require_same_grid(u1, u2);
    }
    const PeriodicGrid& grid() const { return u1.grid(); }
    Field total() const { return u1 + u2; }
};

struct RunStats {
    long steps = 0;
    double dt_min = std::numeric_limits<double>::infinity();
    double dt_max = 0;
    double clipped_mass = 0;  // total |negative undershoot| * dx removed by clipping
};

/// minmod(a, b): the argument of smaller magnitude when signs agree, else 0.
inline double minmod(double a, double b) {
    if (a > 0 && b > 0) return std::min(a, b);
    if (a < 0 && b < 0) return std::max(a, b);
    return 0.0;
}

/// MUSCL extrapolation with periodic neighbours:
///   u_i^- = u_i - s_i/2,  u_i^+ = u_i + s_i/2,
///   s_i = minmod(u_{i+1} - u_i, u_i - u_{i-1}).
void reconstruct(std::span<const double> u, Limiter limiter,
                 std::vector<double>& u_minus, std::vector<double>& u_plus);

/// Upwind flux through an interface: v * (state on the side v blows from).
///   F = v (uL + uR)/2 - |v| (uR - uL)/2
inline double numerical_flux(double v_face, double u_left_state, double u_right_state) {
    return 0.5 * v_face * (u_left_state + u_right_state) -
           0.5 * std::abs(v_face) * (u_right_state - u_left_state);
}

/// Physical interface velocities v_{i+1/2} = -(l_{i+1} - l_i)/dx with
/// l = K o u_total tabulated at cell centers.
std::vector<double> interface_velocities(const PeriodizedKernel& K, const Field& u_total);

/// Largest dt the CFL and reaction-stability conditions admit for this state.
double stable_dt(const SimState& state, const PeriodizedKernel& K, const SolverConfig& cfg);

/// One forward-Euler step of size dt: conservative flux differences plus the
/// pointwise growth term u_i h_i(u1 + u2), both species advected with the same
/// velocity field frozen at step entry. Negative undershoots are clipped to 0
/// and the removed mass is accumulated in stats.
/// Throws CflViolation when dt exceeds the stable bound and NonFiniteState if
/// the update produces non-finite values.
SimState step(const SimState& state, const PeriodizedKernel& K, const SolverConfig& cfg,
              double dt, RunStats* stats = nullptr);

/// Advance to cfg.t_end with adaptive CFL-limited steps, landing exactly on
/// each snapshot time and invoking the callback there (including t = 0 and
/// t_end when listed). Returns the final state.
SimState run(SimState initial, const PeriodizedKernel& K, const SolverConfig& cfg,
             const std::function<void(const SimState&)>& on_snapshot = {},
             RunStats* stats = nullptr);

} // namespace nladv
