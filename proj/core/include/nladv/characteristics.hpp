#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "nladv/grid.hpp"
#include "nladv/kernel.hpp"
#include "nladv/reaction.hpp"
#include "nladv/solver.hpp"

namespace nladv {

/// Time-indexed velocity field v(t, x) with its spatial divergence, defined on
/// a closed time interval. Evaluation outside the interval throws
/// VelocityUndefined.
class VelocityField {
public:
    virtual ~VelocityField() = default;
    virtual double t_begin() const = 0;
    virtual double t_end() const = 0;
    virtual double value(double t, double x) const = 0;
    virtual double divergence(double t, double x) const = 0;

protected:
    void require_in_range(double t) const;
};

/// Analytic velocity for desk checks.
class FunctionVelocity : public VelocityField {
public:
    using Fn = std::function<double(double, double)>;
    FunctionVelocity(Fn value, Fn divergence, double t0, double t1)
        : v_(std::move(value)), div_(std::move(divergence)), t0_(t0), t1_(t1) {}
    double t_begin() const override { return t0_; }
    double t_end() const override { return t1_; }
    double value(double t, double x) const override {
        require_in_range(t);
        return v_(t, x);
    }
    double divergence(double t, double x) const override {
        require_in_range(t);
        return div_(t, x);
    }

private:
    Fn v_, div_;
    double t0_, t1_;
};

/// Gridded velocity snapshots interpolated spectrally in space and linearly
/// in time. Stores the Fourier coefficients of each level.
class SampledSpectralVelocity : public VelocityField {
public:
    SampledSpectralVelocity(std::vector<double> times,
                            std::vector<std::vector<std::complex<double>>> level_coeffs);
    double t_begin() const override { return times_.front(); }
    double t_end() const override { return times_.back(); }
    double value(double t, double x) const override;
    double divergence(double t, double x) const override;

private:
    double series(int level, double x, int deriv) const;
    std::vector<double> times_;
    std::vector<std::vector<std::complex<double>>> coeffs_;
    std::vector<int> kcut_;
};

/// Characteristic positions X(t) = flow(t, 0; z) for a set of seed points,
/// stored unwrapped (continuous in t, congruent to the torus point mod 2*pi).
struct FlowMap {
    std::vector<double> times;
    std::vector<double> seeds;
    std::vector<std::vector<double>> positions;  // [time level][seed]

    bool monotone_in_seed() const;
};

/// RK4 integration of dX/dt = v(t, X) from t = 0 for every seed.
FlowMap integrate_flow(const VelocityField& v, std::vector<double> seeds, double t_end,
                       double dt);

struct JacobianReport {
    double max_rel_defect = 0;  // finite-difference dX/dz vs exp(int div v along X)
};

/// Check det dX/dz = exp(int_0^t div v(l, X(l)) dl) at the final time level,
/// differencing across neighbouring seeds.
JacobianReport jacobian_identity_check(const FlowMap& flow, const VelocityField& v);

struct CharacteristicSolution {
    std::vector<double> times;
    std::vector<double> seeds;                     // 2n seeds: interfaces and centers
    std::vector<std::vector<double>> w1, w2;       // densities along characteristics
    std::vector<std::vector<double>> jacobian;     // exp(int div v), > 0
    FlowMap flow;
    std::vector<double> residuals;                 // Picard residual per iteration
    int iterations = 0;
};

/// Picard iteration for the coupled (w, v) system on [0, tau]:
///   w_i(t,x) = exp(int_0^t h_i(w1+w2)(l,x) - div v'(l, X(l,x)) dl) u_i(0,x)
///   v'(t,x)  = -(1/2pi) int K'(x - X(t,z)) sum_i e^{int h_i} u_i(0,z) dz
/// where X is the flow of the previous velocity iterate. Stops when successive
/// iterates differ by less than tol in sup norm; throws NoContraction when
/// max_iter is exhausted (tau too large).
CharacteristicSolution fixed_point_iterate(const Field& u1_0, const Field& u2_0,
                                           const PeriodizedKernel& K,
                                           const std::optional<ReactionModel>& m1,
                                           const std::optional<ReactionModel>& m2,
                                           double tau, int max_iter = 40,
                                           double tol = 1e-10, int n_levels = 16);

/// fixed_point_iterate that halves tau and retries when no contraction occurs.
CharacteristicSolution fixed_point_solve(const Field& u1_0, const Field& u2_0,
                                         const PeriodizedKernel& K,
                                         const std::optional<ReactionModel>& m1,
                                         const std::optional<ReactionModel>& m2, double tau,
                                         int max_halvings = 4);

struct CrossCheckReport {
    double t = 0;
    double l1_diff_1 = 0;    // L1 distance between characteristic and FV species 1
    double l1_diff_2 = 0;
    double l1_rel = 0;       // combined, relative to the FV L1 mass
};

/// Push the characteristic densities to their Eulerian positions, interpolate
/// onto the grid and measure the L1 discrepancy against a finite-volume state
/// at the same time. Throws TimeMismatch when the times disagree.
CrossCheckReport cross_validate(const CharacteristicSolution& sol, const SimState& fv,
                                double t);

struct CharacteristicsValidation {
    JacobianReport frozen_field_jacobian;
    double composition_defect = 0;
    double contraction_ratio = 0;  // geometric ratio of successive Picard residuals
    int picard_iterations = 0;
    CrossCheckReport cross_check;
    bool converged = false;
};

/// Run the standard verification battery against the finite-volume solver and
/// write a structured text report.
CharacteristicsValidation validate_characteristics(const Field& u1_0, const Field& u2_0,
                                                   const PeriodizedKernel& K,
                                                   const std::optional<ReactionModel>& m1,
                                                   const std::optional<ReactionModel>& m2,
                                                   double tau);
void write_validation_report(std::ostream& out, const CharacteristicsValidation& v);

} // namespace nladv
