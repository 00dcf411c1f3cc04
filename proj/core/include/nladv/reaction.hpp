#pragma once

#include <string>
#include <vector>

#include "nladv/errors.hpp"

namespace nladv {

enum class ReactionKind { Logistic, ContactInhibition };

/// Per-species growth law h(u) applied to the total density, with a single
/// positive root r: h(r) = 0, h > 0 below r, h < 0 above, and u*h(u) concave.
///
/// Two built-in families:
///   logistic            h(u) = b (1 - u/cap),            r = cap
///   contact inhibition  h(u) = b / (1 + gamma u) - mu,   r = (b - mu)/(gamma mu)
class ReactionModel {
public:
    static ReactionModel logistic(double b, double cap);
    static ReactionModel contact_inhibition(double b, double gamma, double mu);

    ReactionKind kind() const { return kind_; }
    double root() const { return root_; }

    double eval(double u) const;
    double operator()(double u) const { return eval(u); }

    /// sup |h| over [0, u_max] (both families are monotone decreasing).
    double max_abs_h(double u_max) const;
    /// sup |h'| over [0, u_max].
    double max_abs_dh(double u_max) const;

    double b() const { return b_; }
    double cap() const { return cap_; }
    double gamma() const { return gamma_; }
    double mu() const { return mu_; }

private:
    ReactionModel() = default;
    ReactionKind kind_ = ReactionKind::Logistic;
    double b_ = 0, cap_ = 0, gamma_ = 0, mu_ = 0;
    double root_ = 0;
};

struct AssumptionReport {
    bool passed = false;
    std::vector<std::string> failures;
    std::vector<std::string> warnings;
};

/// Numerically check the structural hypotheses on a probe grid over
/// [0, max(2r, probe_max)]: sign pattern of h around the root, concavity of
/// u*h(u) via second differences, and negativity at the probe end.
/// Throws AssumptionViolated naming the failed clause.
AssumptionReport validate_assumptions(const ReactionModel& m, double probe_max,
                                      int probe_points = 1000);

} // namespace nladv
