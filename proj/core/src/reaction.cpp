#include "nladv/reaction.hpp"

#include <algorithm>
#include <cmath>

namespace nladv {

ReactionModel ReactionModel::logistic(double b, double cap) {
    if (!(b > 0) || !(cap > 0)) throw ConfigError("logistic: need b > 0 and cap > 0");
    ReactionModel m;
    m.kind_ = ReactionKind::Logistic;
    m.b_ = b;
    m.cap_ = cap;
    m.root_ = cap;
    return m;
}

ReactionModel ReactionModel::contact_inhibition(double b, double gamma, double mu) {
    if (!(mu > 0) || !(gamma > 0)) throw ConfigError("contact_inhibition: need mu > 0, gamma > 0");
    if (!(b > mu)) throw NoPositiveRoot("contact_inhibition: b <= mu leaves no positive root");
    ReactionModel m;
    m.kind_ = ReactionKind::ContactInhibition;
    m.b_ = b;
    m.gamma_ = gamma;
    m.mu_ = mu;
    m.root_ = (b - mu) / (gamma * mu);
    return m;
}

double ReactionModel::eval(double u) const {
    if (u < 0) throw NegativeDensity("reaction evaluated at negative density");
    if (kind_ == ReactionKind::Logistic) return b_ * (1.0 - u / cap_);
    return b_ / (1.0 + gamma_ * u) - mu_;
}

double ReactionModel::max_abs_h(double u_max) const {
    // decreasing in u, so the extremes sit at the interval ends
    return std::max(std::abs(eval(0.0)), std::abs(eval(std::max(u_max, 0.0))));
}

double ReactionModel::max_abs_dh(double u_max) const {
    (void)u_max;
    if (kind_ == ReactionKind::Logistic) return b_ / cap_;
    return b_ * gamma_; // |h'| = b gamma / (1 + gamma u)^2, largest at u = 0
}

AssumptionReport validate_assumptions(const ReactionModel& m, double probe_max,
                                      int probe_points) {
    const double r = m.root();
    if (!(probe_max > r)) throw ConfigError("validate_assumptions: probe_max must exceed the root");
    const double hi = std::max(2 * r, probe_max);
    const double du = hi / (probe_points - 1);

    AssumptionReport rep;
    auto fail = [&](const std::string& msg) { rep.failures.push_back(msg); };

    if (std::abs(m.eval(r)) > 1e-12) fail("h(root) is not zero");

    for (int i = 0; i < probe_points; ++i) {
        const double u = i * du;
        const double h = m.eval(u);
        if (u < r - du && !(h > 0)) {
            fail("h is not positive below the root (u=" + std::to_string(u) + ")");
            break;
        }
        if (u > r + du && !(h < 0)) {
            fail("h is not negative above the root (u=" + std::to_string(u) + ")");
            break;
        }
    }

    // concavity of f(u) = u h(u): centered second differences must be <= tol
    for (int i = 1; i + 1 < probe_points; ++i) {
        const double u = i * du;
        const double f0 = (u - du) * m.eval(u - du);
        const double f1 = u * m.eval(u);
        const double f2 = (u + du) * m.eval(u + du);
        if (f0 - 2 * f1 + f2 > 1e-8 * std::max(1.0, std::abs(f1))) {
            fail("u*h(u) fails concavity near u=" + std::to_string(u));
            break;
        }
    }

    if (!(m.eval(hi) < 0)) fail("h stays nonnegative at the probe end");

    if (m.kind() == ReactionKind::Logistic) {
        rep.warnings.push_back("logistic h is unbounded below; structural checks hold on the "
                               "probe range only");
    }

    rep.passed = rep.failures.empty();
    if (!rep.passed) throw AssumptionViolated(rep.failures.front());
    return rep;
}

} // namespace nladv
