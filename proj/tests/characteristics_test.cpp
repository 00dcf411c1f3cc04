#include <doctest.h>

#include <cmath>
#include <sstream>

#include "nladv/characteristics.hpp"

using namespace nladv;

namespace {

std::vector<double> uniform_seeds(int count) {
    std::vector<double> s(count);
    for (int j = 0; j < count; ++j) s[j] = j * two_pi / count;
    return s;
}

Field cos2_bump(const PeriodicGrid& g, double center, double width, double height) {
    const double pi = two_pi / 2;
    Field f(g);
    for (int i = 0; i < g.n_cells(); ++i) {
        double d = std::fmod(g.center(i) - center + 3 * two_pi, two_pi);
        if (d > pi) d -= two_pi;
        if (std::abs(d) < width / 2) {
            const double c = std::cos(pi * d / width);
            f[i] = height * c * c;
        }
    }
    return f;
}

} // namespace

TEST_CASE("flow of the zero and constant velocity fields") {
    FunctionVelocity zero([](double, double) { return 0.0; },
                          [](double, double) { return 0.0; }, 0.0, 1.0);
    auto seeds = uniform_seeds(16);
    FlowMap f = integrate_flow(zero, seeds, 1.0, 0.05);
    for (const auto& level : f.positions)
        for (size_t j = 0; j < seeds.size(); ++j) CHECK(level[j] == seeds[j]);

    FunctionVelocity drift([](double, double) { return 0.7; },
                           [](double, double) { return 0.0; }, 0.0, 1.0);
    FlowMap d = integrate_flow(drift, seeds, 1.0, 0.05);
    for (size_t m = 0; m < d.times.size(); ++m)
        for (size_t j = 0; j < seeds.size(); ++j)
            CHECK(d.positions[m][j] ==
                  doctest::Approx(seeds[j] + 0.7 * d.times[m]).epsilon(1e-13));
}

TEST_CASE("flow of the frozen sine field matches the closed-form solution") {
    // dz/dt = sin(z) integrates to tan(z/2) = tan(z0/2) e^t
    FunctionVelocity vel([](double, double x) { return std::sin(x); },
                         [](double, double x) { return std::cos(x); }, 0.0, 1.0);
    auto seeds = uniform_seeds(32);
    const double T = 0.5;
    FlowMap f = integrate_flow(vel, seeds, T, 1e-3);
    for (size_t j = 0; j < seeds.size(); ++j) {
        const double z0 = seeds[j];
        if (std::abs(std::sin(z0)) < 1e-14) continue;  // fixed points of the flow
        const double exact = 2 * std::atan(std::tan(z0 / 2) * std::exp(T));
        double got = f.positions.back()[j];
        // compare on the circle
        double diff = std::remainder(got - exact, two_pi);
        CHECK(std::abs(diff) < 1e-10);
    }
}

TEST_CASE("flow identity, periodicity and monotonicity") {
    FunctionVelocity vel([](double, double x) { return std::sin(x); },
                         [](double, double x) { return std::cos(x); }, 0.0, 1.0);
    auto seeds = uniform_seeds(64);
    seeds.push_back(seeds[3] + two_pi);  // duplicated seed one period away
    FlowMap f = integrate_flow(vel, seeds, 0.4, 0.01);

    for (size_t j = 0; j < seeds.size(); ++j) CHECK(f.positions[0][j] == seeds[j]);

    const auto& last = f.positions.back();
    CHECK(last[64] == doctest::Approx(last[3] + two_pi).epsilon(1e-12));

    f.seeds.pop_back();
    for (auto& level : f.positions) level.pop_back();
    CHECK(f.monotone_in_seed());
}

TEST_CASE("flow composition") {
    FunctionVelocity vel([](double, double x) { return std::sin(x); },
                         [](double, double x) { return std::cos(x); }, 0.0, 1.0);
    auto seeds = uniform_seeds(16);
    const double T = 0.3;
    FlowMap full = integrate_flow(vel, seeds, T, T / 64);
    FlowMap half = integrate_flow(vel, seeds, T / 2, T / 128);
    FunctionVelocity shifted([](double t, double x) { (void)t; return std::sin(x); },
                             [](double t, double x) { (void)t; return std::cos(x); }, 0.0, 1.0);
    FlowMap rest = integrate_flow(shifted, half.positions.back(), T / 2, T / 128);
    for (size_t j = 0; j < seeds.size(); ++j)
        CHECK(rest.positions.back()[j] ==
              doctest::Approx(full.positions.back()[j]).epsilon(1e-10));
}

TEST_CASE("velocity evaluation outside the stored range is rejected") {
    FunctionVelocity vel([](double, double) { return 1.0; },
                         [](double, double) { return 0.0; }, 0.0, 0.5);
    CHECK_THROWS_AS(integrate_flow(vel, uniform_seeds(8), 1.0, 0.1), VelocityUndefined);
}

TEST_CASE("jacobian identity for trivial flows") {
    auto seeds = uniform_seeds(128);
    FunctionVelocity zero([](double, double) { return 0.0; },
                          [](double, double) { return 0.0; }, 0.0, 1.0);
    FlowMap f0 = integrate_flow(zero, seeds, 0.5, 0.01);
    CHECK(jacobian_identity_check(f0, zero).max_rel_defect < 1e-12);

    FunctionVelocity drift([](double, double) { return 0.9; },
                           [](double, double) { return 0.0; }, 0.0, 1.0);
    FlowMap fd = integrate_flow(drift, seeds, 0.5, 0.01);
    CHECK(jacobian_identity_check(fd, drift).max_rel_defect < 1e-12);
}

TEST_CASE("jacobian identity for the frozen sine field") {
    FunctionVelocity vel([](double, double x) { return std::sin(x); },
                         [](double, double x) { return std::cos(x); }, 0.0, 1.0);
    auto seeds = uniform_seeds(512);
    FlowMap f = integrate_flow(vel, seeds, 0.1, 0.1 / 64);
    CHECK(jacobian_identity_check(f, vel).max_rel_defect < 1e-4);
}

TEST_CASE("picard iteration on trivial data") {
    PeriodicGrid g(32);
    PeriodizedKernel K = PeriodizedKernel::periodize(BaseKernel::gaussian(), g, 4);
    auto m1 = std::optional<ReactionModel>(ReactionModel::contact_inhibition(1.2, 1.0, 1.0));
    auto m2 = std::optional<ReactionModel>(ReactionModel::logistic(1.2, 0.2));

    SUBCASE("zero initial data converges immediately to zero") {
        CharacteristicSolution sol =
            fixed_point_iterate(Field(g, 0.0), Field(g, 0.0), K, m1, m2, 0.05);
        CHECK(sol.iterations <= 2);
        for (const auto& level : sol.w1)
            for (double v : level) CHECK(v == 0.0);
    }

    SUBCASE("constant equilibrium is a fixed point") {
        CharacteristicSolution sol =
            fixed_point_iterate(Field(g, 0.2), Field(g, 0.0), K, m1, m2, 0.05);
        for (const auto& level : sol.w1)
            for (double v : level) CHECK(v == doctest::Approx(0.2).epsilon(1e-9));
        for (const auto& level : sol.jacobian)
            for (double v : level) {
                CHECK(v > 0.0);
                CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
            }
    }
}

TEST_CASE("picard iteration contracts on bump data") {
    PeriodicGrid g(64);
    PeriodizedKernel K = PeriodizedKernel::periodize(BaseKernel::gaussian(), g, 4);
    auto m1 = std::optional<ReactionModel>(ReactionModel::contact_inhibition(1.2, 1.0, 1.0));
    auto m2 = std::optional<ReactionModel>(ReactionModel::logistic(1.2, 0.2));
    Field u1 = cos2_bump(g, 1.0, 1.2, 0.4);
    Field u2 = cos2_bump(g, 4.0, 1.2, 0.3);

    CharacteristicSolution sol = fixed_point_iterate(u1, u2, K, m1, m2, 0.05);
    REQUIRE(sol.residuals.size() >= 2);
    for (size_t k = 1; k < sol.residuals.size(); ++k)
        CHECK(sol.residuals[k] < sol.residuals[k - 1]);

    // densities stay nonnegative, jacobian stays positive
    for (const auto& level : sol.w1)
        for (double v : level) CHECK(v >= 0.0);
    for (const auto& level : sol.jacobian)
        for (double v : level) CHECK(v > 0.0);
}

TEST_CASE("initially empty seeds stay empty along characteristics") {
    PeriodicGrid g(64);
    PeriodizedKernel K = PeriodizedKernel::periodize(BaseKernel::gaussian(), g, 4);
    auto m1 = std::optional<ReactionModel>(ReactionModel::contact_inhibition(1.2, 1.0, 1.0));
    auto m2 = std::optional<ReactionModel>(ReactionModel::logistic(1.2, 0.2));
    Field u1 = cos2_bump(g, 1.0, 1.2, 0.4);
    Field u2 = cos2_bump(g, 4.0, 1.2, 0.3);
    CharacteristicSolution sol = fixed_point_iterate(u1, u2, K, m1, m2, 0.05);

    for (size_t j = 0; j < sol.seeds.size(); ++j) {
        const bool empty1 = sol.w1[0][j] == 0.0, empty2 = sol.w2[0][j] == 0.0;
        for (size_t m = 0; m < sol.times.size(); ++m) {
            if (empty1) CHECK(sol.w1[m][j] == 0.0);
            if (empty2) CHECK(sol.w2[m][j] == 0.0);
            CHECK(sol.w1[m][j] * sol.w2[m][j] == 0.0);  // segregation along characteristics
        }
    }
}

TEST_CASE("no contraction for an oversized horizon is reported and retried") {
    PeriodicGrid g(32);
    PeriodizedKernel K = PeriodizedKernel::periodize(BaseKernel::gaussian(), g, 4);
    auto m1 = std::optional<ReactionModel>(ReactionModel::contact_inhibition(1.2, 1.0, 1.0));
    auto m2 = std::optional<ReactionModel>(ReactionModel::logistic(1.2, 0.2));
    Field u1 = cos2_bump(g, 1.0, 1.2, 3.0);
    Field u2 = cos2_bump(g, 4.0, 1.2, 3.0);
    CHECK_THROWS_AS(fixed_point_iterate(u1, u2, K, m1, m2, 20.0, 6, 1e-10, 8), NoContraction);

    CharacteristicSolution sol = fixed_point_solve(u1, u2, K, m1, m2, 0.4);
    CHECK(sol.times.back() <= 0.4 + 1e-12);
    CHECK(sol.iterations > 0);
}

TEST_CASE("cross validation against the finite-volume solver") {
    PeriodicGrid g(64);
    PeriodizedKernel K = PeriodizedKernel::periodize(BaseKernel::gaussian(), g, 4);
    auto m1 = std::optional<ReactionModel>(ReactionModel::contact_inhibition(1.2, 1.0, 1.0));
    auto m2 = std::optional<ReactionModel>(ReactionModel::logistic(1.2, 0.2));

    SUBCASE("time mismatch is rejected") {
        Field u1(g, 0.2), u2(g, 0.0);
        CharacteristicSolution sol = fixed_point_iterate(u1, u2, K, m1, m2, 0.05);
        SimState fv(u1, u2);
        CHECK_THROWS_AS(cross_validate(sol, fv, 0.05), TimeMismatch);
    }

    SUBCASE("constant equilibrium matches to high accuracy") {
        Field u1(g, 0.2), u2(g, 0.0);
        CharacteristicSolution sol = fixed_point_iterate(u1, u2, K, m1, m2, 0.05);
        SolverConfig cfg;
        cfg.t_end = 0.05;
        cfg.reaction1 = m1;
        cfg.reaction2 = m2;
        SimState fv = run(SimState(u1, u2), K, cfg);
        CrossCheckReport rep = cross_validate(sol, fv, 0.05);
        CHECK(rep.l1_diff_1 + rep.l1_diff_2 < 1e-10);
    }

    SUBCASE("bump data discrepancy shrinks under refinement") {
        std::vector<double> gaps;
        for (int n : {64, 128}) {
            PeriodicGrid gr(n);
            PeriodizedKernel Kn = PeriodizedKernel::periodize(BaseKernel::gaussian(), gr, 4);
            Field u1 = cos2_bump(gr, 1.0, 1.2, 0.4);
            Field u2 = cos2_bump(gr, 4.0, 1.2, 0.3);
            CharacteristicSolution sol = fixed_point_iterate(u1, u2, Kn, m1, m2, 0.05);
            SolverConfig cfg;
            cfg.t_end = 0.05;
            cfg.reaction1 = m1;
            cfg.reaction2 = m2;
            SimState fv = run(SimState(u1, u2), Kn, cfg);
            CrossCheckReport rep = cross_validate(sol, fv, 0.05);
            gaps.push_back(rep.l1_diff_1 + rep.l1_diff_2);
        }
        CHECK(gaps[1] < gaps[0]);
    }
}

TEST_CASE("validation battery writes a structured report") {
    PeriodicGrid g(64);
    PeriodizedKernel K = PeriodizedKernel::periodize(BaseKernel::gaussian(), g, 4);
    auto m1 = std::optional<ReactionModel>(ReactionModel::contact_inhibition(1.2, 1.0, 1.0));
    auto m2 = std::optional<ReactionModel>(ReactionModel::logistic(1.2, 0.2));
    Field u1 = cos2_bump(g, 1.0, 1.2, 0.4);
    Field u2 = cos2_bump(g, 4.0, 1.2, 0.3);
    CharacteristicsValidation v = validate_characteristics(u1, u2, K, m1, m2, 0.05);
    CHECK(v.converged);
    CHECK(v.contraction_ratio < 1.0);
    CHECK(v.frozen_field_jacobian.max_rel_defect < 1e-4);
    CHECK(v.composition_defect < 1e-9);

    std::ostringstream out;
    write_validation_report(out, v);
    CHECK(out.str().find("[pass]") != std::string::npos);
    CHECK(out.str().find("jacobian identity defect") != std::string::npos);
}
