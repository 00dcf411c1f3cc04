#include <doctest.h>

#include <cmath>
#include <random>

#include "nladv/grid.hpp"

using namespace nladv;

TEST_CASE("grid construction and invariants") {
    PeriodicGrid g(64);
    CHECK(g.n_cells() == 64);
    CHECK(g.dx() * g.n_cells() == doctest::Approx(g.length()).epsilon(1e-15));
    for (int i = 0; i < g.n_cells(); ++i) {
        CHECK(g.center(i) >= 0.0);
        CHECK(g.center(i) < g.length());
        if (i > 0) CHECK(g.center(i) > g.center(i - 1));
    }
    CHECK_THROWS_AS(PeriodicGrid(3), ConfigError);
}

TEST_CASE("mean of fields") {
    PeriodicGrid g(128);

    CHECK(mean(Field(g, 0.2)) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(mean(Field(g, 0.0)) == 0.0);

    // indicator of half the cells at value 1: expected value by direct sum
    Field ind(g);
    double direct = 0;
    for (int i = 0; i < 64; ++i) ind[i] = 1.0;
    for (int i = 0; i < g.n_cells(); ++i) direct += ind[i] * g.dx();
    direct /= g.length();
    CHECK(direct == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(mean(ind) == doctest::Approx(direct).epsilon(1e-15));
}

TEST_CASE("l1 norm") {
    PeriodicGrid g(64);
    CHECK(l1_norm(Field(g, 0.2)) == doctest::Approx(0.2 * two_pi).epsilon(1e-14));
    CHECK(l1_norm(Field(g, 0.0)) == 0.0);

    Field one_cell(g);
    one_cell[17] = 1.0 / g.dx();
    CHECK(l1_norm(one_cell) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("linf norm") {
    PeriodicGrid g(16);
    CHECK(linf_norm(Field(g, 0.2)) == doctest::Approx(0.2));
    Field f(g);
    f[0] = 0.0;
    f[1] = 0.5;
    f[2] = 0.3;
    CHECK(linf_norm(f) == doctest::Approx(0.5));
    CHECK(linf_norm(Field(g, 0.0)) == 0.0);
}

TEST_CASE("mean equals l1/length for nonnegative fields") {
    PeriodicGrid g(96);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> uni(0.0, 3.0);
    for (int trial = 0; trial < 5; ++trial) {
        Field f(g);
        for (int i = 0; i < g.n_cells(); ++i) f[i] = uni(rng);
        CHECK(mean(f) == doctest::Approx(l1_norm(f) / g.length()).epsilon(1e-13));
    }
}

TEST_CASE("norms are invariant under cyclic rotation") {
    PeriodicGrid g(80);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    Field f(g);
    for (int i = 0; i < g.n_cells(); ++i) f[i] = uni(rng);
    for (int shift : {1, 13, 40, 79}) {
        Field r = rotated(f, shift);
        CHECK(mean(r) == doctest::Approx(mean(f)).epsilon(1e-13));
        CHECK(l1_norm(r) == doctest::Approx(l1_norm(f)).epsilon(1e-13));
        CHECK(linf_norm(r) == doctest::Approx(linf_norm(f)).epsilon(1e-15));
    }
}

TEST_CASE("field construction checks") {
    PeriodicGrid g(8);
    CHECK_THROWS_AS(Field(g, std::vector<double>(7, 0.0)), GridMismatch);
    Field f(g, std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8});
    CHECK(f.all_finite());
    CHECK(f.min_value() == 1.0);
}
