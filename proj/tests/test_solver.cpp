#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "plap/solver.hpp"

using namespace plap;

namespace {

const double pi = 3.14159265358979323846;

GridPtr interval_grid(double h, double a = 0, double b = 1) {
    return build_grid(DomainSpec::interval(a, b), h, Window::make1d(a - 0.1, b + 0.1));
}

} // namespace

TEST_CASE("interval ground state, p = 2") {
    auto g = interval_grid(1.0 / 128);
    auto r = solve_ground_state(g, 2.0);
    CHECK(r.converged);
    CHECK(r.lambda == doctest::Approx(pi * pi).epsilon(0.01));
    CHECK(r.residual < 1e-8 * std::max(1.0, r.lambda));
    // normalized, nonnegative representative
    CHECK(lp_norm_p(r.u, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.u.values.minCoeff() >= 0.0);
    // recorded descent history never increases
    for (size_t i = 1; i < r.energy_history.size(); ++i)
        CHECK(r.energy_history[i] <= r.energy_history[i - 1] * (1 + 1e-15));
}

TEST_CASE("interval ground state, p = 3") {
    auto g = interval_grid(1.0 / 64);
    auto r = solve_ground_state(g, 3.0);
    CHECK(r.converged);
    // lambda_{1,p} = pi_p^p with pi_3 = 2 pi 2^{1/3} / (3 sin(pi/3))
    double pi3 = 2 * pi * std::cbrt(2.0) / (3 * std::sin(pi / 3));
    CHECK(r.lambda == doctest::Approx(pi3 * pi3 * pi3).epsilon(0.01));
}

TEST_CASE("rayleigh quotient") {
    auto g = interval_grid(0.125);
    Field u = Field::zero(g);
    for (int k = 0; k < u.values.size(); ++k) u.values[k] = 1.0 + 0.1 * k;
    double q = rayleigh(u, 2.0);
    Field v(g, 5.0 * u.values);
    CHECK(rayleigh(v, 2.0) == doctest::Approx(q).epsilon(1e-13));  // scale invariant
    CHECK(q >= pi * pi * 0.9);  // never below the ground level
    CHECK_THROWS_AS(rayleigh(Field::zero(g), 2.0), DivisionByZero);
}

TEST_CASE("residual norm is small only at eigenpairs") {
    auto g = interval_grid(1.0 / 64);
    auto r = solve_ground_state(g, 2.0);
    CHECK(residual_norm(r.u, r.lambda, 2.0) == doctest::Approx(r.residual).epsilon(1e-6));
    CHECK(residual_norm(r.u, r.lambda * 1.1, 2.0) > 1e3 * r.residual);
}

TEST_CASE("courant fischer on the interval") {
    auto g = interval_grid(1.0 / 512);
    auto vals = courant_fischer_p2(g, 3);
    REQUIRE(vals.size() == 3);
    CHECK(vals[0] == doctest::Approx(pi * pi).epsilon(0.01));
    CHECK(vals[1] == doctest::Approx(4 * pi * pi).epsilon(0.01));
    CHECK(vals[2] == doctest::Approx(9 * pi * pi).epsilon(0.01));
}

TEST_CASE("courant fischer on the unit square") {
    auto g = build_grid(DomainSpec::box({0, 0}, {1, 1}), 1.0 / 32, Window::centered(2, 2.5));
    auto vals = courant_fischer_p2(g, 2);
    CHECK(vals[0] == doctest::Approx(2 * pi * pi).epsilon(0.02));
    CHECK(vals[1] == doctest::Approx(5 * pi * pi).epsilon(0.02));
}

TEST_CASE("projected gradient agrees with courant fischer at p = 2") {
    auto g = interval_grid(1.0 / 128);
    auto r = solve_ground_state(g, 2.0);
    auto vals = courant_fischer_p2(g, 1);
    CHECK(r.lambda == doctest::Approx(vals[0]).epsilon(1e-6));
}

TEST_CASE("perturbed levels sandwich the unperturbed one") {
    auto g = interval_grid(1.0 / 64, -0.5, 0.5);
    double lam0 = solve_ground_state(g, 2.0).lambda;
    auto V = PotentialSpec::power_law(2.0);
    auto sweep = sweep_perturbed(g, 2.0, V, {1.0, 0.1, 0.01, 0.001});
    REQUIRE(sweep.size() == 4);
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& r : sweep) {
        CHECK(r.converged);
        CHECK(r.lambda >= lam0);  // adding a nonnegative potential can only raise the level
        CHECK(r.lambda <= prev * (1 + 1e-12));
        CHECK(r.sup_ratio > 0.0);
        prev = r.lambda;
    }
    // continuity as the amplitude vanishes
    CHECK(sweep.back().lambda == doctest::Approx(lam0).epsilon(1e-4));
}

TEST_CASE("perturbed sweep validates its schedule") {
    auto g = interval_grid(0.125);
    auto V = PotentialSpec::power_law(2.0);
    CHECK_THROWS_AS(sweep_perturbed(g, 2.0, V, {}), InvalidInput);
    CHECK_THROWS_AS(sweep_perturbed(g, 2.0, V, {0.1, 0.5}), InvalidInput);
    CHECK_THROWS_AS(solve_perturbed(g, 2.0, V, 0.0), InvalidInput);
}

TEST_CASE("upper bound from disjoint pieces") {
    auto a = interval_grid(1.0 / 64, 0, 1);
    auto b = interval_grid(1.0 / 64, 2, 2.5);
    double bound = ls_upper_bound({a, b}, 2.0);
    // the worse (smaller) piece decides: lambda_1((2, 2.5)) = 4 pi^2
    CHECK(bound == doctest::Approx(4 * pi * pi).epsilon(0.01));
    // overlapping supports are rejected
    auto c = interval_grid(1.0 / 64, 0.5, 1.5);
    CHECK_THROWS_AS(ls_upper_bound({a, c}, 2.0), DisjointnessViolation);
    CHECK_THROWS_AS(ls_upper_bound({}, 2.0), InvalidInput);
    auto fine = interval_grid(1.0 / 128, 2, 2.5);
    CHECK_THROWS_AS(ls_upper_bound({a, fine}, 2.0), InvalidInput);  // mismatched lattice
}

TEST_CASE("solver rejects bad inputs") {
    auto g = interval_grid(0.125);
    SolverOptions bad;
    bad.max_iters = 0;
    CHECK_THROWS_AS(solve_ground_state(g, 2.0, bad), InvalidInput);
    CHECK_THROWS_AS(solve_ground_state(g, 1.0), InvalidInput);
    CHECK_THROWS_AS(solve_ground_state(nullptr, 2.0), EmptyGrid);
}

TEST_CASE("restarts keep the best level") {
    auto g = build_grid(DomainSpec::box({0, 0}, {2, 1}), 1.0 / 16, Window::centered(2, 4.5));
    SolverOptions o;
    o.restarts = 2;
    auto r = solve_ground_state(g, 2.0, o);
    CHECK(r.converged);
    CHECK(r.lambda == doctest::Approx(pi * pi * (0.25 + 1)).epsilon(0.03));
}
