#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "plap/energy.hpp"
#include "plap/solver.hpp"

using namespace plap;

namespace {

GridPtr interval_grid(double h) {
    return build_grid(DomainSpec::interval(0, 1), h, Window::make1d(-0.1, 1.1));
}

Field ones(const GridPtr& g) {
    Field u = Field::zero(g);
    u.values.setOnes();
    return u;
}

} // namespace

TEST_CASE("hat function energy on the interval") {
    // one interior node at 1/2, hat of height 1: |u'| = 2 on both halves
    auto g = interval_grid(0.5);
    REQUIRE(g->interior_count() == 1);
    Field u = ones(g);
    CHECK(dirichlet_energy_p(u, 2.0) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(dirichlet_energy_p(u, 3.0) == doctest::Approx(8.0).epsilon(1e-14));
    CHECK(lp_norm_p(u, 2.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(lp_norm_p(u, 3.0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("p homogeneity") {
    auto g = interval_grid(0.125);
    Field u = Field::zero(g);
    for (int k = 0; k < u.values.size(); ++k) u.values[k] = std::sin(2.7 * k) + 0.3;
    for (double p : {1.5, 2.0, 3.0, 4.7}) {
        double e = dirichlet_energy_p(u, p);
        double n = lp_norm_p(u, p);
        Field v(g, 3.0 * u.values);
        CHECK(dirichlet_energy_p(v, p) == doctest::Approx(std::pow(3.0, p) * e).epsilon(1e-12));
        CHECK(lp_norm_p(v, p) == doctest::Approx(std::pow(3.0, p) * n).epsilon(1e-12));
    }
}

TEST_CASE("quadratic gradient equals twice the stiffness action") {
    auto g = build_grid(DomainSpec::box({0, 0}, {1, 1}), 0.125, Window::centered(2, 2.5));
    Field u = Field::zero(g);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    for (int k = 0; k < u.values.size(); ++k) u.values[k] = nd(rng);
    Eigen::VectorXd grad = energy_gradient(u, 2.0).values;
    Eigen::VectorXd ku = stiffness_apply(*g, u.values);
    CHECK((grad - 2.0 * ku).lpNorm<Eigen::Infinity>() < 1e-12 * grad.lpNorm<Eigen::Infinity>());
}

TEST_CASE("gradient matches finite differences") {
    auto g = build_grid(DomainSpec::box({0, 0}, {1, 1}), 0.25, Window::centered(2, 2.5));
    Field u = Field::zero(g);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ud(0.5, 1.5);
    for (int k = 0; k < u.values.size(); ++k) u.values[k] = ud(rng);
    for (double p : {1.5, 2.0, 3.0, 3.5, 4.7}) {
        Eigen::VectorXd grad = energy_gradient(u, p).values;
        double d = 1e-6;
        for (int k = 0; k < u.values.size(); ++k) {
            Field up = u, dn = u;
            up.values[k] += d;
            dn.values[k] -= d;
            double fd = (dirichlet_energy_p(up, p) - dirichlet_energy_p(dn, p)) / (2 * d);
            CHECK(grad[k] == doctest::Approx(fd).epsilon(1e-5));
        }
    }
}

TEST_CASE("weighted energy adds the potential term") {
    auto g = interval_grid(0.5);  // single node at x = 1/2
    Field u = ones(g);
    auto V = PotentialSpec::power_law(2.0);
    // E + eps * m * |x|^2 * |u|^p = 4 + 0.4 * 0.5 * 0.25
    CHECK(weighted_energy(u, V, 0.4, 2.0) == doctest::Approx(4.05).epsilon(1e-14));
    Eigen::VectorXd gv = weighted_energy_gradient_potential(u, V, 0.4, 2.0).values;
    REQUIRE(gv.size() == 1);
    CHECK(gv[0] == doctest::Approx(0.4 * 2.0 * 0.5 * 0.25).epsilon(1e-14));
}

TEST_CASE("weighted gradient against finite differences") {
    auto g = interval_grid(0.125);
    Field u = Field::zero(g);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ud(0.2, 1.0);
    for (int k = 0; k < u.values.size(); ++k) u.values[k] = ud(rng);
    auto V = PotentialSpec::power_law(1.5);
    for (double p : {2.0, 3.0}) {
        Eigen::VectorXd grad = energy_gradient(u, p).values +
                               weighted_energy_gradient_potential(u, V, 0.7, p).values;
        double d = 1e-7;
        for (int k = 0; k < u.values.size(); ++k) {
            Field up = u, dn = u;
            up.values[k] += d;
            dn.values[k] -= d;
            double fd = (weighted_energy(up, V, 0.7, p) - weighted_energy(dn, V, 0.7, p)) / (2 * d);
            CHECK(grad[k] == doctest::Approx(fd).epsilon(1e-5));
        }
    }
}

TEST_CASE("elementary inequality constant") {
    CHECK(elementary_inequality_constant(2.0) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK_THROWS_AS(elementary_inequality_constant(1.0), InvalidInput);
}

TEST_CASE("elementary inequality sampled") {
    // ||a+b|^p - |a|^p| <= eps |a|^p + c_p eps^{1-p} |b|^p for 0 < eps < 1
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ua(-10, 10), ue(1e-3, 0.999);
    for (double p : {1.5, 2.0, 3.0}) {
        double cp = elementary_inequality_constant(p);
        for (int i = 0; i < 20000; ++i) {
            double a = ua(rng), b = ua(rng), eps = ue(rng);
            double lhs = std::abs(std::pow(std::abs(a + b), p) - std::pow(std::abs(a), p));
            double rhs = eps * std::pow(std::abs(a), p) +
                         cp * std::pow(eps, 1 - p) * std::pow(std::abs(b), p);
            CHECK(lhs <= rhs * (1 + 1e-12));
        }
    }
}

TEST_CASE("potential schedules validate") {
    CHECK_THROWS_AS(PotentialSpec::power_law(0.0), InvalidInput);
    CHECK_THROWS_AS(PotentialSpec::power_law_geometric(2, 1.0, 1.5, 3), InvalidInput);
    auto v = PotentialSpec::power_law_geometric(2, 1.0, 0.1, 3);
    REQUIRE(v.eps_list.size() == 3);
    CHECK(v.eps_list[2] == doctest::Approx(0.01));
    CHECK_THROWS_AS(PotentialSpec::power_law_with_schedule(2, {0.1, 0.5}), InvalidInput);
    CHECK_THROWS_AS(PotentialSpec::power_law_with_schedule(2, {0.1, -0.5}), InvalidInput);
    CHECK(PotentialSpec::power_law(2.5).value(3.0, 4.0) ==
          doctest::Approx(std::pow(5.0, 2.5)).epsilon(1e-14));
}

TEST_CASE("nonfinite fields are rejected") {
    auto g = interval_grid(0.25);
    Field u = ones(g);
    u.values[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(dirichlet_energy_p(u, 2.0), InvalidField);
    CHECK_THROWS_AS(lp_norm_p(u, 2.0), InvalidField);
    CHECK_THROWS_AS(energy_gradient(u, 2.0), InvalidField);
    CHECK_THROWS_AS(dirichlet_energy_p(ones(g), 1.0), InvalidInput);
}
