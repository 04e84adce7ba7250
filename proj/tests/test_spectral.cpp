#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "plap/spectral.hpp"

using namespace plap;

namespace {
const double pi = 3.14159265358979323846;
}

TEST_CASE("h function values") {
    CHECK(h_function(0.0, 2.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(h_function(1.0, 2.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(h_function(1.0 / 3, 2.0) == doctest::Approx(1.0 / 3).epsilon(1e-14));
    // p = 3: domain shrinks to [0, 1/2]
    CHECK(h_function(0.5, 3.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK_THROWS_AS(h_function(0.6, 3.0), InvalidInput);
    CHECK_THROWS_AS(h_function(-0.1, 2.0), InvalidInput);
}

TEST_CASE("h inverse closed form") {
    // (1-t)^2/(1+t) = 3/4 has the root (11 - sqrt(105))/8
    double t = solve_h_inverse(0.75, 2.0);
    CHECK(t == doctest::Approx((11 - std::sqrt(105.0)) / 8).epsilon(1e-12));
}

TEST_CASE("h inverse round trips") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> ud(1e-6, 1 - 1e-6);
    for (double p : {1.5, 2.0, 3.0}) {
        for (int i = 0; i < 100; ++i) {
            double target = ud(rng);
            double t = solve_h_inverse(target, p);
            CHECK(std::abs(h_function(t, p) - target) < 1e-10);
        }
    }
    CHECK_THROWS_AS(solve_h_inverse(0.0, 2.0), InvalidInput);
    CHECK_THROWS_AS(solve_h_inverse(1.0, 2.0), InvalidInput);
}

TEST_CASE("decay model regression values") {
    double pi2 = pi * pi;
    auto m = theoretical_decay(pi2 / 2, pi2, 2.0, 1.0);
    CHECK(m.eps_lambda == doctest::Approx(0.0941311542550523).epsilon(1e-10));
    CHECK(m.C4 == doctest::Approx(16.9996278510275).epsilon(1e-9));
    CHECK(m.alpha_theory == doctest::Approx(0.0285798150194729).epsilon(1e-9));
    CHECK(m.C1 == doctest::Approx(1.05882481715266).epsilon(1e-9));
    CHECK_THROWS_AS(theoretical_decay(pi2, pi2, 2.0, 1.0), GapViolation);
    CHECK_THROWS_AS(theoretical_decay(pi2 * 1.1, pi2, 2.0, 1.0), GapViolation);
}

TEST_CASE("decay rate degenerates as the gap closes") {
    double pi2 = pi * pi;
    CHECK(theoretical_decay(pi2 * (1 - 1e-6), pi2, 2.0, 1.0).alpha_theory < 1e-4);
    double prev = std::numeric_limits<double>::infinity();
    for (double f : {0.2, 0.4, 0.6, 0.8, 0.95}) {
        double a = theoretical_decay(pi2 * f, pi2, 2.0, 1.0).alpha_theory;
        CHECK(a < prev);  // alpha is decreasing in lambda
        CHECK(a > 0.0);
        prev = a;
    }
}

TEST_CASE("threshold estimate on the straight strip") {
    auto strip = DomainSpec::waveguide(CurveSpec::straight(), 0.5);
    auto est = estimate_Ep(strip, 2.0, {1.0, 2.0}, {12.0}, 1.0 / 16);
    REQUIRE(est.table.size() == 2);
    CHECK(est.monotone_ok);
    // removing a ball cannot lower the level below the strip threshold pi^2
    CHECK(est.extrapolated >= pi * pi * 0.97);
    CHECK(est.extrapolated == doctest::Approx(pi * pi).epsilon(0.08));
    CHECK(est.r0_estimate > 0.0);
}

TEST_CASE("threshold estimate is infinite for bounded sets") {
    // truncations of a bounded set are eventually empty
    auto ball = DomainSpec::ball({0, 0}, 1.0);
    auto est = estimate_Ep(ball, 2.0, {2.0}, {6.0}, 1.0 / 8);
    CHECK(std::isinf(est.extrapolated));
}

TEST_CASE("estimate_Ep validates lists") {
    auto strip = DomainSpec::waveguide(CurveSpec::straight(), 0.5);
    CHECK_THROWS_AS(estimate_Ep(strip, 2.0, {}, {12.0}, 0.25), InvalidInput);
    CHECK_THROWS_AS(estimate_Ep(strip, 2.0, {2.0, 1.0}, {12.0}, 0.25), InvalidInput);
    CHECK_THROWS_AS(estimate_Ep(strip, 2.0, {7.0}, {12.0}, 0.25), InvalidInput);  // w/2 <= R
}

TEST_CASE("synthetic exponential decay is recovered") {
    auto g = build_grid(DomainSpec::interval(-8, 8), 1.0 / 16, Window::make1d(-8.5, 8.5));
    for (double rate : {0.5, 1.0, 2.0}) {
        Field u = Field::zero(g);
        for (int k = 0; k < u.values.size(); ++k)
            u.values[k] = std::exp(-rate * g->node_radius(k));
        auto fit = fit_decay(u);
        CHECK(fit.alpha_fit == doctest::Approx(rate).epsilon(0.01));
        CHECK(fit.bins >= 4);
        CHECK(fit.C_fit == doctest::Approx(1.0).epsilon(0.05));
    }
}

TEST_CASE("decay fit needs enough bins") {
    auto g = build_grid(DomainSpec::interval(0, 1), 0.25, Window::make1d(-0.1, 1.1));
    Field u = Field::zero(g);
    u.values.setOnes();
    CHECK_THROWS_AS(fit_decay(u), InsufficientDecayData);
    CHECK_THROWS_AS(fit_decay(u, -1.0), InvalidInput);
}

TEST_CASE("caccioppoli inequality on computed eigenpairs") {
    auto g = build_grid(DomainSpec::slab_with_ball(0.5, 1.2), 1.0 / 16, Window::centered(2, 16.0));
    auto r = solve_ground_state(g, 2.0);
    REQUIRE(r.converged);
    for (double R : {2.0, 4.0})
        for (double delta : {0.1, 0.3})
            CHECK(check_caccioppoli(r.u, r.lambda, R, delta, 2.0));
    // trivially true on the zero field
    CHECK(check_caccioppoli(Field::zero(g), 1.0, 2.0, 0.1, 2.0));
    CHECK_THROWS_AS(check_caccioppoli(r.u, r.lambda, -1.0, 0.1, 2.0), InvalidInput);
    CHECK_THROWS_AS(check_caccioppoli(r.u, r.lambda, 2.0, 1.5, 2.0), InvalidInput);
}

TEST_CASE("gradient tails shrink with the radius") {
    auto g = build_grid(DomainSpec::slab_with_ball(0.5, 1.2), 1.0 / 16, Window::centered(2, 16.0));
    auto r = solve_ground_state(g, 2.0);
    REQUIRE(r.converged);
    auto model = theoretical_decay(r.lambda, pi * pi, 2.0, 1.0);
    auto tails = gradient_decay_profile(r.u, r.lambda, 2.0, {1.0, 2.0, 3.0}, model);
    REQUIRE(tails.size() == 3);
    for (size_t i = 0; i < tails.size(); ++i) {
        CHECK(tails[i].grad_lp_tail >= 0.0);
        CHECK(tails[i].envelope > 0.0);
        if (i > 0) CHECK(tails[i].grad_lp_tail <= tails[i - 1].grad_lp_tail);
    }
}

TEST_CASE("pi_p extrapolation") {
    CHECK(pi_p(2.0, 1.0 / 256) == doctest::Approx(pi).epsilon(1e-3));
    double pi3 = 2 * pi * std::cbrt(2.0) / (3 * std::sin(pi / 3));
    CHECK(pi_p(3.0, 1.0 / 128) == doctest::Approx(pi3).epsilon(1e-3));
}

TEST_CASE("disjoint slab slices") {
    auto box = DomainSpec::box({0, 0}, {4, 1});
    SolverOptions o;
    auto pieces = disjoint_pieces(box, 3, 2.0, 1.0 / 16, Window::make2d(-0.5, 4.5, -0.5, 1.5),
                                  0.1, o);
    REQUIRE(pieces.size() == 3);
    CHECK_NOTHROW(ls_upper_bound(pieces, 2.0, o));  // genuinely disjoint
    CHECK_THROWS_AS(disjoint_pieces(box, 0, 2.0, 1.0 / 16,
                                    Window::make2d(-0.5, 4.5, -0.5, 1.5), 0.1, o),
                    InvalidInput);
}

TEST_CASE("gap verdict names") {
    CHECK(to_string(GapVerdict::applies) == "APPLIES");
    CHECK(to_string(GapVerdict::not_applies) == "NOT_APPLIES");
    CHECK(to_string(GapVerdict::inconclusive) == "INCONCLUSIVE");
}

TEST_CASE("gap certificate is immediate for bounded sets") {
    GapOptions o;
    o.window_extent = 6.0;
    o.R_list = {2.0};  // beyond the ball, so the exterior truncation is empty
    auto rep = gap_certificate(DomainSpec::ball({0, 0}, 1.0), 1, 2.0, 1.0 / 16, o);
    CHECK(rep.verdict == GapVerdict::applies);
    CHECK(std::isinf(rep.ep_estimate));
    CHECK(rep.upper_bound > 0.0);
}

TEST_CASE("whip layout fails honestly on coarse grids") {
    // conservative masking at this resolution keeps every piece level above
    // the cross-section target, so calibration must refuse rather than return
    CHECK_THROWS_AS(whip_layout(1, 2.0, 1.0 / 8, 0.4, 6.0), SegmentCalibrationFailed);
}
