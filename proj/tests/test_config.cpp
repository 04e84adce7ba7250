#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "plap/config.hpp"

using namespace plap;

namespace {

std::string with_domain(const std::string& body) {
    return body + "\n[domain]\ntype = interval\na = 0\nb = 1\n";
}

} // namespace

TEST_CASE("defaults and basic parse") {
    auto cfg = parse_config_text(with_domain("experiment = eig\np = 2.5\nh = 0.125"));
    CHECK(cfg.experiment == "eig");
    CHECK(cfg.p == 2.5);
    CHECK(cfg.h == 0.125);
    CHECK(cfg.domain.has_value());
    CHECK(cfg.domain->dimension() == 1);
    CHECK_FALSE(cfg.window_given);
    CHECK(cfg.solver.tol_residual == 1e-8);
}

TEST_CASE("constraint violations carry line numbers") {
    try {
        parse_config_text(with_domain("experiment = eig\np = 0.5"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line == 2);
        CHECK(std::string(e.what()).find("p > 1") != std::string::npos);
    }
    try {
        parse_config_text(with_domain("h = -0.1"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line == 1);
    }
}

TEST_CASE("unknown and duplicate keys are rejected") {
    CHECK_THROWS_AS(parse_config_text(with_domain("bogus = 1")), ConfigError);
    CHECK_THROWS_AS(parse_config_text(with_domain("p = 2\np = 3")), ConfigError);
    CHECK_THROWS_AS(parse_config_text("experiment = frobnicate\n[domain]\ntype = interval\na=0\nb=1"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text("experiment = eig"), ConfigError);  // no [domain]
    // check runs without a domain
    CHECK_NOTHROW(parse_config_text("experiment = check"));
}

TEST_CASE("comments and whitespace") {
    auto cfg = parse_config_text(
        "# leading comment\nexperiment = eig  \n; another\n\n[domain]\ntype = interval\n"
        "a = 0 # not a comment marker mid-value\nb = 1\n");
    (void)cfg;
    CHECK(cfg.experiment == "eig");
}

TEST_CASE("list fields validate order") {
    CHECK_THROWS_AS(parse_config_text(with_domain("[epinf]\nR_list = 2, 1")), ConfigError);
    CHECK_THROWS_AS(parse_config_text(with_domain("[epinf]\nR_list = -1, 2")), ConfigError);
    CHECK_THROWS_AS(parse_config_text(with_domain("[perturb]\neps_list = 0.1, 0.5")), ConfigError);
    auto cfg = parse_config_text(with_domain("[epinf]\nR_list = 1, 2, 4\nwindow_list = 12"));
    CHECK(cfg.R_list == std::vector<double>{1, 2, 4});
}

TEST_CASE("window block") {
    auto a = parse_config_text(with_domain("[window]\nextent = 8"));
    CHECK(a.window_given);
    CHECK(a.window.lo[0] == -4.0);
    CHECK(a.window.hi[0] == 4.0);
    auto b = parse_config_text(with_domain("[window]\nlo = -1\nhi = 3"));
    CHECK(b.window.lo[0] == -1.0);
    CHECK_THROWS_AS(parse_config_text(with_domain("[window]\nextent = -2")), ConfigError);
    CHECK_THROWS_AS(parse_config_text(with_domain("[window]\nlo = 3\nhi = -1")), ConfigError);
}

TEST_CASE("nested domain sections") {
    auto cfg = parse_config_text(
        "experiment = eig\n"
        "[domain]\ntype = union\n"
        "[domain.a]\ntype = ball\ncenter = 0, 0\nradius = 1\n"
        "[domain.b]\ntype = translate\nshift = 3, 0\n"
        "[domain.b.inner]\ntype = box\nlo = 0, 0\nhi = 1, 1\n");
    REQUIRE(cfg.domain.has_value());
    CHECK(cfg.domain->dimension() == 2);
    CHECK(cfg.domain->contains(0.5, 0.0));
    CHECK(cfg.domain->contains(3.5, 0.5));
    CHECK_FALSE(cfg.domain->contains(2.0, 0.5));
}

TEST_CASE("whip and difference domains round trip") {
    const char* text =
        "experiment = gap\np = 3\nh = 0.03125\n"
        "[domain]\ntype = whip\nsegments = 3\nlengths = 4, 5, 6\n"
        "[gap]\nk = 2\nsafety = 0.04\n";
    auto cfg = parse_config_text(text);
    std::string canon = serialize_config(cfg);
    auto cfg2 = parse_config_text(canon);
    CHECK(serialize_config(cfg2) == canon);  // canonical form is a fixed point
    CHECK(config_digest(cfg) == config_digest(cfg2));

    auto cfg3 = parse_config_text(
        "experiment = eig\n[domain]\ntype = difference_ball\nradius = 1.5\n"
        "[domain.inner]\ntype = slab_with_ball\nhalfwidth = 0.5\nradius = 2\n");
    std::string canon3 = serialize_config(cfg3);
    CHECK(serialize_config(parse_config_text(canon3)) == canon3);
    CHECK(cfg3.domain->contains(0.0, 1.8));
    CHECK_FALSE(cfg3.domain->contains(0.0, 1.2));  // carved out by the ball
}

TEST_CASE("digest is deterministic and input-sensitive") {
    auto a = parse_config_text(with_domain("experiment = eig\np = 2"));
    auto b = parse_config_text(with_domain("experiment = eig\np = 2"));
    auto c = parse_config_text(with_domain("experiment = eig\np = 2.0000001"));
    CHECK(config_digest(a) == config_digest(b));
    CHECK(config_digest(a) != config_digest(c));
    CHECK(config_digest(a).size() == 16);
}

TEST_CASE("waveguide config") {
    auto cfg = parse_config_text(
        "experiment = eig\n[domain]\ntype = waveguide\ncurve = cos_bump\nbump_index = 1\n"
        "halfwidth = 0.5\n[window]\nextent = 12\n");
    CHECK(cfg.domain->dimension() == 2);
    CHECK(cfg.domain->contains(0.0, 0.9));
    CHECK_THROWS_AS(parse_config_text(
                        "experiment = eig\n[domain]\ntype = waveguide\ncurve = wiggle\n"
                        "halfwidth = 0.5\n"),
                    ConfigError);
    // geometric overlap is surfaced as a config error with the type's line
    try {
        parse_config_text(
            "experiment = eig\n[domain]\ntype = waveguide\ncurve = cos_bump\nbump_index = 0\n"
            "halfwidth = 1.0\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line == 3);
    }
}

TEST_CASE("solver and decay blocks") {
    auto cfg = parse_config_text(with_domain(
        "experiment = decay\n[solver]\ntol_residual = 1e-6\nmax_iters = 100\n"
        "[decay]\nR_list = 1, 3\ndelta_fractions = 0.2\nfloor = 1e-10\nr0 = 2"));
    CHECK(cfg.solver.tol_residual == 1e-6);
    CHECK(cfg.solver.max_iters == 100);
    CHECK(cfg.decay_R_list == std::vector<double>{1, 3});
    CHECK(cfg.delta_fractions == std::vector<double>{0.2});
    CHECK(cfg.decay_floor == 1e-10);
    CHECK(cfg.r0 == 2.0);
    CHECK(cfg.r0_given);
    CHECK_THROWS_AS(parse_config_text(with_domain("[solver]\nmax_iters = 0")), ConfigError);
}

TEST_CASE("malformed syntax") {
    CHECK_THROWS_AS(parse_config_text(with_domain("p 2")), ConfigError);
    CHECK_THROWS_AS(parse_config_text(with_domain("[unclosed\np = 2")), ConfigError);
    CHECK_THROWS_AS(parse_config_text(with_domain("p = abc")), ConfigError);
}
