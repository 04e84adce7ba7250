#pragma once

#include <optional>
#include <string>
#include <vector>

#include "plap/spectral.hpp"

namespace plap {

// One experiment run: domain, discretization, solver knobs, and the blocks
// the individual commands read. Parsed from an INI-style file with nested
// dotted sections, validated eagerly.
struct RunConfig {
    std::string experiment = "eig";  // eig lsbound epinf decay perturb gap check

    std::optional<DomainSpec> domain;
    std::string domain_desc;  // canonical text form of the [domain] block

    double p = 2.0;
    double h = 1.0 / 64.0;
    Window window = Window::centered(1, 2.0);
    bool window_given = false;
    SolverOptions solver;

    // [epinf]
    std::vector<double> R_list;
    std::vector<double> window_list;

    // [perturb]
    double potential_q = 2.0;
    std::vector<double> eps_list;

    // [gap] / [lsbound]
    int k = 1;
    double safety = 0.05;
    double whip_margin = 0.10;

    // [decay]
    std::vector<double> decay_R_list{2.0, 4.0, 6.0};
    std::vector<double> delta_fractions{0.1, 0.3};  // of 1/(p-1)
    double decay_floor = 1e-12;
    double r0 = 1.0;
    bool r0_given = false;
};

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);

// Canonical serialization: fixed key order, normalized numbers. Reparsing it
// yields the same canonical form.
std::string serialize_config(const RunConfig& cfg);

// FNV-1a hash of the canonical form, hex string.
std::string config_digest(const RunConfig& cfg);

} // namespace plap
