#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "plap/report.hpp"

namespace {

struct CommonArgs {
    std::string config;
    std::string out = "out";
    long seed = -1;
};

int run(const std::string& experiment, const CommonArgs& args) {
    plap::RunConfig cfg;
    try {
        if (!args.config.empty()) {
            cfg = plap::parse_config_file(args.config);
        } else if (experiment != "check") {
            std::fprintf(stderr, "error: --config is required for '%s'\n", experiment.c_str());
            return 2;
        }
        cfg.experiment = experiment;
        if (args.seed >= 0) cfg.solver.seed = static_cast<std::uint64_t>(args.seed);
    } catch (const plap::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }

    try {
        plap::ResultRecord rec = plap::run_experiment(cfg, args.out);
        bool ok = rec.payload.value("ok", true);
        std::printf("%s\n", plap::to_json(rec).dump(2).c_str());
        return ok ? 0 : 3;
    } catch (const plap::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dirichlet p-Laplacian spectral toolkit"};
    app.require_subcommand(1);

    const std::pair<const char*, const char*> cmds[] = {
        {"eig", "ground state of the Rayleigh quotient"},
        {"lsbound", "disjoint-support upper bound for the k-th minmax level"},
        {"epinf", "Poincare constant at infinity (exterior truncation table)"},
        {"decay", "decay constants, profile fit, Caccioppoli and gradient checks"},
        {"perturb", "confining-potential sweep"},
        {"gap", "spectral gap certificate"},
        {"check", "cross-cutting invariant suite"},
    };

    CommonArgs args;
    std::string chosen;
    for (const auto& [name, desc] : cmds) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", args.config, "configuration file");
        sub->add_option("--out", args.out, "output directory (default: out)");
        sub->add_option("--seed", args.seed, "override solver seed");
        sub->callback([&chosen, n = std::string(name)] { chosen = n; });
    }

    CLI11_PARSE(app, argc, argv);
    return run(chosen, args);
}
