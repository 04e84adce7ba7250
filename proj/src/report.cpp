#include "plap/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>

#include "plap/spectral.hpp"

namespace plap {

namespace fs = std::filesystem;

std::string toolkit_version() { return "plap 1.0.0"; }

json to_json(const ResultRecord& rec) {
    json j;
    j["digest"] = rec.digest;
    j["experiment"] = rec.experiment;
    j["version"] = rec.version;
    j["timestamp"] = rec.timestamp;
    j["payload"] = rec.payload;
    return j;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, target);
}

void write_json_atomic(const std::string& path, const json& j) {
    write_text_atomic(path, j.dump(2) + "\n");
}

void write_csv_atomic(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) out += ",";
        out += header[i];
    }
    out += "\n";
    char buf[40];
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out += ",";
            std::snprintf(buf, sizeof buf, "%.12g", row[i]);
            out += buf;
        }
        out += "\n";
    }
    write_text_atomic(path, out);
}

namespace {

std::string now_iso8601() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Bounding window for bounded primitives; nullopt when the set is unbounded
// and an explicit [window] is required.
std::optional<Window> natural_window(const DomainSpec& spec, double pad) {
    using Box4 = std::array<double, 4>;  // xlo xhi ylo yhi
    struct V {
        double pad;
        std::optional<Box4> operator()(const detail::IntervalDom& d) const {
            return Box4{d.a - pad, d.b + pad, 0, 0};
        }
        std::optional<Box4> operator()(const detail::BoxDom& d) const {
            return Box4{d.lo[0] - pad, d.hi[0] + pad,
                        d.lo.size() == 2 ? d.lo[1] - pad : 0,
                        d.hi.size() == 2 ? d.hi[1] + pad : 0};
        }
        std::optional<Box4> operator()(const detail::BallDom& d) const {
            double cy = d.center.size() == 2 ? d.center[1] : 0;
            return Box4{d.center[0] - d.radius - pad, d.center[0] + d.radius + pad,
                        cy - d.radius - pad, cy + d.radius + pad};
        }
        std::optional<Box4> operator()(const detail::SlabWithBallDom&) const { return {}; }
        std::optional<Box4> operator()(const detail::WaveguideDom&) const { return {}; }
        std::optional<Box4> operator()(const detail::WhipDom&) const { return {}; }
        std::optional<Box4> operator()(const detail::UnionDom& d) const {
            auto a = std::visit(*this, d.a->node()), b = std::visit(*this, d.b->node());
            if (!a || !b) return {};
            return Box4{std::min((*a)[0], (*b)[0]), std::max((*a)[1], (*b)[1]),
                        std::min((*a)[2], (*b)[2]), std::max((*a)[3], (*b)[3])};
        }
        std::optional<Box4> operator()(const detail::IntersectionDom& d) const {
            auto a = std::visit(*this, d.a->node()), b = std::visit(*this, d.b->node());
            if (a && !b) return a;
            if (b && !a) return b;
            if (!a) return {};
            return Box4{std::max((*a)[0], (*b)[0]), std::min((*a)[1], (*b)[1]),
                        std::max((*a)[2], (*b)[2]), std::min((*a)[3], (*b)[3])};
        }
        std::optional<Box4> operator()(const detail::DifferenceBallDom& d) const {
            return std::visit(*this, d.inner->node());
        }
        std::optional<Box4> operator()(const detail::TranslateDom& d) const {
            auto a = std::visit(*this, d.inner->node());
            if (!a) return {};
            double sy = d.shift.size() == 2 ? d.shift[1] : 0;
            return Box4{(*a)[0] + d.shift[0], (*a)[1] + d.shift[0], (*a)[2] + sy, (*a)[3] + sy};
        }
    };
    auto box = std::visit(V{pad}, spec.node());
    if (!box) return std::nullopt;
    return spec.dimension() == 1 ? Window::make1d((*box)[0], (*box)[1])
                                 : Window::make2d((*box)[0], (*box)[1], (*box)[2], (*box)[3]);
}

Window working_window(const RunConfig& cfg) {
    if (cfg.window_given) return cfg.window;
    auto w = natural_window(*cfg.domain, cfg.h);
    if (!w) throw ConfigError("unbounded domain requires an explicit [window] section");
    return *w;
}

json eig_payload(const EigenResult& r) {
    json j;
    j["lambda"] = r.lambda;
    j["residual"] = r.residual;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    return j;
}

json run_eig(const RunConfig& cfg, const std::string&) {
    auto grid = build_grid(*cfg.domain, cfg.h, working_window(cfg));
    EigenResult r = solve_ground_state(grid, cfg.p, cfg.solver);
    json j = eig_payload(r);
    j["interior_nodes"] = grid->interior_count();
    j["ok"] = r.converged;
    return j;
}

json run_lsbound(const RunConfig& cfg, const std::string&) {
    Window window = working_window(cfg);
    auto pieces = disjoint_pieces(*cfg.domain, cfg.k, cfg.p, cfg.h, window, cfg.whip_margin,
                                  cfg.solver);
    double bound = ls_upper_bound(pieces, cfg.p, cfg.solver);
    json j;
    j["k"] = cfg.k;
    j["upper_bound"] = bound;
    json sizes = json::array();
    for (const auto& g : pieces) sizes.push_back(g->interior_count());
    j["piece_nodes"] = sizes;
    j["ok"] = true;
    return j;
}

std::vector<double> epinf_R_list(const RunConfig& cfg, const Window& w) {
    if (!cfg.R_list.empty()) return cfg.R_list;
    double ext = w.hi[0] - w.lo[0];
    return {0.05 * ext, 0.10 * ext, 0.15 * ext};
}

std::vector<double> epinf_window_list(const RunConfig& cfg, const Window& w) {
    if (!cfg.window_list.empty()) return cfg.window_list;
    return {w.hi[0] - w.lo[0]};
}

json ep_payload(const EpEstimate& ep) {
    json j;
    j["extrapolated"] = std::isinf(ep.extrapolated) ? json("inf") : json(ep.extrapolated);
    j["monotone_ok"] = ep.monotone_ok;
    j["r0_estimate"] = ep.r0_estimate;
    json table = json::array();
    for (const auto& e : ep.table)
        table.push_back({{"R", e.R}, {"window", e.window}, {"lambda_ext", e.lambda_ext}});
    j["table"] = table;
    return j;
}

json run_epinf(const RunConfig& cfg, const std::string& out_dir) {
    // With both lists explicit no working window is needed; only fall back to
    // it when a default has to be derived.
    std::vector<double> R_list = cfg.R_list, window_list = cfg.window_list;
    if (R_list.empty() || window_list.empty()) {
        Window window = working_window(cfg);
        R_list = epinf_R_list(cfg, window);
        window_list = epinf_window_list(cfg, window);
    }
    EpEstimate ep = estimate_Ep(*cfg.domain, cfg.p, R_list, window_list, cfg.h, cfg.solver);
    std::vector<std::vector<double>> rows;
    for (const auto& e : ep.table) rows.push_back({e.R, e.window, e.lambda_ext});
    write_csv_atomic(out_dir + "/epinf.csv", {"R", "window", "lambda_ext"}, rows);
    json j = ep_payload(ep);
    j["ok"] = true;
    return j;
}

json run_decay(const RunConfig& cfg, const std::string& out_dir) {
    Window window = working_window(cfg);
    auto grid = build_grid(*cfg.domain, cfg.h, window);
    EigenResult gs = solve_ground_state(grid, cfg.p, cfg.solver);

    EpEstimate ep = estimate_Ep(*cfg.domain, cfg.p, epinf_R_list(cfg, window),
                                epinf_window_list(cfg, window), cfg.h, cfg.solver);

    json j;
    j["lambda"] = gs.lambda;
    j["converged"] = gs.converged;
    j["ep"] = ep_payload(ep);

    DecayFit fit = fit_decay(gs.u, cfg.decay_floor);
    j["alpha_fit"] = fit.alpha_fit;
    j["C_fit"] = fit.C_fit;
    j["fit_bins"] = fit.bins;
    j["fit_range"] = {fit.r_min, fit.r_max};

    bool ok = gs.converged;
    if (!std::isinf(ep.extrapolated) && gs.lambda < ep.extrapolated) {
        // eps_lambda does not depend on r0: probe once, then pick r0 from the
        // table as the first radius whose exterior level is already within
        // eps_lambda of the threshold.
        DecayModel probe = theoretical_decay(gs.lambda, ep.extrapolated, cfg.p, 0.0);
        double r0 = cfg.r0;
        if (!cfg.r0_given) {
            r0 = ep.table.empty() ? 0.0 : ep.table.back().R;
            for (const auto& e : ep.table)
                if (e.lambda_ext >= (1.0 - probe.eps_lambda) * ep.extrapolated) {
                    r0 = e.R;
                    break;
                }
        }
        DecayModel model = theoretical_decay(gs.lambda, ep.extrapolated, cfg.p, r0);
        model.alpha_fit = fit.alpha_fit;
        model.C_fit = fit.C_fit;
        j["eps_lambda"] = model.eps_lambda;
        j["C4"] = model.C4;
        j["alpha_theory"] = model.alpha_theory;
        j["C1"] = model.C1;
        j["r0"] = r0;

        json cacc = json::array();
        bool all_cacc = true;
        for (double frac : cfg.delta_fractions)
            for (double R : cfg.decay_R_list) {
                double delta = frac / (cfg.p - 1);
                bool pass = check_caccioppoli(gs.u, gs.lambda, R, delta, cfg.p);
                all_cacc = all_cacc && pass;
                cacc.push_back({{"R", R}, {"delta", delta}, {"pass", pass}});
            }
        j["caccioppoli"] = cacc;

        json tails = json::array();
        for (const auto& t : gradient_decay_profile(gs.u, gs.lambda, cfg.p,
                                                    cfg.decay_R_list, model))
            tails.push_back({{"R", t.R},
                             {"grad_lp_tail", t.grad_lp_tail},
                             {"envelope", t.envelope}});
        j["gradient_tails"] = tails;

        // Profile CSV: theory-rate envelope anchored at the first fit bin.
        std::vector<std::vector<double>> rows;
        double r_anchor = fit.bin_r.front(), m_anchor = fit.bin_max.front();
        for (size_t i = 0; i < fit.bin_r.size(); ++i)
            rows.push_back({fit.bin_r[i], fit.bin_max[i],
                            m_anchor * std::exp(-model.alpha_theory *
                                                (fit.bin_r[i] - r_anchor))});
        write_csv_atomic(out_dir + "/profile.csv", {"r", "max_abs_u", "envelope"}, rows);
        ok = ok && all_cacc;
    } else {
        j["notes"] = std::isinf(ep.extrapolated)
                         ? "threshold infinite (bounded set); no finite decay model"
                         : "no spectral gap at this resolution; decay model skipped";
        std::vector<std::vector<double>> rows;
        for (size_t i = 0; i < fit.bin_r.size(); ++i)
            rows.push_back({fit.bin_r[i], fit.bin_max[i],
                            fit.C_fit * std::exp(-fit.alpha_fit * fit.bin_r[i])});
        write_csv_atomic(out_dir + "/profile.csv", {"r", "max_abs_u", "envelope"}, rows);
    }
    j["ok"] = ok;
    return j;
}

json run_perturb(const RunConfig& cfg, const std::string& out_dir) {
    if (cfg.eps_list.empty())
        throw ConfigError("perturb experiment requires eps_list in [perturb]");
    auto grid = build_grid(*cfg.domain, cfg.h, working_window(cfg));
    PotentialSpec V = PotentialSpec::power_law_with_schedule(cfg.potential_q, cfg.eps_list);
    auto sweep = sweep_perturbed(grid, cfg.p, V, cfg.eps_list, cfg.solver);

    std::vector<std::vector<double>> rows;
    json entries = json::array();
    bool ok = true;
    for (size_t i = 0; i < sweep.size(); ++i) {
        rows.push_back({cfg.eps_list[i], sweep[i].lambda, sweep[i].residual});
        json e = eig_payload(sweep[i]);
        e["eps"] = cfg.eps_list[i];
        e["sup_ratio"] = sweep[i].sup_ratio;
        entries.push_back(e);
        ok = ok && sweep[i].converged;
    }
    write_csv_atomic(out_dir + "/perturb.csv", {"eps", "lambda", "residual"}, rows);
    json j;
    j["sweep"] = entries;
    j["ok"] = ok;
    return j;
}

json run_gap(const RunConfig& cfg, const std::string&) {
    GapOptions opts;
    // An explicit or natural window overrides the built-in extent; otherwise
    // the certificate runs with its own default.
    if (cfg.window_given) {
        opts.window_extent = cfg.window.hi[0] - cfg.window.lo[0];
    } else if (auto w = natural_window(*cfg.domain, cfg.h)) {
        opts.window_extent = w->hi[0] - w->lo[0];
    }
    opts.R_list = cfg.R_list;
    opts.safety = cfg.safety;
    opts.whip_margin = cfg.whip_margin;
    opts.solver = cfg.solver;
    GapReport rep = gap_certificate(*cfg.domain, cfg.k, cfg.p, cfg.h, opts);
    json j;
    j["k"] = rep.k;
    j["upper_bound"] = rep.upper_bound;
    j["ep_estimate"] = std::isinf(rep.ep_estimate) ? json("inf") : json(rep.ep_estimate);
    j["gap"] = rep.gap;
    j["safety"] = rep.safety;
    j["verdict"] = to_string(rep.verdict);
    if (!rep.notes.empty()) j["notes"] = rep.notes;
    j["ok"] = true;
    return j;
}

// The cross-cutting invariant suite behind the check command.
json run_check(const RunConfig& cfg, const std::string&) {
    json results = json::array();
    bool all = true;
    auto record = [&](const std::string& name, bool pass) {
        results.push_back({{"invariant", name}, {"pass", pass}});
        all = all && pass;
    };

    {
        // Elementary inequality on random samples in R^2 x (0,1).
        std::mt19937_64 rng(cfg.solver.seed + 17);
        std::uniform_real_distribution<double> coord(-5.0, 5.0), unit(1e-3, 1.0 - 1e-3);
        bool pass = true;
        for (double p : {1.5, 2.0, 3.0}) {
            double c = elementary_inequality_constant(p);
            for (int i = 0; i < 100000 && pass; ++i) {
                double ax = coord(rng), ay = coord(rng), bx = coord(rng), by = coord(rng);
                double eps = unit(rng);
                double na = std::hypot(ax, ay), nb = std::hypot(bx, by);
                double ns = std::hypot(ax + bx, ay + by);
                double lhs = std::abs(std::pow(ns, p) - std::pow(na, p));
                double rhs = eps * std::pow(na, p) + c * std::pow(eps, 1 - p) * std::pow(nb, p);
                pass = lhs <= rhs * (1 + 1e-12);
            }
        }
        record("elementary_inequality_sampling", pass);
    }

    {
        // Exact scaling: the same nodal values on Ball(0,1) at h and on
        // Ball(0,2) at 2h give Rayleigh quotients in ratio 2^p.
        bool pass = true;
        for (double p : {1.5, 2.0, 3.0}) {
            double h = 1.0 / 8;
            auto g1 = build_grid(DomainSpec::ball({0, 0}, 1), h, Window::centered(2, 2.5));
            auto g2 = build_grid(DomainSpec::ball({0, 0}, 2), 2 * h, Window::centered(2, 5.0));
            if (g1->interior_count() != g2->interior_count()) {
                pass = false;
                break;
            }
            std::mt19937_64 rng(cfg.solver.seed + 5);
            std::normal_distribution<double> nd;
            Field u1 = Field::zero(g1), u2 = Field::zero(g2);
            for (int k = 0; k < g1->interior_count(); ++k) u1.values[k] = nd(rng);
            u2.values = u1.values;
            double r1 = rayleigh(u1, p), r2 = rayleigh(u2, p);
            pass = pass && std::abs(r2 - r1 * std::pow(2.0, -p)) <= 1e-12 * r1;
        }
        record("scaling_law_exact", pass);
    }

    {
        // Domain monotonicity of ground levels and p=2 spectra.
        SolverOptions so = cfg.solver;
        auto small = build_grid(DomainSpec::interval(0, 0.8), 1.0 / 64, Window::make1d(-0.1, 1.1));
        auto large = build_grid(DomainSpec::interval(0, 1.0), 1.0 / 64, Window::make1d(-0.1, 1.1));
        double ls = solve_ground_state(small, 2, so).lambda;
        double ll = solve_ground_state(large, 2, so).lambda;
        bool pass = ls >= ll - 1e-8;
        auto cf_s = courant_fischer_p2(small, 3);
        auto cf_l = courant_fischer_p2(large, 3);
        for (int i = 0; i < 3; ++i) pass = pass && cf_s[i] >= cf_l[i] - 1e-8;
        record("domain_monotonicity", pass);
    }

    {
        // Gradient of the discrete energy against central differences.
        auto grid = build_grid(DomainSpec::box({0, 0}, {1, 1}), 0.2, Window::centered(2, 2.5));
        std::mt19937_64 rng(cfg.solver.seed + 23);
        std::uniform_real_distribution<double> ud(-1.0, 1.0);
        bool pass = true;
        for (double p : {1.5, 2.0, 3.0, 4.7}) {
            Field u = Field::zero(grid);
            for (int k = 0; k < grid->interior_count(); ++k) u.values[k] = ud(rng) + 1.5;
            Field g = energy_gradient(u, p);
            for (int k = 0; k < grid->interior_count() && pass; ++k) {
                double d = 1e-6;
                Field up = u, um = u;
                up.values[k] += d;
                um.values[k] -= d;
                double fd = (dirichlet_energy_p(up, p) - dirichlet_energy_p(um, p)) / (2 * d);
                double scale = std::max(1.0, std::abs(fd));
                pass = std::abs(fd - g.values[k]) <= 1e-5 * scale;
            }
        }
        record("gradient_consistency", pass);
    }

    {
        std::mt19937_64 rng(cfg.solver.seed + 31);
        std::uniform_real_distribution<double> ud(0.01, 0.99);
        bool pass = true;
        for (double p : {1.5, 2.0, 3.0})
            for (int i = 0; i < 100 && pass; ++i) {
                double x = ud(rng);
                pass = std::abs(h_function(solve_h_inverse(x, p), p) - x) <= 1e-10;
            }
        record("h_inverse_round_trip", pass);
    }

    json j;
    j["invariants"] = results;
    j["ok"] = all;
    return j;
}

} // namespace

ResultRecord run_experiment(const RunConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    ResultRecord rec;
    rec.digest = config_digest(cfg);
    rec.experiment = cfg.experiment;
    rec.version = toolkit_version();
    rec.timestamp = now_iso8601();

    if (cfg.experiment == "eig") rec.payload = run_eig(cfg, out_dir);
    else if (cfg.experiment == "lsbound") rec.payload = run_lsbound(cfg, out_dir);
    else if (cfg.experiment == "epinf") rec.payload = run_epinf(cfg, out_dir);
    else if (cfg.experiment == "decay") rec.payload = run_decay(cfg, out_dir);
    else if (cfg.experiment == "perturb") rec.payload = run_perturb(cfg, out_dir);
    else if (cfg.experiment == "gap") rec.payload = run_gap(cfg, out_dir);
    else if (cfg.experiment == "check") rec.payload = run_check(cfg, out_dir);
    else throw ConfigError("unknown experiment '" + cfg.experiment + "'");

    write_json_atomic(out_dir + "/record.json", to_json(rec));
    return rec;
}

} // namespace plap
