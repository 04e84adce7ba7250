#include "plap/config.hpp"

#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace plap {

namespace {

struct Entry {
    std::string value;
    int line = 0;
    mutable bool used = false;
};

using Section = std::map<std::string, Entry>;
using Tree = std::map<std::string, Section>;

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

Tree parse_tree(const std::string& text) {
    Tree tree;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t cut = line.find_first_of("#;");
        if (cut != std::string::npos) line = line.substr(0, cut);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("unterminated section header", lineno);
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError("empty section name", lineno);
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value", lineno);
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", lineno);
        if (tree[section].count(key)) throw ConfigError("duplicate key '" + key + "'", lineno);
        tree[section][key] = Entry{val, lineno};
    }
    return tree;
}

const Entry* find(const Tree& tree, const std::string& section, const std::string& key) {
    auto s = tree.find(section);
    if (s == tree.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    k->second.used = true;
    return &k->second;
}

double to_real(const Entry& e, const std::string& key) {
    char* end = nullptr;
    double v = std::strtod(e.value.c_str(), &end);
    if (end == e.value.c_str() || *end != '\0')
        throw ConfigError("field '" + key + "' is not a number", e.line);
    return v;
}

long to_int(const Entry& e, const std::string& key) {
    char* end = nullptr;
    long v = std::strtol(e.value.c_str(), &end, 10);
    if (end == e.value.c_str() || *end != '\0')
        throw ConfigError("field '" + key + "' is not an integer", e.line);
    return v;
}

std::vector<double> to_list(const Entry& e, const std::string& key) {
    std::vector<double> out;
    std::istringstream in(e.value);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) throw ConfigError("field '" + key + "' has an empty list item", e.line);
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0')
            throw ConfigError("field '" + key + "' has a non-numeric item", e.line);
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("field '" + key + "' is an empty list", e.line);
    return out;
}

double need_real(const Tree& t, const std::string& sec, const std::string& key) {
    const Entry* e = find(t, sec, key);
    if (!e) throw ConfigError("missing field '" + key + "' in section [" + sec + "]");
    return to_real(*e, key);
}

DomainSpec parse_domain(const Tree& tree, const std::string& sec);

DomainSpec parse_domain_typed(const Tree& tree, const std::string& sec, const Entry& type) {
    const std::string& t = type.value;
    try {
        if (t == "interval")
            return DomainSpec::interval(need_real(tree, sec, "a"), need_real(tree, sec, "b"));
        if (t == "box") {
            const Entry* lo = find(tree, sec, "lo");
            const Entry* hi = find(tree, sec, "hi");
            if (!lo || !hi) throw ConfigError("box needs 'lo' and 'hi'", type.line);
            return DomainSpec::box(to_list(*lo, "lo"), to_list(*hi, "hi"));
        }
        if (t == "ball") {
            const Entry* c = find(tree, sec, "center");
            if (!c) throw ConfigError("ball needs 'center'", type.line);
            return DomainSpec::ball(to_list(*c, "center"), need_real(tree, sec, "radius"));
        }
        if (t == "slab_with_ball")
            return DomainSpec::slab_with_ball(need_real(tree, sec, "halfwidth"),
                                              need_real(tree, sec, "radius"));
        if (t == "waveguide") {
            const Entry* curve = find(tree, sec, "curve");
            if (!curve) throw ConfigError("waveguide needs 'curve'", type.line);
            CurveSpec cs;
            if (curve->value == "straight") cs = CurveSpec::straight();
            else if (curve->value == "cos_bump") {
                const Entry* bi = find(tree, sec, "bump_index");
                if (!bi) throw ConfigError("cos_bump curve needs 'bump_index'", curve->line);
                cs = CurveSpec::cos_bump(static_cast<int>(to_int(*bi, "bump_index")));
            } else
                throw ConfigError("curve must be 'straight' or 'cos_bump'", curve->line);
            return DomainSpec::waveguide(cs, need_real(tree, sec, "halfwidth"));
        }
        if (t == "whip") {
            const Entry* n = find(tree, sec, "segments");
            if (!n) throw ConfigError("whip needs 'segments'", type.line);
            std::vector<double> lengths;
            if (const Entry* L = find(tree, sec, "lengths")) lengths = to_list(*L, "lengths");
            return DomainSpec::whip(static_cast<int>(to_int(*n, "segments")), lengths);
        }
        if (t == "union" || t == "intersection") {
            DomainSpec a = parse_domain(tree, sec + ".a");
            DomainSpec b = parse_domain(tree, sec + ".b");
            return t == "union" ? DomainSpec::unite(std::move(a), std::move(b))
                                : DomainSpec::intersect(std::move(a), std::move(b));
        }
        if (t == "difference_ball")
            return DomainSpec::difference_ball(parse_domain(tree, sec + ".inner"),
                                               need_real(tree, sec, "radius"));
        if (t == "translate") {
            const Entry* sh = find(tree, sec, "shift");
            if (!sh) throw ConfigError("translate needs 'shift'", type.line);
            return DomainSpec::translate(parse_domain(tree, sec + ".inner"),
                                         to_list(*sh, "shift"));
        }
    } catch (const InvalidInput& e) {
        throw ConfigError(e.what(), type.line);
    }
    throw ConfigError("unknown domain type '" + t + "'", type.line);
}

DomainSpec parse_domain(const Tree& tree, const std::string& sec) {
    const Entry* type = find(tree, sec, "type");
    if (!type) throw ConfigError("missing field 'type' in section [" + sec + "]");
    return parse_domain_typed(tree, sec, *type);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    // Shortest exact form keeps the canonical file readable.
    for (int prec = 1; prec < 17; ++prec) {
        char probe[40];
        std::snprintf(probe, sizeof probe, "%.*g", prec, v);
        if (std::strtod(probe, nullptr) == v) return probe;
    }
    return buf;
}

std::string fmt_list(const std::vector<double>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += fmt(v[i]);
    }
    return out;
}

void serialize_domain(const DomainSpec& spec, const std::string& sec, std::string& out) {
    out += "[" + sec + "]\n";
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, detail::IntervalDom>) {
                out += "type = interval\na = " + fmt(d.a) + "\nb = " + fmt(d.b) + "\n";
            } else if constexpr (std::is_same_v<T, detail::BoxDom>) {
                out += "type = box\nlo = " + fmt_list(d.lo) + "\nhi = " + fmt_list(d.hi) + "\n";
            } else if constexpr (std::is_same_v<T, detail::BallDom>) {
                out += "type = ball\ncenter = " + fmt_list(d.center) +
                       "\nradius = " + fmt(d.radius) + "\n";
            } else if constexpr (std::is_same_v<T, detail::SlabWithBallDom>) {
                out += "type = slab_with_ball\nhalfwidth = " + fmt(d.slab_halfwidth) +
                       "\nradius = " + fmt(d.ball_radius) + "\n";
            } else if constexpr (std::is_same_v<T, detail::WaveguideDom>) {
                out += "type = waveguide\ncurve = ";
                if (d.curve.kind == CurveSpec::Kind::straight_line) out += "straight\n";
                else out += "cos_bump\nbump_index = " + std::to_string(d.curve.bump_index) + "\n";
                out += "halfwidth = " + fmt(d.halfwidth) + "\n";
            } else if constexpr (std::is_same_v<T, detail::WhipDom>) {
                out += "type = whip\nsegments = " + std::to_string(d.segments) +
                       "\nlengths = " + fmt_list(d.lengths) + "\n";
            } else if constexpr (std::is_same_v<T, detail::UnionDom>) {
                out += "type = union\n";
                serialize_domain(*d.a, sec + ".a", out);
                serialize_domain(*d.b, sec + ".b", out);
            } else if constexpr (std::is_same_v<T, detail::IntersectionDom>) {
                out += "type = intersection\n";
                serialize_domain(*d.a, sec + ".a", out);
                serialize_domain(*d.b, sec + ".b", out);
            } else if constexpr (std::is_same_v<T, detail::DifferenceBallDom>) {
                out += "type = difference_ball\nradius = " + fmt(d.R) + "\n";
                serialize_domain(*d.inner, sec + ".inner", out);
            } else if constexpr (std::is_same_v<T, detail::TranslateDom>) {
                out += "type = translate\nshift = " + fmt_list(d.shift) + "\n";
                serialize_domain(*d.inner, sec + ".inner", out);
            }
        },
        spec.node());
}

const std::vector<std::string> kExperiments = {"eig",   "lsbound", "epinf", "decay",
                                               "perturb", "gap",     "check"};

} // namespace

RunConfig parse_config_text(const std::string& text) {
    Tree tree = parse_tree(text);
    RunConfig cfg;

    if (const Entry* e = find(tree, "", "experiment")) {
        cfg.experiment = e->value;
        bool known = false;
        for (const auto& x : kExperiments) known = known || x == cfg.experiment;
        if (!known) throw ConfigError("unknown experiment '" + cfg.experiment + "'", e->line);
    }
    if (const Entry* e = find(tree, "", "p")) {
        cfg.p = to_real(*e, "p");
        if (!(cfg.p > 1)) throw ConfigError("field 'p' violates constraint p > 1", e->line);
    }
    if (const Entry* e = find(tree, "", "h")) {
        cfg.h = to_real(*e, "h");
        if (!(cfg.h > 0)) throw ConfigError("field 'h' must be positive", e->line);
    }
    if (const Entry* e = find(tree, "", "seed"))
        cfg.solver.seed = static_cast<std::uint64_t>(to_int(*e, "seed"));

    if (tree.count("domain")) cfg.domain = parse_domain(tree, "domain");
    if (cfg.domain) {
        std::string d;
        serialize_domain(*cfg.domain, "domain", d);
        cfg.domain_desc = d;
    } else if (cfg.experiment != "check") {
        throw ConfigError("missing [domain] section");
    }

    if (tree.count("window")) {
        cfg.window_given = true;
        int dim = cfg.domain ? cfg.domain->dimension() : 1;
        if (const Entry* e = find(tree, "window", "extent")) {
            double ext = to_real(*e, "extent");
            if (!(ext > 0)) throw ConfigError("window extent must be positive", e->line);
            cfg.window = Window::centered(dim, ext);
        } else {
            const Entry* lo = find(tree, "window", "lo");
            const Entry* hi = find(tree, "window", "hi");
            if (!lo || !hi) throw ConfigError("window needs 'extent' or 'lo'/'hi'");
            auto l = to_list(*lo, "lo"), u = to_list(*hi, "hi");
            if (static_cast<int>(l.size()) != dim || static_cast<int>(u.size()) != dim)
                throw ConfigError("window lo/hi dimension mismatch", lo->line);
            try {
                cfg.window = dim == 1 ? Window::make1d(l[0], u[0])
                                      : Window::make2d(l[0], u[0], l[1], u[1]);
            } catch (const InvalidInput& ex) {
                throw ConfigError(ex.what(), lo->line);
            }
        }
    }

    if (const Entry* e = find(tree, "solver", "tol_residual")) {
        cfg.solver.tol_residual = to_real(*e, "tol_residual");
        if (!(cfg.solver.tol_residual > 0)) throw ConfigError("tol_residual must be positive", e->line);
    }
    if (const Entry* e = find(tree, "solver", "tol_lambda")) {
        cfg.solver.tol_lambda = to_real(*e, "tol_lambda");
        if (!(cfg.solver.tol_lambda > 0)) throw ConfigError("tol_lambda must be positive", e->line);
    }
    if (const Entry* e = find(tree, "solver", "max_iters")) {
        cfg.solver.max_iters = static_cast<int>(to_int(*e, "max_iters"));
        if (cfg.solver.max_iters < 1) throw ConfigError("max_iters must be >= 1", e->line);
    }
    if (const Entry* e = find(tree, "solver", "restarts")) {
        cfg.solver.restarts = static_cast<int>(to_int(*e, "restarts"));
        if (cfg.solver.restarts < 0) throw ConfigError("restarts must be >= 0", e->line);
    }

    if (const Entry* e = find(tree, "epinf", "R_list")) {
        cfg.R_list = to_list(*e, "R_list");
        for (size_t i = 0; i < cfg.R_list.size(); ++i) {
            if (!(cfg.R_list[i] > 0)) throw ConfigError("R_list entries must be positive", e->line);
            if (i > 0 && !(cfg.R_list[i] > cfg.R_list[i - 1]))
                throw ConfigError("R_list must be strictly increasing", e->line);
        }
    }
    if (const Entry* e = find(tree, "epinf", "window_list")) {
        cfg.window_list = to_list(*e, "window_list");
        for (double w : cfg.window_list)
            if (!(w > 0)) throw ConfigError("window_list entries must be positive", e->line);
    }

    if (const Entry* e = find(tree, "perturb", "q")) {
        cfg.potential_q = to_real(*e, "q");
        if (!(cfg.potential_q > 0)) throw ConfigError("potential exponent q must be positive", e->line);
    }
    if (const Entry* e = find(tree, "perturb", "eps_list")) {
        cfg.eps_list = to_list(*e, "eps_list");
        for (size_t i = 0; i < cfg.eps_list.size(); ++i) {
            if (!(cfg.eps_list[i] > 0))
                throw ConfigError("eps_list entries must be positive", e->line);
            if (i > 0 && !(cfg.eps_list[i] < cfg.eps_list[i - 1]))
                throw ConfigError("eps_list must be strictly decreasing", e->line);
        }
    }

    if (const Entry* e = find(tree, "gap", "k")) {
        cfg.k = static_cast<int>(to_int(*e, "k"));
        if (cfg.k < 1) throw ConfigError("k must be >= 1", e->line);
    }
    if (const Entry* e = find(tree, "gap", "safety")) {
        cfg.safety = to_real(*e, "safety");
        if (!(cfg.safety > 0) || !(cfg.safety < 1))
            throw ConfigError("safety must lie in (0, 1)", e->line);
    }
    if (const Entry* e = find(tree, "gap", "whip_margin")) {
        cfg.whip_margin = to_real(*e, "whip_margin");
        if (!(cfg.whip_margin > 0) || !(cfg.whip_margin < 1))
            throw ConfigError("whip_margin must lie in (0, 1)", e->line);
    }

    if (const Entry* e = find(tree, "decay", "R_list")) {
        cfg.decay_R_list = to_list(*e, "R_list");
        for (size_t i = 0; i < cfg.decay_R_list.size(); ++i) {
            if (!(cfg.decay_R_list[i] > 0))
                throw ConfigError("decay R_list entries must be positive", e->line);
            if (i > 0 && !(cfg.decay_R_list[i] > cfg.decay_R_list[i - 1]))
                throw ConfigError("decay R_list must be strictly increasing", e->line);
        }
    }
    if (const Entry* e = find(tree, "decay", "delta_fractions")) {
        cfg.delta_fractions = to_list(*e, "delta_fractions");
        for (double d : cfg.delta_fractions)
            if (!(d > 0) || !(d < 1))
                throw ConfigError("delta_fractions must lie in (0, 1)", e->line);
    }
    if (const Entry* e = find(tree, "decay", "floor")) {
        cfg.decay_floor = to_real(*e, "floor");
        if (!(cfg.decay_floor > 0)) throw ConfigError("floor must be positive", e->line);
    }
    if (const Entry* e = find(tree, "decay", "r0")) {
        cfg.r0 = to_real(*e, "r0");
        cfg.r0_given = true;
        if (cfg.r0 < 0) throw ConfigError("r0 must be nonnegative", e->line);
    }

    for (const auto& [sec, entries] : tree)
        for (const auto& [key, entry] : entries)
            if (!entry.used)
                throw ConfigError("unknown field '" + key + "' in section [" + sec + "]",
                                  entry.line);
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
    std::string out;
    out += "experiment = " + cfg.experiment + "\n";
    out += "p = " + fmt(cfg.p) + "\n";
    out += "h = " + fmt(cfg.h) + "\n";
    out += "seed = " + std::to_string(cfg.solver.seed) + "\n";
    if (cfg.domain) serialize_domain(*cfg.domain, "domain", out);
    if (cfg.window_given) {
        out += "[window]\nlo = ";
        out += cfg.window.dim == 1 ? fmt(cfg.window.lo[0])
                                   : fmt(cfg.window.lo[0]) + ", " + fmt(cfg.window.lo[1]);
        out += "\nhi = ";
        out += cfg.window.dim == 1 ? fmt(cfg.window.hi[0])
                                   : fmt(cfg.window.hi[0]) + ", " + fmt(cfg.window.hi[1]);
        out += "\n";
    }
    out += "[solver]\n";
    out += "tol_residual = " + fmt(cfg.solver.tol_residual) + "\n";
    out += "tol_lambda = " + fmt(cfg.solver.tol_lambda) + "\n";
    out += "max_iters = " + std::to_string(cfg.solver.max_iters) + "\n";
    out += "restarts = " + std::to_string(cfg.solver.restarts) + "\n";
    if (!cfg.R_list.empty() || !cfg.window_list.empty()) {
        out += "[epinf]\n";
        if (!cfg.R_list.empty()) out += "R_list = " + fmt_list(cfg.R_list) + "\n";
        if (!cfg.window_list.empty()) out += "window_list = " + fmt_list(cfg.window_list) + "\n";
    }
    out += "[perturb]\nq = " + fmt(cfg.potential_q) + "\n";
    if (!cfg.eps_list.empty()) out += "eps_list = " + fmt_list(cfg.eps_list) + "\n";
    out += "[gap]\nk = " + std::to_string(cfg.k) + "\nsafety = " + fmt(cfg.safety) +
           "\nwhip_margin = " + fmt(cfg.whip_margin) + "\n";
    out += "[decay]\nR_list = " + fmt_list(cfg.decay_R_list) +
           "\ndelta_fractions = " + fmt_list(cfg.delta_fractions) +
           "\nfloor = " + fmt(cfg.decay_floor) + "\n";
    if (cfg.r0_given) out += "r0 = " + fmt(cfg.r0) + "\n";
    return out;
}

std::string config_digest(const RunConfig& cfg) {
    std::string s = serialize_config(cfg);
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char c : s) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, hash);
    return buf;
}

} // namespace plap
