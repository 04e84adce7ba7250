#include "plap/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

namespace plap {

double rayleigh(const Field& u, double p) {
    double denom = lp_norm_p(u, p);
    if (denom == 0.0) throw DivisionByZero("rayleigh: zero field");
    return dirichlet_energy_p(u, p) / denom;
}

namespace {

// Nodal gradient of the sphere constraint lp_norm_p: p * m * |u|^{p-2} u.
Eigen::VectorXd sphere_gradient(const Field& u, double p) {
    double m = u.grid->measure();
    if (p == 2.0) return 2.0 * m * u.values;
    Eigen::VectorXd out(u.values.size());
    for (int k = 0; k < u.values.size(); ++k) {
        double a = std::abs(u.values[k]);
        out[k] = a == 0.0 ? 0.0
                          : p * m * std::pow(a, p - 1) * (u.values[k] > 0 ? 1.0 : -1.0);
    }
    return out;
}

void project_to_sphere(Field& u, double p) {
    double n = lp_norm_p(u, p);
    if (n == 0.0) throw DivisionByZero("projection: zero field");
    u.values /= std::pow(n, 1.0 / p);
}

// Nodal absolute value never increases the P1 energy here (every gradient
// component is a difference of two nodal values) and preserves the norm.
void make_nonnegative(Field& u) { u.values = u.values.cwiseAbs(); }

struct Objective {
    const PotentialSpec* V = nullptr;  // null: pure Dirichlet energy
    double eps = 0.0;
    double p;

    double value(const Field& u) const {
        return V ? weighted_energy(u, *V, eps, p) : dirichlet_energy_p(u, p);
    }
    Eigen::VectorXd gradient(const Field& u) const {
        Field g = energy_gradient(u, p);
        if (V) g.values += weighted_energy_gradient_potential(u, *V, eps, p).values;
        return g.values;
    }
};

Field initial_field(const GridPtr& grid, double p, std::uint64_t seed, int variant) {
    auto dist = boundary_distance(*grid);
    Field u = Field::zero(grid);
    for (int k = 0; k < u.values.size(); ++k) u.values[k] = dist[k];
    if (variant > 0) {
        std::mt19937_64 rng(seed * 1000003ULL + variant);
        std::uniform_real_distribution<double> d(0.25, 1.75);
        for (int k = 0; k < u.values.size(); ++k) u.values[k] *= d(rng);
    }
    project_to_sphere(u, p);
    return u;
}

EigenResult descend(const GridPtr& grid, double p, const Objective& obj,
                    const SolverOptions& opts, Field u0) {
    if (!(p > 1)) throw InvalidInput("solver: need p > 1");
    if (opts.max_iters < 1 || !(opts.tol_residual > 0) || !(opts.tol_lambda > 0))
        throw InvalidInput("solver: invalid options");

    Field u = std::move(u0);
    make_nonnegative(u);
    project_to_sphere(u, p);

    EigenResult res;
    double F = obj.value(u);
    res.energy_history.push_back(F);

    Eigen::VectorXd r_prev, u_prev;
    double step = 1.0 / std::max(1.0, F);
    int stagnant = 0;
    double lambda_prev = F;
    // Once the energy decrease per step falls below the roundoff resolution
    // of F, Armijo can only accept no-op steps and the residual floors out.
    // The gradient still carries full precision, so from that point on we
    // switch permanently to unguarded Barzilai-Borwein steps, which drive
    // the residual to tolerance without consulting F.
    bool polish = false;

    for (int it = 1; it <= opts.max_iters; ++it) {
        Eigen::VectorXd g = obj.gradient(u);
        // Lagrangian residual: gradient of F - lambda * ||u||_p^p with the
        // multiplier F(u) (u already on the sphere).
        Eigen::VectorXd r = g - F * sphere_gradient(u, p);

        double hpow = std::pow(grid->h, grid->dim * 0.5);
        res.residual = r.norm() / hpow;
        res.iterations = it - 1;
        bool res_ok = res.residual < opts.tol_residual * std::max(1.0, F);
        bool lam_ok = stagnant >= 10;
        if (res_ok && lam_ok) {
            res.converged = true;
            break;
        }

        // Barzilai-Borwein trial step, fallback to the previous step size.
        if (u_prev.size() > 0) {
            Eigen::VectorXd s = u.values - u_prev;
            Eigen::VectorXd yv = r - r_prev;
            double sy = s.dot(yv);
            if (sy > 0) step = std::clamp(s.dot(s) / sy, 1e-14, 1e6);
        }
        u_prev = u.values;
        r_prev = r;

        // Armijo backtracking on the projected trial point; the nodal
        // absolute value is a free extra descent move.
        double rn2 = r.squaredNorm();
        Field cand(grid, Eigen::VectorXd());
        if (!polish) {
            double t = step;
            bool accepted = false;
            for (int bt = 0; bt < 60; ++bt, t *= 0.5) {
                cand.values = u.values - t * r;
                if (cand.values.cwiseAbs().maxCoeff() == 0.0) continue;
                make_nonnegative(cand);
                project_to_sphere(cand, p);
                double Fc = obj.value(cand);
                if (Fc <= F - 1e-4 * t * rn2) {
                    accepted = true;
                    u = std::move(cand);
                    F = Fc;
                    break;
                }
                if (t * rn2 < 1e3 * 2.2e-16 * std::abs(F)) break;
            }
            if (!accepted || 1e-4 * t * rn2 < 2.2e-16 * std::abs(F)) polish = true;
        }
        if (polish) {
            cand.grid = grid;
            cand.values = u.values - step * r;
            if (cand.values.cwiseAbs().maxCoeff() > 0.0) {
                make_nonnegative(cand);
                project_to_sphere(cand, p);
                double Fc = obj.value(cand);
                u = std::move(cand);
                // Both values equal the true energy to machine precision;
                // keep the recorded history nonincreasing.
                F = std::min(F, Fc);
            }
        }
        res.energy_history.push_back(F);

        double rel = std::abs(F - lambda_prev) / std::max(1.0, std::abs(F));
        stagnant = rel < opts.tol_lambda ? stagnant + 1 : 0;
        lambda_prev = F;
    }

    res.lambda = F;
    res.u = std::move(u);
    res.sup_ratio = res.u.values.cwiseAbs().maxCoeff() /
                    std::pow(std::max(res.lambda, 1e-300),
                             grid->dim / (p * p));
    return res;
}

EigenResult best_of_restarts(const GridPtr& grid, double p, const Objective& obj,
                             const SolverOptions& opts) {
    if (!grid || grid->interior_count() == 0) throw EmptyGrid("solver: empty grid");
    EigenResult best;
    for (int v = 0; v <= std::max(0, opts.restarts); ++v) {
        EigenResult r = descend(grid, p, obj, opts, initial_field(grid, p, opts.seed, v));
        if (v == 0 || (r.converged && !best.converged) ||
            (r.converged == best.converged && r.lambda < best.lambda))
            best = std::move(r);
    }
    return best;
}

} // namespace

double residual_norm(const Field& u, double lambda, double p) {
    Eigen::VectorXd r = energy_gradient(u, p).values - lambda * sphere_gradient(u, p);
    return r.norm() / std::pow(u.grid->h, u.grid->dim * 0.5);
}

EigenResult solve_ground_state(const GridPtr& grid, double p, const SolverOptions& opts) {
    return best_of_restarts(grid, p, Objective{nullptr, 0.0, p}, opts);
}

EigenResult solve_ground_state(const GridPtr& grid, double p, const Field& init,
                               const SolverOptions& opts) {
    if (!grid || grid->interior_count() == 0) throw EmptyGrid("solver: empty grid");
    if (init.values.size() != grid->interior_count())
        throw InvalidInput("solve_ground_state: initial field does not match the grid");
    return descend(grid, p, Objective{nullptr, 0.0, p}, opts, init);
}

EigenResult solve_perturbed(const GridPtr& grid, double p, const PotentialSpec& V,
                            double eps, const SolverOptions& opts) {
    if (!(eps > 0)) throw InvalidInput("solve_perturbed: need eps > 0");
    return best_of_restarts(grid, p, Objective{&V, eps, p}, opts);
}

std::vector<EigenResult> sweep_perturbed(const GridPtr& grid, double p,
                                         const PotentialSpec& V,
                                         const std::vector<double>& eps_list,
                                         const SolverOptions& opts) {
    if (eps_list.empty()) throw InvalidInput("sweep_perturbed: empty eps list");
    for (size_t i = 1; i < eps_list.size(); ++i)
        if (!(eps_list[i] < eps_list[i - 1]))
            throw InvalidInput("sweep_perturbed: eps list must be strictly decreasing");
    if (!grid || grid->interior_count() == 0) throw EmptyGrid("solver: empty grid");

    std::vector<EigenResult> out;
    Field warm;
    for (double eps : eps_list) {
        Objective obj{&V, eps, p};
        EigenResult r = warm.grid ? descend(grid, p, obj, opts, warm)
                                  : best_of_restarts(grid, p, obj, opts);
        warm = r.u;
        out.push_back(std::move(r));
    }
    return out;
}

double ls_upper_bound(const std::vector<GridPtr>& subgrids, double p,
                      const SolverOptions& opts) {
    if (subgrids.empty()) throw InvalidInput("ls_upper_bound: no subgrids");
    // P1 supports over the common lattice overlap iff two interior nodes from
    // different grids sit within one lattice step of each other.
    struct LongPairHash {
        size_t operator()(const std::array<long, 2>& a) const {
            return std::hash<long>()(a[0] * 1000003L + a[1]);
        }
    };
    std::unordered_set<std::array<long, 2>, LongPairHash> seen;
    double h0 = subgrids.front()->h;
    int dim0 = subgrids.front()->dim;
    for (const auto& g : subgrids) {
        if (std::abs(g->h - h0) > 1e-12 * h0 || g->dim != dim0)
            throw InvalidInput("ls_upper_bound: subgrids must share spacing and dimension");
        for (int k = 0; k < g->interior_count(); ++k) {
            auto gi = g->global_index(k);
            for (long di = -1; di <= 1; ++di)
                for (long dj = -1; dj <= 1; ++dj)
                    if (seen.count({gi[0] + di, gi[1] + dj}))
                        throw DisjointnessViolation("ls_upper_bound: overlapping supports");
        }
        for (int k = 0; k < g->interior_count(); ++k) seen.insert(g->global_index(k));
    }
    double bound = 0.0;
    for (const auto& g : subgrids)
        bound = std::max(bound, solve_ground_state(g, p, opts).lambda);
    return bound;
}

} // namespace plap
