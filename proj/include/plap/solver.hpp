#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "plap/energy.hpp"
#include "plap/grid.hpp"

namespace plap {

struct SolverOptions {
    double tol_residual = 1e-8;  // relative to max(1, lambda)
    double tol_lambda = 1e-10;   // relative stagnation over 10 iterations
    int max_iters = 50000;
    std::uint64_t seed = 0;
    int restarts = 0;  // extra random restarts beyond the bump initializer
};

struct EigenResult {
    double lambda = 0.0;
    Field u;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> energy_history;
    // Empirical ratio ||u||_inf / lambda^{N/p^2} (perturbed solves only;
    // reported, never asserted).
    double sup_ratio = 0.0;
};

// Rayleigh quotient E(u)/||u||_p^p. Throws DivisionByZero on the zero field.
double rayleigh(const Field& u, double p);

// Dual norm of the discrete eigen-residual energy_gradient(u) - lambda*p*m|u|^{p-2}u,
// Euclidean over nodal directions scaled by the cell measure (||.||_2 / h^{d/2}).
double residual_norm(const Field& u, double lambda, double p);

// Projected gradient descent (Barzilai-Borwein trial step, Armijo
// backtracking, renormalization to the L^p sphere each step) for the ground
// state of the Rayleigh quotient.
EigenResult solve_ground_state(const GridPtr& grid, double p, const SolverOptions& opts = {});

// Warm-started variant: descend from a given field (e.g. transferred from a
// coarser grid) instead of the bump initializer.
EigenResult solve_ground_state(const GridPtr& grid, double p, const Field& init,
                               const SolverOptions& opts = {});

// Same descent applied to the confining-potential energy
// G(u) = E(u) + eps * sum m V |u|^p on the sphere.
EigenResult solve_perturbed(const GridPtr& grid, double p, const PotentialSpec& V,
                            double eps, const SolverOptions& opts = {});

// Warm-started sweep over a decreasing eps list.
std::vector<EigenResult> sweep_perturbed(const GridPtr& grid, double p,
                                         const PotentialSpec& V,
                                         const std::vector<double>& eps_list,
                                         const SolverOptions& opts = {});

// max_i lambda_1(subgrid_i) over pairwise support-disjoint subgrids: an upper
// bound for the k-th Ljusternik-Schnirelmann level of any superset of the
// union. Throws DisjointnessViolation when P1 supports overlap.
double ls_upper_bound(const std::vector<GridPtr>& subgrids, double p,
                      const SolverOptions& opts = {});

// Smallest k eigenvalues of the P1 stiffness vs lumped-mass pencil (p = 2),
// ascending, by blocked shift-invert iteration with deflation.
std::vector<double> courant_fischer_p2(const GridPtr& grid, int k);

// P1 stiffness matrix action K*u as a field gradient check helper:
// energy_gradient(u,2) == 2*K*u. Exposed for tests.
Eigen::VectorXd stiffness_apply(const Grid& g, const Eigen::VectorXd& u);

} // namespace plap
