#include "plap/solver.hpp"

#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace plap {

namespace {

// P1 stiffness over the split-square triangulation: u^T K u equals the
// quadratic Dirichlet energy, energy_gradient(u, 2) == 2 K u.
Eigen::SparseMatrix<double> assemble_stiffness(const Grid& g) {
    int n = g.interior_count();
    std::vector<Eigen::Triplet<double>> trips;
    auto add = [&](int32_t a, int32_t b, double v) {
        if (a >= 0 && b >= 0) trips.emplace_back(a, b, v);
    };
    if (g.dim == 1) {
        double w = 1.0 / g.h;
        for (const auto& c : g.cells) {
            int32_t a = g.at(c[0], 0), b = g.at(c[0] + 1, 0);
            add(a, a, w);
            add(b, b, w);
            add(a, b, -w);
            add(b, a, -w);
        }
    } else {
        // Element matrix for a right triangle with legs h: for vertices
        // (corner, leg-x end, hypotenuse end) the gradients give the classic
        // half-weights; accumulating both triangles yields the 5-point stencil.
        for (const auto& c : g.cells) {
            int32_t v00 = g.at(c[0], c[1]);
            int32_t v10 = g.at(c[0] + 1, c[1]);
            int32_t v01 = g.at(c[0], c[1] + 1);
            int32_t v11 = g.at(c[0] + 1, c[1] + 1);
            auto tri = [&](int32_t a, int32_t b, int32_t cc) {
                // gx = (b-a)/h, gy = (cc-b)/h, area h^2/2, energy area*(gx^2+gy^2)
                add(a, a, 0.5);
                add(b, b, 1.0);
                add(cc, cc, 0.5);
                add(a, b, -0.5);
                add(b, a, -0.5);
                add(b, cc, -0.5);
                add(cc, b, -0.5);
            };
            tri(v00, v10, v11);
            tri(v00, v01, v11);
        }
    }
    Eigen::SparseMatrix<double> K(n, n);
    K.setFromTriplets(trips.begin(), trips.end());
    return K;
}

} // namespace

Eigen::VectorXd stiffness_apply(const Grid& g, const Eigen::VectorXd& u) {
    return assemble_stiffness(g) * u;
}

std::vector<double> courant_fischer_p2(const GridPtr& grid, int k) {
    if (!grid || grid->interior_count() == 0) throw EmptyGrid("courant_fischer: empty grid");
    int n = grid->interior_count();
    if (k < 1 || k > n) throw InvalidInput("courant_fischer: need 1 <= k <= node count");

    Eigen::SparseMatrix<double> K = assemble_stiffness(*grid);
    double mass = grid->measure();  // lumped mass matrix is mass * I

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(K);
    if (chol.info() != Eigen::Success)
        throw EigenIterationFailed("courant_fischer: factorization failed");

    // Blocked inverse iteration with Rayleigh-Ritz; the scalar mass matrix
    // reduces M-orthonormalization to plain QR.
    int block = std::min(n, k + 3);
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd X(n, block);
    for (int j = 0; j < block; ++j)
        for (int i = 0; i < n; ++i) X(i, j) = nd(rng);

    Eigen::VectorXd prev = Eigen::VectorXd::Constant(k, -1.0);
    std::vector<double> out;
    for (int it = 0; it < 1000; ++it) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
        Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, block);
        Eigen::MatrixXd A = Q.transpose() * (K * Q).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
        if (es.info() != Eigen::Success)
            throw EigenIterationFailed("courant_fischer: dense solve failed");
        Eigen::MatrixXd V = Q * es.eigenvectors();
        Eigen::VectorXd vals = es.eigenvalues() / mass;

        double rel = (vals.head(k) - prev).cwiseAbs().maxCoeff() /
                     std::max(1.0, vals.head(k).cwiseAbs().maxCoeff());
        prev = vals.head(k);
        if (rel < 1e-13 && it >= 3) {
            out.assign(prev.data(), prev.data() + k);
            return out;
        }
        // Shift-invert step: X <- K^{-1} (mass * V).
        X = chol.solve(mass * V);
        if (chol.info() != Eigen::Success)
            throw EigenIterationFailed("courant_fischer: back-substitution failed");
    }
    throw EigenIterationFailed("courant_fischer: no convergence in 1000 iterations");
}

} // namespace plap
