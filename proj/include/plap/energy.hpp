#pragma once

#include <vector>

#include "plap/grid.hpp"

namespace plap {

// Power-law confining potential V(x) = |x|^q with a decreasing amplitude
// schedule eps_n. Strongly confining with alpha(R) = R^q.
struct PotentialSpec {
    double q = 2.0;
    std::vector<double> eps_list;  // strictly decreasing, positive

    static PotentialSpec power_law(double q);
    static PotentialSpec power_law_geometric(double q, double eps0, double ratio, int count);
    static PotentialSpec power_law_with_schedule(double q, std::vector<double> eps);

    double value(double x, double y) const;  // V at a point (y ignored in 1D)
};

// Discrete p-Dirichlet energy: sum over P1 elements (split-square triangles
// in 2D, intervals in 1D) of |T| * |grad u|^p.
double dirichlet_energy_p(const Field& u, double p);

// Mass-lumped L^p norm to the p-th power: sum m_i |u_i|^p with m_i = h^d.
double lp_norm_p(const Field& u, double p);

// Exact gradient of dirichlet_energy_p with respect to nodal values.
Field energy_gradient(const Field& u, double p);

// dirichlet_energy_p + eps * sum m_i V(x_i) |u_i|^p.
double weighted_energy(const Field& u, const PotentialSpec& V, double eps, double p);

// Nodal gradient of the potential part: eps * p * m_i V(x_i) |u_i|^{p-2} u_i.
Field weighted_energy_gradient_potential(const Field& u, const PotentialSpec& V,
                                         double eps, double p);

// c_p = 1 + (2^{p-1}(p-1))^{p-1}, a valid constant for the elementary
// inequality ||a+b|^p - |a|^p| <= eps |a|^p + c_p eps^{1-p} |b|^p, 0<eps<1.
double elementary_inequality_constant(double p);

} // namespace plap
