#include "plap/energy.hpp"

#include <cmath>

namespace plap {

PotentialSpec PotentialSpec::power_law(double q) {
    if (!(q > 0)) throw InvalidInput("potential: exponent q must be positive");
    return PotentialSpec{q, {}};
}

PotentialSpec PotentialSpec::power_law_geometric(double q, double eps0, double ratio, int count) {
    if (!(eps0 > 0) || !(ratio > 0) || ratio >= 1 || count < 1)
        throw InvalidInput("potential: geometric schedule needs eps0 > 0, 0 < ratio < 1, count >= 1");
    PotentialSpec v = power_law(q);
    double e = eps0;
    for (int i = 0; i < count; ++i, e *= ratio) v.eps_list.push_back(e);
    return v;
}

PotentialSpec PotentialSpec::power_law_with_schedule(double q, std::vector<double> eps) {
    PotentialSpec v = power_law(q);
    for (size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0)) throw InvalidInput("potential: amplitudes must be positive");
        if (i > 0 && !(eps[i] < eps[i - 1]))
            throw InvalidInput("potential: amplitude schedule must be strictly decreasing");
    }
    v.eps_list = std::move(eps);
    return v;
}

double PotentialSpec::value(double x, double y) const {
    return std::pow(std::hypot(x, y), q);
}

namespace {

void require_finite(const Field& u) {
    if (!u.values.allFinite()) throw InvalidField("field contains NaN or inf");
}

double val(const Grid& g, const Eigen::VectorXd& u, int i, int j) {
    int32_t k = g.at(i, j);
    return k >= 0 ? u[k] : 0.0;
}

// pow(n2, p/2) with fast paths for the common exponents in the hot loops.
inline double pow_half(double n2, double p) {
    if (p == 2.0) return n2;
    if (p == 3.0) return n2 * std::sqrt(n2);
    return std::pow(n2, p / 2);
}

// pow(n2, p/2 - 1), the degenerate weight of the element gradients.
inline double pow_half_m1(double n2, double p) {
    if (p == 2.0) return 1.0;
    if (p == 3.0) return std::sqrt(n2);
    return std::pow(n2, p / 2 - 1);
}

} // namespace

double dirichlet_energy_p(const Field& u, double p) {
    if (!(p > 1)) throw InvalidInput("energy: need p > 1");
    require_finite(u);
    const Grid& g = *u.grid;
    double h = g.h;
    double acc = 0.0;
    if (g.dim == 1) {
        for (const auto& c : g.cells) {
            double grad = (val(g, u.values, c[0] + 1, 0) - val(g, u.values, c[0], 0)) / h;
            acc += h * pow_half(grad * grad, p);
        }
    } else {
        double area = h * h / 2;
        for (const auto& c : g.cells) {
            double v00 = val(g, u.values, c[0], c[1]);
            double v10 = val(g, u.values, c[0] + 1, c[1]);
            double v01 = val(g, u.values, c[0], c[1] + 1);
            double v11 = val(g, u.values, c[0] + 1, c[1] + 1);
            // Lower triangle (v00, v10, v11), upper triangle (v00, v11, v01).
            double gx = (v10 - v00) / h, gy = (v11 - v10) / h;
            acc += area * pow_half(gx * gx + gy * gy, p);
            gx = (v11 - v01) / h;
            gy = (v01 - v00) / h;
            acc += area * pow_half(gx * gx + gy * gy, p);
        }
    }
    return acc;
}

double lp_norm_p(const Field& u, double p) {
    if (!(p > 1)) throw InvalidInput("energy: need p > 1");
    require_finite(u);
    double m = u.grid->measure();
    double acc = 0.0;
    for (int k = 0; k < u.values.size(); ++k) acc += m * pow_half(u.values[k] * u.values[k], p);
    return acc;
}

Field energy_gradient(const Field& u, double p) {
    if (!(p > 1)) throw InvalidInput("energy: need p > 1");
    require_finite(u);
    const Grid& g = *u.grid;
    double h = g.h;
    Field out = Field::zero(u.grid);
    auto add = [&](int i, int j, double v) {
        int32_t k = g.at(i, j);
        if (k >= 0) out.values[k] += v;
    };
    if (g.dim == 1) {
        for (const auto& c : g.cells) {
            double grad = (val(g, u.values, c[0] + 1, 0) - val(g, u.values, c[0], 0)) / h;
            if (grad == 0.0) continue;
            double w = p * std::pow(std::abs(grad), p - 2) * grad;  // times d(grad)/du * h
            add(c[0], 0, -w);
            add(c[0] + 1, 0, w);
        }
    } else {
        double area = h * h / 2;
        for (const auto& c : g.cells) {
            double v00 = val(g, u.values, c[0], c[1]);
            double v10 = val(g, u.values, c[0] + 1, c[1]);
            double v01 = val(g, u.values, c[0], c[1] + 1);
            double v11 = val(g, u.values, c[0] + 1, c[1] + 1);
            {
                double gx = (v10 - v00) / h, gy = (v11 - v10) / h;
                double n2 = gx * gx + gy * gy;
                if (n2 > 0.0) {
                    double w = p * area * pow_half_m1(n2, p) / h;
                    add(c[0], c[1], -w * gx);
                    add(c[0] + 1, c[1], w * (gx - gy));
                    add(c[0] + 1, c[1] + 1, w * gy);
                }
            }
            {
                double gx = (v11 - v01) / h, gy = (v01 - v00) / h;
                double n2 = gx * gx + gy * gy;
                if (n2 > 0.0) {
                    double w = p * area * pow_half_m1(n2, p) / h;
                    add(c[0], c[1], -w * gy);
                    add(c[0], c[1] + 1, w * (gy - gx));
                    add(c[0] + 1, c[1] + 1, w * gx);
                }
            }
        }
    }
    return out;
}

double weighted_energy(const Field& u, const PotentialSpec& V, double eps, double p) {
    if (!(eps > 0)) throw InvalidInput("weighted_energy: need eps > 0");
    double acc = dirichlet_energy_p(u, p);
    const Grid& g = *u.grid;
    double m = g.measure();
    for (int k = 0; k < u.values.size(); ++k) {
        auto xy = g.node_coords(k);
        acc += eps * m * V.value(xy[0], xy[1]) * std::pow(std::abs(u.values[k]), p);
    }
    return acc;
}

Field weighted_energy_gradient_potential(const Field& u, const PotentialSpec& V,
                                         double eps, double p) {
    require_finite(u);
    const Grid& g = *u.grid;
    double m = g.measure();
    Field out = Field::zero(u.grid);
    for (int k = 0; k < u.values.size(); ++k) {
        auto xy = g.node_coords(k);
        double a = std::abs(u.values[k]);
        if (a == 0.0) continue;
        out.values[k] = eps * p * m * V.value(xy[0], xy[1]) *
                        std::pow(a, p - 1) * (u.values[k] > 0 ? 1.0 : -1.0);
    }
    return out;
}

double elementary_inequality_constant(double p) {
    if (!(p > 1)) throw InvalidInput("elementary_inequality_constant: need p > 1");
    return 1.0 + std::pow(std::pow(2.0, p - 1) * (p - 1), p - 1);
}

} // namespace plap
