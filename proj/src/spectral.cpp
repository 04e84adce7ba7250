#include "plap/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

namespace plap {

double h_function(double t, double p) {
    if (!(p > 1)) throw InvalidInput("h_function: need p > 1");
    double tmax = std::min(1.0, 1.0 / (p - 1));
    if (t < -1e-15 || t > tmax + 1e-15)
        throw InvalidInput("h_function: t outside [0, min(1, 1/(p-1))]");
    return (1.0 - t) / (1.0 + t) * (1.0 - (p - 1) * t);
}

double solve_h_inverse(double target, double p) {
    if (!(p > 1)) throw InvalidInput("solve_h_inverse: need p > 1");
    if (!(target > 0.0) || !(target < 1.0))
        throw InvalidInput("solve_h_inverse: target must lie in (0, 1)");
    double lo = 0.0, hi = std::min(1.0, 1.0 / (p - 1));
    // h is strictly decreasing, h(lo) = 1, h(hi) = 0.
    while (hi - lo > 1e-13) {
        double mid = 0.5 * (lo + hi);
        if (h_function(mid, p) > target) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

DecayModel theoretical_decay(double lambda, double Ep, double p, double r0) {
    if (!(lambda > 0) || !std::isfinite(Ep))
        throw InvalidInput("theoretical_decay: need 0 < lambda and finite Ep");
    if (!(lambda < Ep)) throw GapViolation("theoretical_decay: lambda >= Ep");
    DecayModel m;
    m.lambda = lambda;
    m.Ep = Ep;
    m.p = p;
    m.r0 = r0;
    m.eps_lambda = solve_h_inverse(0.5 * (1.0 + lambda / Ep), p);
    double eps = m.eps_lambda;
    double cp = elementary_inequality_constant(p);
    m.C4 = 2.0 / (Ep - lambda) *
           (std::pow(eps, 1.0 - p) * (1.0 + (1.0 - (p - 1) * eps) / (1.0 + eps) * cp) + lambda);
    m.alpha_theory = std::log(1.0 + 1.0 / m.C4) / p;
    m.C1 = std::pow(1.0 + 1.0 / m.C4, (r0 + 1.0) / p);
    return m;
}

namespace {

int worker_count() {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("PLAP_THREADS")) {
        long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1 && static_cast<unsigned>(cap) < n) n = static_cast<unsigned>(cap);
    }
    return static_cast<int>(n);
}

} // namespace

EpEstimate estimate_Ep(const DomainSpec& spec, double p,
                       const std::vector<double>& R_list,
                       const std::vector<double>& window_list, double h,
                       const SolverOptions& opts) {
    if (R_list.empty() || window_list.empty())
        throw InvalidInput("estimate_Ep: R and window lists must be nonempty");
    for (size_t i = 1; i < R_list.size(); ++i)
        if (!(R_list[i] > R_list[i - 1]))
            throw InvalidInput("estimate_Ep: R list must be increasing");
    for (double w : window_list)
        for (double R : R_list)
            if (!(w / 2 > R)) throw InvalidInput("estimate_Ep: window must exceed each R");

    constexpr double kInf = std::numeric_limits<double>::infinity();
    size_t ncells = R_list.size() * window_list.size();
    std::vector<double> lambdas(ncells, kInf);

    auto run_cell = [&](size_t idx) {
        double w = window_list[idx / R_list.size()];
        double R = R_list[idx % R_list.size()];
        try {
            auto grid = build_grid(DomainSpec::difference_ball(spec, R), h,
                                   Window::centered(spec.dimension(), w));
            lambdas[idx] = solve_ground_state(grid, p, opts).lambda;
        } catch (const EmptyGrid&) {
            // truncation exhausted the set: the table ends here
        }
    };

    int threads = std::min<int>(worker_count(), static_cast<int>(ncells));
    if (threads <= 1) {
        for (size_t i = 0; i < ncells; ++i) run_cell(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (size_t i = next++; i < ncells; i = next++) run_cell(i);
            });
        for (auto& t : pool) t.join();
    }

    EpEstimate est;
    bool any_empty = false;
    for (size_t wi = 0; wi < window_list.size(); ++wi)
        for (size_t ri = 0; ri < R_list.size(); ++ri) {
            double lam = lambdas[wi * R_list.size() + ri];
            if (std::isinf(lam)) {
                any_empty = true;
                continue;
            }
            est.table.push_back({R_list[ri], window_list[wi], lam});
        }
    if (est.table.empty() || any_empty) {
        // Some truncation is already empty: the sup over R is infinite.
        est.extrapolated = kInf;
        est.r0_estimate = est.table.empty() ? 0.0 : est.table.front().R;
    } else {
        // Read off the largest window: truncation bias there is smallest.
        size_t wbest = 0;
        for (size_t wi = 1; wi < window_list.size(); ++wi)
            if (window_list[wi] > window_list[wbest]) wbest = wi;
        est.extrapolated = lambdas[wbest * R_list.size() + R_list.size() - 1];
        est.r0_estimate = R_list.back();
        for (size_t ri = 0; ri < R_list.size(); ++ri) {
            double lam = lambdas[wbest * R_list.size() + ri];
            if (lam >= 0.95 * est.extrapolated) {
                est.r0_estimate = R_list[ri];
                break;
            }
        }
    }

    // Domain monotonicity: growing R shrinks the set (lambda up), growing the
    // window enlarges it (lambda down).
    auto lam_at = [&](size_t wi, size_t ri) { return lambdas[wi * R_list.size() + ri]; };
    for (size_t wi = 0; wi < window_list.size() && est.monotone_ok; ++wi)
        for (size_t ri = 1; ri < R_list.size(); ++ri) {
            double a = lam_at(wi, ri - 1), b = lam_at(wi, ri);
            if (std::isinf(a) || std::isinf(b)) continue;
            if (b < a * (1.0 - 1e-9)) est.monotone_ok = false;
        }
    for (size_t ri = 0; ri < R_list.size() && est.monotone_ok; ++ri)
        for (size_t wi = 1; wi < window_list.size(); ++wi) {
            double a = lam_at(wi - 1, ri), b = lam_at(wi, ri);
            if (std::isinf(a) || std::isinf(b)) continue;
            bool wider = window_list[wi] > window_list[wi - 1];
            if (wider ? b > a * (1.0 + 1e-9) : b < a * (1.0 - 1e-9))
                est.monotone_ok = false;
        }
    return est;
}

DecayFit fit_decay(const Field& u, double floor) {
    if (!(floor > 0)) throw InvalidInput("fit_decay: floor must be positive");
    const Grid& g = *u.grid;
    double dr = 2.0 * g.h;
    std::vector<double> bin_max, bin_r;
    for (int k = 0; k < g.interior_count(); ++k) {
        double r = g.node_radius(k);
        size_t b = static_cast<size_t>(r / dr);
        if (b >= bin_max.size()) {
            bin_max.resize(b + 1, 0.0);
            bin_r.resize(b + 1, 0.0);
        }
        double a = std::abs(u.values[k]);
        if (a > bin_max[b]) {
            bin_max[b] = a;
            bin_r[b] = r;
        }
    }
    DecayFit fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t b = 0; b < bin_max.size(); ++b) {
        if (bin_max[b] <= floor) continue;
        double x = bin_r[b], y = std::log(bin_max[b]);
        fit.bin_r.push_back(x);
        fit.bin_max.push_back(bin_max[b]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    fit.bins = static_cast<int>(fit.bin_r.size());
    if (fit.bins < 4) throw InsufficientDecayData("fit_decay: fewer than 4 usable bins");
    double n = fit.bins;
    double denom = n * sxx - sx * sx;
    if (denom <= 0) throw InsufficientDecayData("fit_decay: degenerate abscissae");
    double slope = (n * sxy - sx * sy) / denom;
    fit.alpha_fit = -slope;
    fit.C_fit = std::exp((sy - slope * sx) / n);
    fit.r_min = fit.bin_r.front();
    fit.r_max = fit.bin_r.back();
    return fit;
}

namespace {

// Visit every P1 element: callback(measure, grad_norm2_of(w), centroid_x,
// centroid_y, vertex index triple/pair). Used by the cut-off quadratures.
template <class F>
void for_each_element(const Grid& g, const Eigen::VectorXd& w, F&& cb) {
    double h = g.h;
    auto val = [&](int i, int j) {
        int32_t k = g.at(i, j);
        return k >= 0 ? w[k] : 0.0;
    };
    if (g.dim == 1) {
        for (const auto& c : g.cells) {
            double grad = (val(c[0] + 1, 0) - val(c[0], 0)) / h;
            double vc = 0.5 * (val(c[0] + 1, 0) + val(c[0], 0));
            cb(h, grad * grad, g.coord(0, c[0]) + h / 2, 0.0, vc);
        }
    } else {
        double area = h * h / 2;
        for (const auto& c : g.cells) {
            double x0 = g.coord(0, c[0]), y0 = g.coord(1, c[1]);
            double v00 = val(c[0], c[1]);
            double v10 = val(c[0] + 1, c[1]);
            double v01 = val(c[0], c[1] + 1);
            double v11 = val(c[0] + 1, c[1] + 1);
            double gx = (v10 - v00) / h, gy = (v11 - v10) / h;
            cb(area, gx * gx + gy * gy, x0 + 2 * h / 3, y0 + h / 3,
               (v00 + v10 + v11) / 3);
            gx = (v11 - v01) / h;
            gy = (v01 - v00) / h;
            cb(area, gx * gx + gy * gy, x0 + h / 3, y0 + 2 * h / 3,
               (v00 + v01 + v11) / 3);
        }
    }
}

double cutoff(double r, double R) { return std::min(std::max(r - R, 0.0), 1.0); }

} // namespace

bool check_caccioppoli(const Field& u, double lambda, double R, double delta, double p) {
    if (!(delta > 0) || !(delta < 1.0 / (p - 1)))
        throw InvalidInput("check_caccioppoli: need 0 < delta < 1/(p-1)");
    if (!(R >= 0)) throw InvalidInput("check_caccioppoli: need R >= 0");
    const Grid& g = *u.grid;
    Eigen::VectorXd v = u.values.cwiseAbs();
    Eigen::VectorXd eta(v.size());
    for (int k = 0; k < v.size(); ++k) eta[k] = cutoff(g.node_radius(k), R);

    double lhs = 0.0, rhs = 0.0;
    for_each_element(g, v, [&](double meas, double gn2, double x, double y, double vc) {
        double r = g.dim == 1 ? std::abs(x) : std::hypot(x, y);
        lhs += meas * std::pow(gn2, p / 2) * std::pow(cutoff(r, R), p);
        (void)vc;
    });
    lhs *= 1.0 - (p - 1) * delta;

    // |grad eta|^p v^p term: element gradient of the nodal cut-off, v at centroid.
    double grad_term = 0.0;
    {
        // Reuse the element walk with eta as the differentiated field and v
        // interpolated alongside.
        double h = g.h;
        auto val = [&](const Eigen::VectorXd& w, int i, int j) {
            int32_t k = g.at(i, j);
            return k >= 0 ? w[k] : 0.0;
        };
        if (g.dim == 1) {
            for (const auto& c : g.cells) {
                double ge = (val(eta, c[0] + 1, 0) - val(eta, c[0], 0)) / h;
                double vc = 0.5 * (val(v, c[0] + 1, 0) + val(v, c[0], 0));
                grad_term += h * std::pow(std::abs(ge), p) * std::pow(vc, p);
            }
        } else {
            double area = h * h / 2;
            for (const auto& c : g.cells) {
                double e00 = val(eta, c[0], c[1]), e10 = val(eta, c[0] + 1, c[1]);
                double e01 = val(eta, c[0], c[1] + 1), e11 = val(eta, c[0] + 1, c[1] + 1);
                double w00 = val(v, c[0], c[1]), w10 = val(v, c[0] + 1, c[1]);
                double w01 = val(v, c[0], c[1] + 1), w11 = val(v, c[0] + 1, c[1] + 1);
                double gx = (e10 - e00) / h, gy = (e11 - e10) / h;
                grad_term += area * std::pow(gx * gx + gy * gy, p / 2) *
                             std::pow((w00 + w10 + w11) / 3, p);
                gx = (e11 - e01) / h;
                gy = (e01 - e00) / h;
                grad_term += area * std::pow(gx * gx + gy * gy, p / 2) *
                             std::pow((w00 + w01 + w11) / 3, p);
            }
        }
    }
    rhs += std::pow(delta, 1.0 - p) * grad_term;

    double m = g.measure();
    for (int k = 0; k < v.size(); ++k)
        rhs += lambda * m * std::pow(v[k], p) * std::pow(eta[k], p);

    return lhs <= rhs * (1.0 + 1e-8) + 1e-300;
}

std::vector<GradientTail> gradient_decay_profile(const Field& u, double lambda, double p,
                                                 const std::vector<double>& R_list,
                                                 const DecayModel& model) {
    double M = std::pow(std::pow(2.0, p) * std::pow(p - 1.0, p - 1.0) + 2.0 * lambda, 1.0 / p) *
               model.C1;
    double unorm = std::pow(lp_norm_p(u, p), 1.0 / p);
    std::vector<GradientTail> out;
    for (double R : R_list) {
        double tail = 0.0;
        for_each_element(*u.grid, u.values,
                         [&](double meas, double gn2, double x, double y, double) {
                             double r = u.grid->dim == 1 ? std::abs(x) : std::hypot(x, y);
                             if (r > R + 1.0) tail += meas * std::pow(gn2, p / 2);
                         });
        out.push_back({R, std::pow(tail, 1.0 / p),
                       M * std::exp(-model.alpha_theory * R) * unorm});
    }
    return out;
}

std::string to_string(GapVerdict v) {
    switch (v) {
        case GapVerdict::applies: return "APPLIES";
        case GapVerdict::not_applies: return "NOT_APPLIES";
        default: return "INCONCLUSIVE";
    }
}

double pi_p(double p, double h, const SolverOptions& opts) {
    auto lam = [&](double hh) {
        auto grid = build_grid(DomainSpec::interval(-0.5, 0.5), hh, Window::make1d(-0.6, 0.6));
        return solve_ground_state(grid, p, opts).lambda;
    };
    double l1 = lam(h), l2 = lam(h / 2);
    double richardson = (4.0 * l2 - l1) / 3.0;
    return std::pow(richardson, 1.0 / p);
}

std::vector<GridPtr> disjoint_pieces(const DomainSpec& spec, int k, double p, double h,
                                     const Window& window, double whip_margin,
                                     const SolverOptions& opts) {
    if (k < 1) throw InvalidInput("disjoint_pieces: need k >= 1");
    std::vector<GridPtr> grids;
    if (const auto* whip = std::get_if<detail::WhipDom>(&spec.node())) {
        (void)whip;
        auto segments = whip_layout(k, p, h, whip_margin, 12.0, &opts);
        for (int n = 0; n < k; ++n) {
            const auto& seg = segments[n];
            // Trim each glued piece by 2h so P1 supports cannot touch.
            DomainSpec piece = DomainSpec::translate(
                whip_piece(n, seg.length, 2.0 * h), {seg.tau, 0.0});
            Window win = Window::make2d(seg.tau - seg.length - 1.0, seg.tau + seg.length + 1.0,
                                        -1.5, seg.amplitude + 1.5);
            grids.push_back(build_grid(piece, h, win));
        }
        return grids;
    }
    if (k == 1) {
        grids.push_back(build_grid(spec, h, window));
        return grids;
    }
    // Generic fallback: axis-0 slab slices of the window with 3h gaps.
    double lo = window.lo[0], hi = window.hi[0];
    double gap = 3.0 * h;
    double width = (hi - lo - (k - 1) * gap) / k;
    if (!(width > 4 * h)) throw InvalidInput("disjoint_pieces: window too small for k slices");
    for (int j = 0; j < k; ++j) {
        double a = lo + j * (width + gap), b = a + width;
        DomainSpec slice =
            spec.dimension() == 1
                ? DomainSpec::intersect(spec, DomainSpec::box({a}, {b}))
                : DomainSpec::intersect(spec,
                                        DomainSpec::box({a, window.lo[1]}, {b, window.hi[1]}));
        grids.push_back(build_grid(slice, h, window));
    }
    return grids;
}

GapReport gap_certificate(const DomainSpec& spec, int k, double p, double h,
                          const GapOptions& opts) {
    if (k < 1) throw InvalidInput("gap_certificate: need k >= 1");
    GapReport rep;
    rep.k = k;
    rep.p = p;
    rep.h = h;
    rep.safety = opts.safety;

    Window window = Window::centered(spec.dimension(), opts.window_extent);
    std::vector<double> R_list = opts.R_list;
    if (R_list.empty()) {
        // Small radii relative to the window keep the truncation bias of the
        // exterior levels low; each entry is still an upper bound.
        double w = opts.window_extent;
        R_list = {0.05 * w, 0.10 * w, 0.15 * w};
    }

    EpEstimate ep = estimate_Ep(spec, p, R_list, {opts.window_extent}, h, opts.solver);
    rep.ep_estimate = ep.extrapolated;

    if (k == 1) {
        rep.upper_bound = solve_ground_state(build_grid(spec, h, window), p, opts.solver).lambda;
    } else {
        auto pieces = disjoint_pieces(spec, k, p, h, window, opts.whip_margin, opts.solver);
        rep.upper_bound = ls_upper_bound(pieces, p, opts.solver);
    }

    if (std::isinf(rep.ep_estimate)) {
        // Exterior truncations empty: the threshold is infinite and any
        // finite level sits below it.
        rep.gap = 1.0;
        rep.verdict = GapVerdict::applies;
        rep.notes = "exterior truncation empty; threshold infinite";
        return rep;
    }

    rep.gap = (rep.ep_estimate - rep.upper_bound) / rep.ep_estimate;
    // Both sides are discrete upper bounds of their continuum values, so the
    // raw comparison is only trustworthy outside a safety band.
    if (rep.gap >= opts.safety) rep.verdict = GapVerdict::applies;
    else if (rep.gap < opts.safety / 2) rep.verdict = GapVerdict::not_applies;
    else rep.verdict = GapVerdict::inconclusive;
    if (!ep.monotone_ok) rep.notes = "threshold table violated monotonicity";
    return rep;
}

} // namespace plap
