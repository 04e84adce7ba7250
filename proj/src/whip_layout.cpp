#include <cmath>
#include <numbers>

#include "plap/spectral.hpp"

namespace plap {

std::vector<WhipSegment> whip_layout(int n_segments, double p, double h, double margin,
                                     double max_length, const SolverOptions* opts) {
    if (n_segments < 1) throw InvalidInput("whip_layout: need at least one segment");
    if (!(p > 1) || !(h > 0)) throw InvalidInput("whip_layout: need p > 1 and h > 0");
    if (!(margin > 0) || !(margin < 1)) throw InvalidInput("whip_layout: margin in (0,1)");

    SolverOptions calib;
    calib.tol_residual = 1e-6;
    calib.max_iters = 20000;
    if (opts) calib = *opts;

    // Compare against the discrete cross-section level at the same spacing,
    // the quantity the glued-piece bound is measured against.
    auto strip_grid = build_grid(DomainSpec::interval(-0.5, 0.5), h, Window::make1d(-0.6, 0.6));
    double threshold = solve_ground_state(strip_grid, p, calib).lambda * (1.0 - margin);

    std::vector<double> lengths;
    for (int n = 0; n < n_segments; ++n) {
        double ytop = 0.5 + 2.0 / (n + 1) + 0.5;
        std::vector<double> ladder;
        for (double L = std::numbers::pi + 0.5; L < max_length; L *= 1.25) ladder.push_back(L);
        ladder.push_back(max_length);

        double found = -1.0, prev_lambda = -1.0;
        for (double L : ladder) {
            auto grid = build_grid(whip_piece(n, L), h,
                                   Window::make2d(-L - 1.0, L + 1.0, -ytop, ytop));
            double lam = solve_ground_state(grid, p, calib).lambda;
            if (lam < threshold) {
                found = L;
                break;
            }
            // lambda is nonincreasing in L (domain monotonicity); once it
            // stalls above the target, longer pieces cannot help.
            if (prev_lambda > 0 && std::abs(lam - prev_lambda) < 1e-4 * lam) break;
            prev_lambda = lam;
        }
        if (found < 0)
            throw SegmentCalibrationFailed(
                "whip_layout: no segment length up to the cap brings the piece level below "
                "the cross-section target (grid too coarse)");
        lengths.push_back(found);
    }

    auto tau = whip_translations(lengths);
    std::vector<WhipSegment> out;
    for (int n = 0; n < n_segments; ++n)
        out.push_back({lengths[n], tau[n], 2.0 / (n + 1)});
    return out;
}

} // namespace plap
