#pragma once

#include <limits>
#include <string>
#include <vector>

#include "plap/solver.hpp"

namespace plap {

// h(t) = (1-t)/(1+t) * (1-(p-1)t) on [0, min{1, 1/(p-1)}], bijective onto
// [0,1] and decreasing.
double h_function(double t, double p);

// Unique t with h(t) = target, target in (0,1). Bisection to 1e-12.
double solve_h_inverse(double target, double p);

// Theoretical decay constants chained from the gap lambda < Ep, plus the
// fitted counterpart measured on a computed eigenfunction.
struct DecayModel {
    double lambda = 0.0;
    double Ep = 0.0;
    double p = 2.0;
    double eps_lambda = 0.0;  // solves h(eps) = (1+lambda/Ep)/2
    double C4 = 0.0;
    double alpha_theory = 0.0;  // (1/p) log(1 + 1/C4)
    double C1 = 0.0;            // (1+1/C4)^{(r0+1)/p}
    double r0 = 0.0;
    // Fit side (NaN until fit_decay fills them in).
    double alpha_fit = std::numeric_limits<double>::quiet_NaN();
    double C_fit = std::numeric_limits<double>::quiet_NaN();
    double fit_r_min = 0.0, fit_r_max = 0.0;
};

// Throws GapViolation when lambda >= Ep.
DecayModel theoretical_decay(double lambda, double Ep, double p, double r0);

struct EpEstimate {
    struct Entry { double R, window, lambda_ext; };
    std::vector<Entry> table;
    double extrapolated = 0.0;  // +inf sentinel when all truncations are empty
    bool monotone_ok = true;    // nondecreasing in R, nonincreasing in window
    double r0_estimate = 0.0;   // smallest R with lambda_ext >= (1-eps)*extrapolated
};

// Poincare constant at infinity: table of lambda_1((Omega ∩ window) \ B_R).
// "window" entries are total box extents w, i.e. boxes [-w/2, w/2]^d. Every
// entry is an upper bound for lambda_1(Omega \ B_R).
EpEstimate estimate_Ep(const DomainSpec& spec, double p,
                       const std::vector<double>& R_list,
                       const std::vector<double>& window_list, double h,
                       const SolverOptions& opts = {});

struct DecayFit {
    double alpha_fit = 0.0;
    double C_fit = 0.0;
    double r_min = 0.0, r_max = 0.0;
    int bins = 0;
    std::vector<double> bin_r;       // radius of the max-attaining node per bin
    std::vector<double> bin_max;     // max |u| per radial bin
};

// Radial max profile M(r) over bins of width 2h, least squares on log M.
// Throws InsufficientDecayData with fewer than 4 usable bins.
DecayFit fit_decay(const Field& u, double floor = 1e-12);

// Caccioppoli inequality with the cut-off eta(x)=min{(|x|-R)_+,1}:
// (1-(p-1)delta) ∫ |grad u|^p eta^p <= delta^{1-p} ∫ |grad eta|^p u^p + lambda ∫ u^p eta^p.
bool check_caccioppoli(const Field& u, double lambda, double R, double delta, double p);

struct GradientTail {
    double R;
    double grad_lp_tail;  // (∫_{|x|>R+1} |grad u|^p)^{1/p}
    double envelope;      // M e^{-alpha R} ||u||_p with M = (2^p (p-1)^{p-1} + 2 lambda)^{1/p} C1
};

std::vector<GradientTail> gradient_decay_profile(const Field& u, double lambda, double p,
                                                 const std::vector<double>& R_list,
                                                 const DecayModel& model);

enum class GapVerdict { applies, inconclusive, not_applies };

struct GapReport {
    int k = 1;
    double p = 2.0;
    double h = 0.0;
    double upper_bound = 0.0;   // certified upper bound for lambda_k^{LS}
    double ep_estimate = 0.0;
    double safety = 0.05;
    double gap = 0.0;           // (ep_estimate - upper_bound)/ep_estimate
    GapVerdict verdict = GapVerdict::inconclusive;
    std::string notes;
};

std::string to_string(GapVerdict v);

struct GapOptions {
    double window_extent = 20.0;      // total box extent for the working grid
    std::vector<double> R_list;       // Ep truncation radii (defaulted if empty)
    double safety = 0.05;
    double whip_margin = 0.10;        // calibration margin for whip pieces
    SolverOptions solver;
};

// Certificate for the gap hypothesis lambda_k^{LS}(Omega) < Ep(Omega):
// upper bound (ground state for k=1, disjoint pieces for k>=2) vs Ep estimate.
GapReport gap_certificate(const DomainSpec& spec, int k, double p, double h,
                          const GapOptions& opts = {});

// (lambda_1 of Interval(-1/2,1/2) at resolution h)^{1/p}, Richardson
// extrapolated over h and h/2.
double pi_p(double p, double h, const SolverOptions& opts = {});

// k pairwise-disjoint subgrids inside spec ∩ window: whip pieces when spec is
// a whip (calibrated via whip_layout), axis-0 slab slices otherwise.
std::vector<GridPtr> disjoint_pieces(const DomainSpec& spec, int k, double p, double h,
                                     const Window& window, double whip_margin,
                                     const SolverOptions& opts);

} // namespace plap
