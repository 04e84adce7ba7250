#pragma once

#include <array>
#include <memory>
#include <variant>
#include <vector>

#include "plap/errors.hpp"

namespace plap {

// Axis-aligned bounding window for grid construction.
struct Window {
    int dim = 1;
    std::array<double, 2> lo{0.0, 0.0};
    std::array<double, 2> hi{0.0, 0.0};

    static Window make1d(double a, double b);
    static Window make2d(double ax, double bx, double ay, double by);
    // Symmetric box [-extent/2, extent/2]^dim.
    static Window centered(int dim, double extent);
};

// Planar generating curve of a waveguide. CosBump(n) is the unit-speed
// reparametrization of t -> (t, (1+cos t)/(n+1)) on (-pi,pi), continued as a
// straight horizontal line outside.
struct CurveSpec {
    enum class Kind { straight_line, cos_bump };
    Kind kind = Kind::straight_line;
    int bump_index = 0;

    static CurveSpec straight() { return {Kind::straight_line, 0}; }
    static CurveSpec cos_bump(int n);
};

// Signed curvature kappa_n(s) in arc-length parametrization; identically zero
// for the straight line and for |s| >= s0(n).
double waveguide_curvature(const CurveSpec& spec, double s);

// Half arc length s0 of the bump portion of CosBump(n).
double bump_arc_half_length(int n);

// phi_n(s): inverse of the arc-length integral, for |s| < s0. Monotone, phi_n(0)=0.
double bump_param_from_arc(int n, double s);

class DomainSpec;

namespace detail {

// Fast point-to-curve distance for a graph curve (t, f(t)) on [-pi,pi] with
// straight horizontal tails. Samples are ordered by t.
class GraphCurveDistance {
public:
    explicit GraphCurveDistance(const CurveSpec& spec, int samples = 8192);
    double distance(double x, double y) const;

private:
    bool straight_ = true;
    std::vector<double> ts_, ys_;
};

struct IntervalDom { double a, b; };
struct BoxDom { std::vector<double> lo, hi; };
struct BallDom { std::vector<double> center; double radius; };
struct SlabWithBallDom { double slab_halfwidth, ball_radius; };
struct WaveguideDom {
    CurveSpec curve;
    double halfwidth;
    std::shared_ptr<const GraphCurveDistance> dist;
};
struct WhipDom {
    int segments;
    std::vector<double> lengths;  // L_n, one per segment
    std::vector<double> tau;      // translation offsets
    std::vector<std::shared_ptr<const GraphCurveDistance>> dist;  // per segment
};
struct UnionDom { std::shared_ptr<const DomainSpec> a, b; };
struct IntersectionDom { std::shared_ptr<const DomainSpec> a, b; };
struct DifferenceBallDom { std::shared_ptr<const DomainSpec> inner; double R; };
struct TranslateDom { std::shared_ptr<const DomainSpec> inner; std::vector<double> shift; };

using DomainNode = std::variant<IntervalDom, BoxDom, BallDom, SlabWithBallDom,
                                WaveguideDom, WhipDom, UnionDom, IntersectionDom,
                                DifferenceBallDom, TranslateDom>;

} // namespace detail

// Declarative description of the open set. Immutable after construction.
class DomainSpec {
public:
    static DomainSpec interval(double a, double b);
    static DomainSpec box(std::vector<double> lo, std::vector<double> hi);
    static DomainSpec ball(std::vector<double> center, double radius);
    static DomainSpec slab_with_ball(double slab_halfwidth, double ball_radius);
    static DomainSpec waveguide(CurveSpec curve, double halfwidth);
    // Whip with explicit segment lengths (one per segment, each > pi). With
    // empty lengths, a default of 4.0 per segment is used.
    static DomainSpec whip(int segments, std::vector<double> lengths = {});
    static DomainSpec unite(DomainSpec a, DomainSpec b);
    static DomainSpec intersect(DomainSpec a, DomainSpec b);
    static DomainSpec difference_ball(DomainSpec inner, double R);
    static DomainSpec translate(DomainSpec inner, std::vector<double> shift);

    int dimension() const { return dim_; }
    bool contains(const double* x) const;
    bool contains(double x) const;
    bool contains(double x, double y) const;

    const detail::DomainNode& node() const { return *node_; }

private:
    DomainSpec(std::shared_ptr<const detail::DomainNode> node, int dim)
        : node_(std::move(node)), dim_(dim) {}
    std::shared_ptr<const detail::DomainNode> node_;
    int dim_ = 1;
};

// Pointwise membership with dimension check.
bool indicator(const DomainSpec& spec, const std::vector<double>& x);

// Translation offsets tau_0 = L_0, tau_n = 2(L_0+...+L_{n-1}) + L_n.
std::vector<double> whip_translations(const std::vector<double>& lengths);

struct SolverOptions;

struct WhipSegment {
    double length;     // L_n
    double tau;        // translation along e_1
    double amplitude;  // bump peak 2/(n+1)
};

// Calibrates segment lengths so that the discrete ground level of each piece
// sits below (pi_p)^p (1 - margin). Throws SegmentCalibrationFailed when no
// length up to max_length achieves the target (grid too coarse).
std::vector<WhipSegment> whip_layout(int n_segments, double p, double h,
                                     double margin = 0.10,
                                     double max_length = 12.0,
                                     const SolverOptions* opts = nullptr);

// The centered (untranslated) piece O_n of the whip: the CosBump(n) waveguide
// cut to x1 in (-L+trim, L-trim).
DomainSpec whip_piece(int n, double length, double trim = 0.0);

} // namespace plap
