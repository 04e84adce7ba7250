#include "plap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace plap {

Window Window::make1d(double a, double b) {
    if (!(a < b)) throw InvalidInput("window: need a < b");
    Window w;
    w.dim = 1;
    w.lo = {a, 0.0};
    w.hi = {b, 0.0};
    return w;
}

Window Window::make2d(double ax, double bx, double ay, double by) {
    if (!(ax < bx) || !(ay < by)) throw InvalidInput("window: need lo < hi per axis");
    Window w;
    w.dim = 2;
    w.lo = {ax, ay};
    w.hi = {bx, by};
    return w;
}

Window Window::centered(int dim, double extent) {
    if (dim != 1 && dim != 2) throw InvalidInput("window: dim must be 1 or 2");
    if (!(extent > 0)) throw InvalidInput("window: extent must be positive");
    return dim == 1 ? make1d(-extent / 2, extent / 2)
                    : make2d(-extent / 2, extent / 2, -extent / 2, extent / 2);
}

CurveSpec CurveSpec::cos_bump(int n) {
    if (n < 0) throw InvalidInput("cos_bump: index must be nonnegative");
    return {Kind::cos_bump, n};
}

namespace {

constexpr double kPi = std::numbers::pi;

double speed(int n, double t) {
    double s = std::sin(t) / (n + 1);
    return std::sqrt(1.0 + s * s);
}

// Adaptive Simpson for the arc-length integrand (smooth, gentle).
double simpson(int n, double a, double b) {
    double c = 0.5 * (a + b);
    return (b - a) / 6.0 * (speed(n, a) + 4.0 * speed(n, c) + speed(n, b));
}

double adaptive(int n, double a, double b, double whole, double tol, int depth) {
    double c = 0.5 * (a + b);
    double left = simpson(n, a, c);
    double right = simpson(n, c, b);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) < 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive(n, a, c, left, tol / 2, depth - 1) +
           adaptive(n, c, b, right, tol / 2, depth - 1);
}

// Arc length of the bump curve from parameter 0 to t, t in [0, pi].
double arc_length(int n, double t) {
    if (t == 0.0) return 0.0;
    return adaptive(n, 0.0, t, simpson(n, 0.0, t), 1e-13, 40);
}

} // namespace

double bump_arc_half_length(int n) {
    if (n < 0) throw InvalidInput("bump_arc_half_length: index must be nonnegative");
    return arc_length(n, kPi);
}

double bump_param_from_arc(int n, double s) {
    if (n < 0) throw InvalidInput("bump_param_from_arc: index must be nonnegative");
    double s0 = bump_arc_half_length(n);
    double as = std::abs(s);
    if (as >= s0) {
        // Straight continuation: unit speed beyond the bump.
        return std::copysign(kPi + (as - s0), s);
    }
    // arc_length is strictly increasing in t; bisect to 1e-10 in s.
    double lo = 0.0, hi = kPi;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double val = arc_length(n, mid);
        if (std::abs(val - as) < 1e-10) return std::copysign(mid, s);
        if (val < as) lo = mid; else hi = mid;
        if (hi - lo < 1e-12) break;
    }
    return std::copysign(0.5 * (lo + hi), s);
}

double waveguide_curvature(const CurveSpec& spec, double s) {
    if (spec.kind == CurveSpec::Kind::straight_line) return 0.0;
    int n = spec.bump_index;
    if (std::abs(s) >= bump_arc_half_length(n)) return 0.0;
    double phi = bump_param_from_arc(n, s);
    double m = double(n + 1);
    double sp = std::sin(phi);
    return -(m * m) * std::cos(phi) / std::pow(m * m + sp * sp, 1.5);
}

namespace detail {

GraphCurveDistance::GraphCurveDistance(const CurveSpec& spec, int samples) {
    if (spec.kind == CurveSpec::Kind::straight_line) {
        straight_ = true;
        return;
    }
    straight_ = false;
    int n = spec.bump_index;
    ts_.resize(samples);
    ys_.resize(samples);
    for (int i = 0; i < samples; ++i) {
        double t = -kPi + 2.0 * kPi * i / (samples - 1);
        ts_[i] = t;
        ys_[i] = (1.0 + std::cos(t)) / (n + 1);
    }
    ys_.front() = ys_.back() = 0.0;
}

namespace {

double point_segment_dist2(double px, double py, double ax, double ay, double bx, double by) {
    double dx = bx - ax, dy = by - ay;
    double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    double ex = px - (ax + t * dx), ey = py - (ay + t * dy);
    return ex * ex + ey * ey;
}

} // namespace

double GraphCurveDistance::distance(double x, double y) const {
    if (straight_) return std::abs(y);
    // Straight tails along y = 0 for |t| >= pi.
    double best;
    if (x <= -kPi) best = std::abs(y);
    else best = std::hypot(x + kPi, y);
    double dr = (x >= kPi) ? std::abs(y) : std::hypot(x - kPi, y);
    best = std::min(best, dr);
    double best2 = best * best;
    // Scan outward from the sample nearest in t; the horizontal offset
    // |t_i - x| lower-bounds the distance, so the scan stops early.
    auto it = std::lower_bound(ts_.begin(), ts_.end(), x);
    int m = static_cast<int>(ts_.size());
    int i0 = std::clamp(static_cast<int>(it - ts_.begin()), 0, m - 1);
    for (int dir = 0; dir < 2; ++dir) {
        int step = dir == 0 ? -1 : 1;
        for (int i = dir == 0 ? i0 : i0 + 1;; i += step) {
            if (i < 0 || i >= m - 1) break;
            double gap = (step < 0) ? x - ts_[i + 1] : ts_[i] - x;
            if (gap > 0 && gap * gap > best2) break;
            best2 = std::min(best2, point_segment_dist2(x, y, ts_[i], ys_[i],
                                                        ts_[i + 1], ys_[i + 1]));
        }
    }
    return std::sqrt(best2);
}

} // namespace detail

DomainSpec DomainSpec::interval(double a, double b) {
    if (!(a < b)) throw InvalidInput("interval: need a < b");
    return DomainSpec(std::make_shared<detail::DomainNode>(detail::IntervalDom{a, b}), 1);
}

DomainSpec DomainSpec::box(std::vector<double> lo, std::vector<double> hi) {
    if (lo.size() != hi.size() || lo.empty() || lo.size() > 2)
        throw InvalidInput("box: lo/hi must both have dimension 1 or 2");
    for (size_t i = 0; i < lo.size(); ++i)
        if (!(lo[i] < hi[i])) throw InvalidInput("box: need lo < hi per axis");
    int dim = static_cast<int>(lo.size());
    return DomainSpec(std::make_shared<detail::DomainNode>(
                          detail::BoxDom{std::move(lo), std::move(hi)}),
                      dim);
}

DomainSpec DomainSpec::ball(std::vector<double> center, double radius) {
    if (center.empty() || center.size() > 2)
        throw InvalidInput("ball: center must have dimension 1 or 2");
    if (!(radius > 0)) throw InvalidInput("ball: radius must be positive");
    int dim = static_cast<int>(center.size());
    return DomainSpec(std::make_shared<detail::DomainNode>(
                          detail::BallDom{std::move(center), radius}),
                      dim);
}

DomainSpec DomainSpec::slab_with_ball(double slab_halfwidth, double ball_radius) {
    if (!(slab_halfwidth > 0)) throw InvalidInput("slab_with_ball: halfwidth must be positive");
    if (!(ball_radius > 0)) throw InvalidInput("slab_with_ball: ball radius must be positive");
    return DomainSpec(std::make_shared<detail::DomainNode>(
                          detail::SlabWithBallDom{slab_halfwidth, ball_radius}),
                      2);
}

DomainSpec DomainSpec::waveguide(CurveSpec curve, double halfwidth) {
    if (!(halfwidth > 0)) throw InvalidInput("waveguide: halfwidth must be positive");
    // Non-overlap condition: sup_{|t|<halfwidth} |t| * ||kappa||_inf < 1,
    // checked on a fine arc-length sample.
    double maxk = 0.0;
    if (curve.kind == CurveSpec::Kind::cos_bump) {
        double s0 = bump_arc_half_length(curve.bump_index);
        for (int i = 0; i <= 2000; ++i) {
            double s = -s0 + 2.0 * s0 * i / 2000;
            maxk = std::max(maxk, std::abs(waveguide_curvature(curve, s)));
        }
    }
    if (halfwidth * maxk >= 1.0)
        throw InvalidInput("waveguide: non-overlapping condition violated");
    auto dist = std::make_shared<const detail::GraphCurveDistance>(curve);
    return DomainSpec(std::make_shared<detail::DomainNode>(
                          detail::WaveguideDom{curve, halfwidth, std::move(dist)}),
                      2);
}

std::vector<double> whip_translations(const std::vector<double>& lengths) {
    std::vector<double> tau(lengths.size());
    double acc = 0.0;  // 2*(L_0 + ... + L_{n-1})
    for (size_t n = 0; n < lengths.size(); ++n) {
        tau[n] = acc + lengths[n];
        acc += 2.0 * lengths[n];
    }
    return tau;
}

DomainSpec DomainSpec::whip(int segments, std::vector<double> lengths) {
    if (segments < 1) throw InvalidInput("whip: need at least one segment");
    if (lengths.empty()) lengths.assign(segments, 4.0);
    if (static_cast<int>(lengths.size()) != segments)
        throw InvalidInput("whip: lengths count must match segment count");
    for (double L : lengths)
        if (!(L > kPi)) throw InvalidInput("whip: each segment length must exceed pi");
    detail::WhipDom dom;
    dom.segments = segments;
    dom.lengths = lengths;
    dom.tau = whip_translations(lengths);
    for (int n = 0; n < segments; ++n)
        dom.dist.push_back(std::make_shared<const detail::GraphCurveDistance>(
            CurveSpec::cos_bump(n)));
    return DomainSpec(std::make_shared<detail::DomainNode>(std::move(dom)), 2);
}

DomainSpec DomainSpec::unite(DomainSpec a, DomainSpec b) {
    if (a.dimension() != b.dimension()) throw InvalidInput("union: dimension mismatch");
    int dim = a.dimension();
    return DomainSpec(std::make_shared<detail::DomainNode>(detail::UnionDom{
                          std::make_shared<const DomainSpec>(std::move(a)),
                          std::make_shared<const DomainSpec>(std::move(b))}),
                      dim);
}

DomainSpec DomainSpec::intersect(DomainSpec a, DomainSpec b) {
    if (a.dimension() != b.dimension()) throw InvalidInput("intersection: dimension mismatch");
    int dim = a.dimension();
    return DomainSpec(std::make_shared<detail::DomainNode>(detail::IntersectionDom{
                          std::make_shared<const DomainSpec>(std::move(a)),
                          std::make_shared<const DomainSpec>(std::move(b))}),
                      dim);
}

DomainSpec DomainSpec::difference_ball(DomainSpec inner, double R) {
    if (!(R > 0)) throw InvalidInput("difference_ball: radius must be positive");
    int dim = inner.dimension();
    return DomainSpec(std::make_shared<detail::DomainNode>(detail::DifferenceBallDom{
                          std::make_shared<const DomainSpec>(std::move(inner)), R}),
                      dim);
}

DomainSpec DomainSpec::translate(DomainSpec inner, std::vector<double> shift) {
    if (static_cast<int>(shift.size()) != inner.dimension())
        throw InvalidInput("translate: shift dimension mismatch");
    int dim = inner.dimension();
    return DomainSpec(std::make_shared<detail::DomainNode>(detail::TranslateDom{
                          std::make_shared<const DomainSpec>(std::move(inner)),
                          std::move(shift)}),
                      dim);
}

namespace {

struct ContainsVisitor {
    double x, y;

    bool operator()(const detail::IntervalDom& d) const { return d.a < x && x < d.b; }
    bool operator()(const detail::BoxDom& d) const {
        if (!(d.lo[0] < x && x < d.hi[0])) return false;
        if (d.lo.size() == 2 && !(d.lo[1] < y && y < d.hi[1])) return false;
        return true;
    }
    bool operator()(const detail::BallDom& d) const {
        double dx = x - d.center[0];
        double dy = d.center.size() == 2 ? y - d.center[1] : 0.0;
        return dx * dx + dy * dy < d.radius * d.radius;
    }
    bool operator()(const detail::SlabWithBallDom& d) const {
        if (std::abs(y) < d.slab_halfwidth) return true;
        return x * x + y * y < d.ball_radius * d.ball_radius;
    }
    bool operator()(const detail::WaveguideDom& d) const {
        return d.dist->distance(x, y) < d.halfwidth;
    }
    bool operator()(const detail::WhipDom& d) const {
        if (x < 0.0) return std::abs(y) < 0.5;
        for (int n = 0; n < d.segments; ++n) {
            double xl = x - d.tau[n];
            if (std::abs(xl) > d.lengths[n]) continue;  // glued pieces are closed in x1
            if (d.dist[n]->distance(xl, y) < 0.5) return true;
        }
        return false;
    }
    bool operator()(const detail::UnionDom& d) const {
        return d.a->contains(x, y) || d.b->contains(x, y);
    }
    bool operator()(const detail::IntersectionDom& d) const {
        return d.a->contains(x, y) && d.b->contains(x, y);
    }
    bool operator()(const detail::DifferenceBallDom& d) const {
        return x * x + y * y > d.R * d.R && d.inner->contains(x, y);
    }
    bool operator()(const detail::TranslateDom& d) const {
        double sy = d.shift.size() == 2 ? d.shift[1] : 0.0;
        return d.inner->contains(x - d.shift[0], y - sy);
    }
};

} // namespace

bool DomainSpec::contains(const double* x) const {
    return std::visit(ContainsVisitor{x[0], dim_ == 2 ? x[1] : 0.0}, *node_);
}

bool DomainSpec::contains(double x) const { return std::visit(ContainsVisitor{x, 0.0}, *node_); }

bool DomainSpec::contains(double x, double y) const {
    return std::visit(ContainsVisitor{x, y}, *node_);
}

bool indicator(const DomainSpec& spec, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != spec.dimension())
        throw InvalidInput("indicator: point dimension mismatch");
    return spec.contains(x.data());
}

DomainSpec whip_piece(int n, double length, double trim) {
    if (!(length > kPi)) throw InvalidInput("whip_piece: length must exceed pi");
    double L = length - trim;
    if (!(L > 0)) throw InvalidInput("whip_piece: trim too large");
    double ytop = 0.5 + 2.0 / (n + 1) + 0.5;  // bump peak plus halfwidth, padded
    return DomainSpec::intersect(
        DomainSpec::waveguide(CurveSpec::cos_bump(n), 0.5),
        DomainSpec::box({-L, -ytop}, {L, ytop}));
}

} // namespace plap
