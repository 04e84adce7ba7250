#include "plap/grid.hpp"

#include <cmath>
#include <queue>

namespace plap {

double Grid::node_radius(int k) const {
    auto xy = node_coords(k);
    return dim == 1 ? std::abs(xy[0]) : std::hypot(xy[0], xy[1]);
}

namespace {

// Conservative interior test: indicator at the node and at every half-step
// offset, so every P1 basis support stays inside the continuum set.
bool interior_1d(const DomainSpec& spec, double x, double h) {
    return spec.contains(x) && spec.contains(x - h / 2) && spec.contains(x + h / 2);
}

bool interior_2d(const DomainSpec& spec, double x, double y, double h) {
    if (!spec.contains(x, y)) return false;
    double o = h / 2;
    for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy) {
            if (dx == 0 && dy == 0) continue;
            if (!spec.contains(x + dx * o, y + dy * o)) return false;
        }
    return true;
}

} // namespace

GridPtr build_grid(const DomainSpec& spec, double h, const Window& window) {
    if (!(h > 0)) throw InvalidInput("build_grid: spacing must be positive");
    if (window.dim != spec.dimension())
        throw InvalidInput("build_grid: window dimension mismatch");

    auto g = std::make_shared<Grid>();
    g->h = h;
    g->dim = spec.dimension();

    // Lattice nodes h*Z^d falling inside the window (global indexing keeps
    // grids over the same h comparable across windows).
    std::array<long, 2> ilo{0, 0}, ihi{0, 0};
    for (int a = 0; a < g->dim; ++a) {
        ilo[a] = static_cast<long>(std::ceil(window.lo[a] / h - 1e-12));
        ihi[a] = static_cast<long>(std::floor(window.hi[a] / h + 1e-12));
        if (ihi[a] < ilo[a]) throw EmptyGrid("build_grid: window holds no lattice nodes");
    }
    g->base = ilo;
    g->dims[0] = static_cast<int>(ihi[0] - ilo[0] + 1);
    g->dims[1] = g->dim == 2 ? static_cast<int>(ihi[1] - ilo[1] + 1) : 1;

    g->index.assign(static_cast<size_t>(g->dims[0]) * g->dims[1], -1);
    for (int i = 0; i < g->dims[0]; ++i) {
        double x = (g->base[0] + i) * h;
        for (int j = 0; j < g->dims[1]; ++j) {
            double y = g->dim == 2 ? (g->base[1] + j) * h : 0.0;
            bool in = g->dim == 1 ? interior_1d(spec, x, h) : interior_2d(spec, x, y, h);
            if (in) {
                g->index[static_cast<size_t>(i) * g->dims[1] + j] =
                    static_cast<int32_t>(g->interior.size());
                g->interior.push_back({i, j});
            }
        }
    }
    if (g->interior.empty()) throw EmptyGrid("build_grid: no interior nodes");

    // Cells with at least one interior corner carry energy. Corner indices
    // may step outside the local array; at() treats those as masked.
    if (g->dim == 1) {
        for (int i = -1; i < g->dims[0]; ++i)
            if (g->at(i, 0) >= 0 || g->at(i + 1, 0) >= 0) g->cells.push_back({i, 0});
    } else {
        for (int i = -1; i < g->dims[0]; ++i)
            for (int j = -1; j < g->dims[1]; ++j)
                if (g->at(i, j) >= 0 || g->at(i + 1, j) >= 0 || g->at(i, j + 1) >= 0 ||
                    g->at(i + 1, j + 1) >= 0)
                    g->cells.push_back({i, j});
    }
    return g;
}

std::vector<int> boundary_distance(const Grid& g) {
    std::vector<int> dist(g.interior_count(), 0);
    std::queue<int> q;
    const int dx[4] = {1, -1, 0, 0};
    const int dy[4] = {0, 0, 1, -1};
    int nn = g.dim == 1 ? 2 : 4;
    for (int k = 0; k < g.interior_count(); ++k) {
        auto [i, j] = g.interior[k];
        for (int d = 0; d < nn; ++d)
            if (g.at(i + dx[d], j + dy[d]) < 0) {
                dist[k] = 1;
                q.push(k);
                break;
            }
    }
    while (!q.empty()) {
        int k = q.front();
        q.pop();
        auto [i, j] = g.interior[k];
        for (int d = 0; d < nn; ++d) {
            int32_t m = g.at(i + dx[d], j + dy[d]);
            if (m >= 0 && dist[m] == 0) {
                dist[m] = dist[k] + 1;
                q.push(m);
            }
        }
    }
    return dist;
}

Field transfer_field(const Field& src, const GridPtr& dst) {
    if (!src.grid || !dst) throw InvalidInput("transfer_field: missing grid");
    const Grid& s = *src.grid;
    const Grid& d = *dst;
    if (s.dim != d.dim) throw InvalidInput("transfer_field: dimension mismatch");
    auto value_at = [&](int i, int j) {
        int32_t k = s.at(i, j);
        return k >= 0 ? src.values[k] : 0.0;
    };
    Field out = Field::zero(dst);
    for (int k = 0; k < d.interior_count(); ++k) {
        auto xy = d.node_coords(k);
        double fi = xy[0] / s.h - s.base[0];
        int i0 = static_cast<int>(std::floor(fi));
        double fx = fi - i0;
        if (s.dim == 1) {
            out.values[k] = (1 - fx) * value_at(i0, 0) + fx * value_at(i0 + 1, 0);
        } else {
            double fj = xy[1] / s.h - s.base[1];
            int j0 = static_cast<int>(std::floor(fj));
            double fy = fj - j0;
            out.values[k] = (1 - fx) * (1 - fy) * value_at(i0, j0) +
                            fx * (1 - fy) * value_at(i0 + 1, j0) +
                            (1 - fx) * fy * value_at(i0, j0 + 1) +
                            fx * fy * value_at(i0 + 1, j0 + 1);
        }
    }
    return out;
}

} // namespace plap
