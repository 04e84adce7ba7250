#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "plap/geometry.hpp"

namespace plap {

// Masked Cartesian grid over a truncation of the domain. Nodes live on the
// global lattice h*Z^d; a node is interior only when the indicator holds at
// the node and at all half-step points of its cell neighborhood, so the
// discrete space embeds into W^{1,p}_0 of the continuum set.
struct Grid {
    double h = 0.0;
    int dim = 1;
    std::array<long, 2> base{0, 0};  // lattice index of local node (0,0)
    std::array<int, 2> dims{0, 1};   // node counts per axis (dims[1]==1 in 1D)
    std::vector<int32_t> index;      // local (i,j) -> interior index, -1 masked
    std::vector<std::array<int, 2>> interior;  // interior index -> local (i,j)
    std::vector<std::array<int, 2>> cells;     // cells with >=1 interior corner

    int interior_count() const { return static_cast<int>(interior.size()); }
    double measure() const { return dim == 1 ? h : h * h; }  // lumped node mass

    int32_t at(int i, int j) const {
        if (i < 0 || j < 0 || i >= dims[0] || j >= dims[1]) return -1;
        return index[static_cast<size_t>(i) * dims[1] + j];
    }
    double coord(int axis, int local) const { return (base[axis] + local) * h; }
    std::array<double, 2> node_coords(int k) const {
        const auto& ij = interior[k];
        return {coord(0, ij[0]), dim == 2 ? coord(1, ij[1]) : 0.0};
    }
    double node_radius(int k) const;  // |x| of interior node k

    // Global lattice index of interior node k (for cross-grid comparisons).
    std::array<long, 2> global_index(int k) const {
        const auto& ij = interior[k];
        return {base[0] + ij[0], dim == 2 ? base[1] + ij[1] : 0};
    }
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr build_grid(const DomainSpec& spec, double h, const Window& window);

// Nodal values of a discrete W^{1,p}_0 function; implicitly zero on masked
// nodes.
struct Field {
    GridPtr grid;
    Eigen::VectorXd values;

    Field() = default;
    Field(GridPtr g, Eigen::VectorXd v) : grid(std::move(g)), values(std::move(v)) {}
    static Field zero(GridPtr g) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(g->interior_count());
        return Field(std::move(g), std::move(v));
    }
};

// Grid distance (in steps) to the nearest masked/exterior node, >= 1 for
// every interior node. Used for bump initializers.
std::vector<int> boundary_distance(const Grid& g);

// Sample a field onto another grid by multilinear interpolation; points
// outside the source lattice (or next to masked nodes) pick up zeros.
Field transfer_field(const Field& src, const GridPtr& dst);

} // namespace plap
