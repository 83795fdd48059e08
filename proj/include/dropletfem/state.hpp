#pragma once

#include <cstddef>
#include <vector>

#include "dropletfem/mesh.hpp"

namespace dropletfem {

/// Nodal solution at one time level: axial velocity u, interface radius h,
/// and the mixed slope s approximating dh/dz. Arrays are indexed like the
/// mesh nodes the state was solved on.
struct State {
    std::vector<double> u;  ///< m/s
    std::vector<double> h;  ///< m
    std::vector<double> s;  ///< dimensionless
    double length = 0.0;    ///< droplet length L, m
    double time = 0.0;      ///< s

    std::size_t n_nodes() const { return u.size(); }
};

/// Throws std::invalid_argument when array sizes disagree with the mesh or
/// the state length differs from the mesh length.
void validate(const State& state, const Mesh1D& mesh);

}  // namespace dropletfem
