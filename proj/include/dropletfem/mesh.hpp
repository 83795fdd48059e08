#pragma once

#include <cstddef>
#include <vector>

namespace dropletfem {

/// Moving 1D mesh on the droplet domain [0, L(t)]. Nodes live at fixed
/// reference coordinates zeta in [0, 1]; physical positions are z = zeta * L
/// (scaled map), so the whole mesh stretches affinely as the droplet grows.
/// Treated as an immutable snapshot: refinement and growth return new meshes.
struct Mesh1D {
    std::vector<double> ref_coords;  ///< strictly increasing, ref_coords.front()=0, back()=1
    double length = 0.0;             ///< current droplet length L, m
    std::vector<int> generation;     ///< per-element bisection depth

    std::size_t n_nodes() const { return ref_coords.size(); }
    std::size_t n_elements() const { return ref_coords.size() - 1; }
    double node_z(std::size_t i) const { return ref_coords[i] * length; }
    double element_length(std::size_t e) const {
        return (ref_coords[e + 1] - ref_coords[e]) * length;
    }
};

/// Minimum admissible reference spacing between adjacent nodes.
inline constexpr double kMinRefSpacing = 1e-12;
/// Minimum admissible element count.
inline constexpr std::size_t kMinElements = 4;

/// Uniform mesh: zeta_i = i/n. Throws std::invalid_argument for
/// n_elements < 4 or initial_length <= 0.
Mesh1D build_uniform(std::size_t n_elements, double initial_length);

/// Throws std::invalid_argument when any invariant fails.
void validate(const Mesh1D& mesh);

struct BisectResult {
    Mesh1D mesh;
    std::vector<std::vector<double>> fields;  ///< transferred nodal fields
};

/// Splits each marked element at its reference midpoint. New nodal values of
/// every field are linear interpolants of the parent endpoints; unmarked
/// elements and their nodal values are untouched. Throws std::invalid_argument
/// for out-of-range indices or field size mismatches, RefinementExhausted if a
/// child element would violate the minimum spacing.
BisectResult bisect(const Mesh1D& mesh, const std::vector<std::size_t>& marked,
                    const std::vector<std::vector<double>>& fields);

/// Returns the mesh stretched to new_length; reference coordinates are
/// unchanged. Throws std::invalid_argument for new_length <= 0.
Mesh1D grow_domain(const Mesh1D& mesh, double new_length);

/// Nodal velocities w_i = zeta_i * dLdt induced by the scaled map.
std::vector<double> mesh_velocity(const Mesh1D& mesh, double dldt);

}  // namespace dropletfem
