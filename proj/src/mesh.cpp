#include "dropletfem/mesh.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "dropletfem/errors.hpp"

namespace dropletfem {

Mesh1D build_uniform(std::size_t n_elements, double initial_length) {
    if (n_elements < kMinElements)
        throw std::invalid_argument("build_uniform: need at least 4 elements");
    if (!(initial_length > 0.0))
        throw std::invalid_argument("build_uniform: initial_length must be > 0");
    Mesh1D mesh;
    mesh.ref_coords.resize(n_elements + 1);
    for (std::size_t i = 0; i <= n_elements; ++i)
        mesh.ref_coords[i] = static_cast<double>(i) / static_cast<double>(n_elements);
    mesh.ref_coords.back() = 1.0;
    mesh.length = initial_length;
    mesh.generation.assign(n_elements, 0);
    return mesh;
}

void validate(const Mesh1D& mesh) {
    if (mesh.n_nodes() < kMinElements + 1)
        throw std::invalid_argument("Mesh1D: fewer than 4 elements");
    if (!(mesh.length > 0.0)) throw std::invalid_argument("Mesh1D: length must be > 0");
    if (mesh.ref_coords.front() != 0.0 || mesh.ref_coords.back() != 1.0)
        throw std::invalid_argument("Mesh1D: reference coordinates must span [0, 1]");
    for (std::size_t e = 0; e < mesh.n_elements(); ++e)
        if (mesh.ref_coords[e + 1] - mesh.ref_coords[e] < kMinRefSpacing)
            throw std::invalid_argument("Mesh1D: spacing below minimum at element " +
                                        std::to_string(e));
    if (mesh.generation.size() != mesh.n_elements())
        throw std::invalid_argument("Mesh1D: generation size mismatch");
}

BisectResult bisect(const Mesh1D& mesh, const std::vector<std::size_t>& marked,
                    const std::vector<std::vector<double>>& fields) {
    for (const auto& f : fields)
        if (f.size() != mesh.n_nodes())
            throw std::invalid_argument("bisect: field size does not match node count");

    std::vector<std::size_t> sorted = marked;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (!sorted.empty() && sorted.back() >= mesh.n_elements())
        throw std::invalid_argument("bisect: marked element index out of range");

    for (std::size_t e : sorted)
        if ((mesh.ref_coords[e + 1] - mesh.ref_coords[e]) * 0.5 < kMinRefSpacing)
            throw RefinementExhausted("bisect: child of element " + std::to_string(e) +
                                      " would violate the minimum spacing");

    BisectResult out;
    out.mesh.length = mesh.length;
    out.mesh.ref_coords.reserve(mesh.n_nodes() + sorted.size());
    out.mesh.generation.reserve(mesh.n_elements() + sorted.size());
    out.fields.resize(fields.size());
    for (auto& f : out.fields) f.reserve(mesh.n_nodes() + sorted.size());

    auto push_node = [&](std::size_t parent_node) {
        out.mesh.ref_coords.push_back(mesh.ref_coords[parent_node]);
        for (std::size_t k = 0; k < fields.size(); ++k)
            out.fields[k].push_back(fields[k][parent_node]);
    };

    std::size_t next_marked = 0;
    for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
        push_node(e);
        const bool split = next_marked < sorted.size() && sorted[next_marked] == e;
        if (split) {
            ++next_marked;
            out.mesh.ref_coords.push_back(0.5 * (mesh.ref_coords[e] + mesh.ref_coords[e + 1]));
            for (std::size_t k = 0; k < fields.size(); ++k)
                out.fields[k].push_back(0.5 * (fields[k][e] + fields[k][e + 1]));
            out.mesh.generation.push_back(mesh.generation[e] + 1);
            out.mesh.generation.push_back(mesh.generation[e] + 1);
        } else {
            out.mesh.generation.push_back(mesh.generation[e]);
        }
    }
    push_node(mesh.n_nodes() - 1);
    return out;
}

Mesh1D grow_domain(const Mesh1D& mesh, double new_length) {
    if (!(new_length > 0.0))
        throw std::invalid_argument("grow_domain: new_length must be > 0");
    Mesh1D out = mesh;
    out.length = new_length;
    return out;
}

std::vector<double> mesh_velocity(const Mesh1D& mesh, double dldt) {
    std::vector<double> w(mesh.n_nodes());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = mesh.ref_coords[i] * dldt;
    return w;
}

}  // namespace dropletfem
