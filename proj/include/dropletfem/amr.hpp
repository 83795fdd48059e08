#pragma once

#include <cstddef>
#include <vector>

#include "dropletfem/estimator.hpp"
#include "dropletfem/mesh.hpp"
#include "dropletfem/state.hpp"

namespace dropletfem {

enum class MarkingStrategy { none, max_threshold, doerfler };

/// Whether the Doerfler cumulative target is taken on plain indicators or on
/// their squares (the convention of the original method).
enum class DoerflerAccounting { sum, sum_of_squares };

struct MarkSet {
    std::vector<std::size_t> marked;  ///< ascending element indices
    MarkingStrategy strategy = MarkingStrategy::none;
    double parameter = 0.0;
};

/// Maximum-threshold marking: every element with eta_K >= lambda * max eta_K.
/// Empty when the field is identically zero. Requires 0 <= lambda <= 1.
MarkSet mark_max(const ErrorField& err, double lambda);

/// Doerfler marking: sorts indicators descending (ties by lower index) and
/// marks the minimal prefix whose cumulative error reaches theta of the total
/// under the chosen accounting. Empty when the field is identically zero.
/// Requires 0 < theta <= 1.
MarkSet mark_doerfler(const ErrorField& err, double theta,
                      DoerflerAccounting accounting = DoerflerAccounting::sum_of_squares);

struct RefineParams {
    MarkingStrategy strategy = MarkingStrategy::doerfler;
    double parameter = 0.9;
    DoerflerAccounting accounting = DoerflerAccounting::sum_of_squares;
    int max_generation = 12;
    int quad_order = 3;
    /// Global element budget (0 = unlimited). Max-threshold marking degenerates
    /// toward global refinement once the indicator field flattens, so near
    /// pinch-off the mesh can otherwise grow without bound; when a cycle would
    /// exceed the budget only the highest-indicator marks within it are kept.
    std::size_t max_elements = 0;
};

struct RefineOutcome {
    State state;
    Mesh1D mesh;
    MarkSet marks;                ///< marked set after the generation cap and budget
    ErrorField error_before;
    std::size_t n_capped = 0;     ///< marked elements skipped at max_generation
    std::size_t n_trimmed = 0;    ///< marked elements dropped by the element budget
    std::vector<std::vector<double>> extra_fields;
};

/// One estimate -> mark -> bisect -> transfer cycle. Does not re-solve; that
/// is the caller's job. `extra_fields` (e.g. history states) are transferred
/// alongside u, h, s. Elements already at max_generation are dropped from the
/// mark set; throws RefinementExhausted when the cap or the element budget
/// empties a nonempty set.
RefineOutcome refine_cycle(const State& state, const Mesh1D& mesh, const RefineParams& params,
                           const std::vector<std::vector<double>>& extra_fields = {});

}  // namespace dropletfem
