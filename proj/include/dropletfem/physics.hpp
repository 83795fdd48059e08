#pragma once

#include <optional>
#include <vector>

#include "dropletfem/mesh.hpp"
#include "dropletfem/state.hpp"

namespace dropletfem {

/// Pointwise interface sample used by the constitutive evaluations. `s` is
/// the mixed slope standing in for dh/dz, `dsdz` its gradient.
struct InterfacePoint {
    double h;     ///< radius, m
    double s;     ///< slope, dimensionless
    double dsdz;  ///< slope gradient, 1/m
};

/// Mean curvature 1/(h sqrt(1+s^2)) - dsdz/(1+s^2)^{3/2} with the mixed
/// substitution s for dh/dz. Throws SingularCurvature for h <= 0.
double curvature(const InterfacePoint& p);

/// The two groupings the curvature gradient splits into in the weak form:
/// `bulk` stays under the plain test function, `flux` is the
/// integrated-by-parts part that also appears in the boundary term.
struct CurvatureGradientTerms {
    double bulk;  ///< -s dsdz/(h (1+s^2)^{3/2}) - s/(h^2 (1+s^2)^{1/2}), 1/m^2
    double flux;  ///< dsdz/(1+s^2)^{3/2}, 1/m
};

/// Throws SingularCurvature for h <= 0.
CurvatureGradientTerms curvature_gradient_terms(const InterfacePoint& p);

struct PinchPoint {
    double z;          ///< axial pinch location, m
    double h_min;      ///< neck radius there, m
    std::size_t node;  ///< nodal index of the minimum
};

/// Minimum nodal radius over the interior window zeta in
/// [exclusion_fraction, 1-exclusion_fraction]; the inlet and the (pinned) tip
/// are excluded because h is small there by construction.
/// Throws std::invalid_argument unless 0 <= exclusion_fraction < 0.5.
PinchPoint neck_minimum(const State& state, const Mesh1D& mesh, double exclusion_fraction);

/// neck_minimum, reported only when it is positive, falls below h_threshold,
/// and bottoms out in a locally resolved basin (both nodal neighbors within a
/// small factor of the minimum). Oscillatory spikes from an under-resolved
/// interface are not pinches.
std::optional<PinchPoint> detect_pinch(const State& state, const Mesh1D& mesh,
                                       double exclusion_fraction, double h_threshold);

/// Curvature sampled at nodes for output: dsdz at a node averages the
/// adjacent element slopes of s (one-sided at the ends).
std::vector<double> nodal_curvature(const State& state, const Mesh1D& mesh);

}  // namespace dropletfem
