#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "dropletfem/mesh.hpp"
#include "dropletfem/state.hpp"

namespace dropletfem {

/// Per-element flux-recovery error estimates eta_K = ||s - dh/dz||_{L2(K)}
/// with the root-sum-square global value.
struct ErrorField {
    std::vector<double> eta;  ///< one entry per element, >= 0
    double eta_global = 0.0;  ///< sqrt(sum eta_K^2)
    double time = 0.0;        ///< solution time the field was computed at, s
};

/// eta_K^2 = integral over K of (s(z) - dh/dz|_K)^2 dz, with s the continuous
/// P1 interpolant and dh/dz|_K the constant broken gradient; exact for the
/// quadratic integrand whenever quad_order >= 2. Element integrals are
/// independent; the parallel path reduces them in fixed element order.
ErrorField estimate(const State& state, const Mesh1D& mesh, int quad_order = 3,
                    bool parallel = true);

/// Bounds (eta/(1+c), eta/(1-c)) on the true gradient error. Throws
/// std::domain_error unless 0 < c < 1.
std::pair<double, double> error_bounds(double eta_global, double c);

/// eta_global / ||truth_slope - dh/dz||_{L2(Omega)} for a known true slope
/// (manufactured problems). Throws std::domain_error when the true error
/// vanishes.
double effectivity(const State& state, const Mesh1D& mesh,
                   const std::function<double(double)>& truth_slope, int quad_order = 5);

/// ||truth_slope - s||_{L2} / ||truth_slope - dh/dz||_{L2}: the empirical
/// value of the constant the error bounds assume to lie in (0, 1).
double empirical_c(const State& state, const Mesh1D& mesh,
                   const std::function<double(double)>& truth_slope, int quad_order = 5);

}  // namespace dropletfem
