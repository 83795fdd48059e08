#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "dropletfem/banded.hpp"
#include "dropletfem/mesh.hpp"
#include "dropletfem/properties.hpp"
#include "dropletfem/state.hpp"

namespace dropletfem {

enum class TimeScheme { steady, backward_euler, bdf2 };

enum class TipModel { pinned, free_tip };

/// Volumetric forcing added to the momentum and interface residuals, used by
/// the manufactured-solution harness. Each callable maps z to the forcing.
struct Forcing {
    std::function<double(double)> momentum;
    std::function<double(double)> interface;
};

struct AssemblyOptions {
    int quad_order = 3;
    TipModel tip_model = TipModel::pinned;
    double eps_tip = 0.0;  ///< tip radius target for the pinned model, m
    bool include_bulk_pressure_term = false;  ///< adds (2/rho_d) dp^c/dz to the momentum
    const Forcing* forcing = nullptr;
    bool parallel = true;  ///< OpenMP element kernel; false = serial reference
    double inlet_u = std::numeric_limits<double>::quiet_NaN();  ///< overrides fp.u_in when finite
    double inlet_h = std::numeric_limits<double>::quiet_NaN();  ///< overrides fp.h_in when finite
    /// Imposed value of the natural boundary term at the tip,
    /// 3 nu (1 + 2/3 mu^c/mu^d) du/dz + (gamma/rho)(ds/dz)/(1+s^2)^{3/2}.
    /// The default 0 is the do-nothing condition (zero viscous+capillary
    /// flux); the manufactured-solution harness supplies the exact value.
    double tip_flux = 0.0;
};

/// Discrete-time information for the assembly. For transient schemes the old
/// state(s) must live on the same reference mesh as the current one.
struct TimeContext {
    TimeScheme scheme = TimeScheme::steady;
    double dt = 0.0;
    double dt_old = 0.0;              ///< previous step size (bdf2 only)
    const State* old_state = nullptr;
    const State* older_state = nullptr;  ///< two levels back (bdf2 only)
    double dldt = 0.0;                ///< domain growth rate driving the ALE correction
};

/// Weights of the discrete time derivative under the active scheme:
/// df/dt ~ c0 f + c_old f_old + c_older f_older. Steady gives all zeros.
struct TimeDerivativeWeights {
    double c0 = 0.0;
    double c_old = 0.0;
    double c_older = 0.0;
};

TimeDerivativeWeights time_derivative_weights(const TimeContext& time);

/// Residual and Jacobian of the mixed weak form. Rows/columns interleave
/// (u, h, s) per node; P1 elements give block-tridiagonal coupling, stored
/// banded with bandwidths 5/5.
struct DiscreteSystem {
    std::vector<double> residual;
    BandedMatrix jacobian;
};

/// Assembles the Galerkin residual and analytic Jacobian on the current mesh:
/// momentum (with the curvature split into its bulk and integrated-by-parts
/// flux parts, viscous flux, shear and gravity forcing, and the imposed tip
/// boundary flux), interface advection, and the slope L2 projection. Time
/// derivatives are discretized per `time` with the ALE correction -w df/dz,
/// w = zeta*dldt. Essential rows are untouched here; see
/// apply_boundary_conditions. Throws SingularCurvature when h <= 0 at any
/// quadrature point.
DiscreteSystem assemble(const State& state, const Mesh1D& mesh, const FluidPair& fp,
                        const TimeContext& time, const AssemblyOptions& opts);

/// Replaces the inlet u and h rows by Dirichlet residuals (u0 - u_in,
/// h0 - h_in) and, for TipModel::pinned, the tip h row by h_tip - eps_tip.
void apply_boundary_conditions(DiscreteSystem& sys, const State& state,
                               const Mesh1D& mesh, const FluidPair& fp,
                               const AssemblyOptions& opts);

/// L2 projection of the broken gradient dh/dz onto the continuous P1 space;
/// the slope field a fresh state is initialized with.
std::vector<double> project_slope(const std::vector<double>& h, const Mesh1D& mesh);

/// pi * integral of h^2 dz over [z_from, L]; exact for P1 h.
double droplet_volume(const State& state, const Mesh1D& mesh, double z_from = 0.0);

}  // namespace dropletfem
