#pragma once

#include <utility>

namespace dropletfem {

/// Material and flow parameters of the dispersed (inner) and continuous
/// (outer) phases. All values are SI. Immutable after construction and safe
/// to share read-only across threads.
struct FluidPair {
    double gamma;    ///< surface tension coefficient, N/m
    double rho_d;    ///< dispersed-phase density, kg/m^3
    double rho_c;    ///< continuous-phase density, kg/m^3
    double mu_d;     ///< dispersed-phase dynamic viscosity, Pa s
    double mu_c;     ///< continuous-phase dynamic viscosity, Pa s
    double nu_d;     ///< dispersed-phase kinematic viscosity, m^2/s; must equal mu_d/rho_d
    double u_in;     ///< dispersed inlet velocity at the nozzle, m/s
    double u_c;      ///< continuous co-flow velocity, m/s
    double h_in;     ///< nozzle inlet radius, m
    double r_tube;   ///< outer capillary tube radius, m
    double c_shear;  ///< shear-layer parameter C > 1; (C-1)h is the layer thickness
    double dpdz_c;   ///< continuous-phase axial pressure gradient, Pa/m
    double g;        ///< gravitational acceleration, m/s^2
};

/// Throws std::invalid_argument naming the violated invariant.
void validate(const FluidPair& fp);

/// Buoyancy prefactor 1 - rho_c/rho_d of the gravity term.
double buoyancy_factor(const FluidPair& fp);

/// Viscosity-ratio factors (1 + mu_c/mu_d, 1 + (2/3) mu_c/mu_d) multiplying
/// the first- and second-derivative viscous terms.
std::pair<double, double> viscosity_ratio_terms(const FluidPair& fp);

/// 1 / (2 rho_d ln C). Multiplied by dp^c/dz it yields the shear forcing
/// term per unit mass. Throws std::domain_error for c_shear <= 1.
double shear_pressure_coefficient(const FluidPair& fp);

/// Pressure gradient of fully developed laminar flow in the annulus between
/// the nozzle wall (inner radius h_in) and the capillary tube (r_tube),
/// carrying mean velocity u_c. Negative for u_c > 0. This is only an
/// estimate for configurations that do not measure dp^c/dz directly.
double annular_dpdz(double mu_c, double u_c, double h_in, double r_tube);

}  // namespace dropletfem
