#include "dropletfem/properties.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dropletfem {

void validate(const FluidPair& fp) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("FluidPair: ") + what);
    };
    require(fp.gamma > 0.0, "gamma must be > 0");
    require(fp.rho_d > 0.0, "rho_d must be > 0");
    require(fp.rho_c >= 0.0, "rho_c must be >= 0");
    require(fp.mu_d > 0.0, "mu_d must be > 0");
    require(fp.mu_c >= 0.0, "mu_c must be >= 0");
    require(fp.h_in > 0.0, "h_in must be > 0");
    require(fp.r_tube > fp.h_in, "r_tube must exceed h_in");
    require(fp.c_shear > 1.0, "c_shear must be > 1");
    require(std::isfinite(fp.g), "g must be finite");
    // nu_d is redundant with mu_d/rho_d; keep them consistent.
    const double nu_ref = fp.mu_d / fp.rho_d;
    require(std::abs(fp.nu_d - nu_ref) <= 1e-12 * nu_ref,
            "nu_d must equal mu_d/rho_d to 1e-12 relative");
}

double buoyancy_factor(const FluidPair& fp) {
    return 1.0 - fp.rho_c / fp.rho_d;
}

std::pair<double, double> viscosity_ratio_terms(const FluidPair& fp) {
    const double ratio = fp.mu_c / fp.mu_d;
    return {1.0 + ratio, 1.0 + (2.0 / 3.0) * ratio};
}

double shear_pressure_coefficient(const FluidPair& fp) {
    if (fp.c_shear <= 1.0)
        throw std::domain_error("shear_pressure_coefficient: c_shear must be > 1");
    return 1.0 / (2.0 * fp.rho_d * std::log(fp.c_shear));
}

double annular_dpdz(double mu_c, double u_c, double h_in, double r_tube) {
    if (h_in <= 0.0 || r_tube <= h_in)
        throw std::invalid_argument("annular_dpdz: need 0 < h_in < r_tube");
    const double a2 = h_in * h_in;
    const double b2 = r_tube * r_tube;
    const double gap = b2 - a2;
    // Mean velocity of annular Poiseuille flow:
    //   u = -dpdz/(8 mu) * [b^2 + a^2 - gap/ln(b/a)]
    const double shape = b2 + a2 - gap / std::log(r_tube / h_in);
    return -8.0 * mu_c * u_c / shape;
}

}  // namespace dropletfem
