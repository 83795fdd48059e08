#pragma once

#include <cstddef>
#include <vector>

namespace dropletfem {

/// One manufactured-solution level: steady solve on a fixed uniform mesh of
/// the unit domain against smooth reference profiles, with the volumetric
/// forcing derived from the strong form.
struct MmsLevel {
    std::size_t n_elements = 0;
    double err_h = 0.0;  ///< L2 error of the radius
    double err_u = 0.0;  ///< L2 error of the velocity
    double rate_h = 0.0; ///< log2 ratio against the previous level (0 at the first)
    double rate_u = 0.0;
    double eta_global = 0.0;
    double effectivity = 0.0;  ///< eta / true slope error
    double empirical_c = 0.0;  ///< ||truth - s|| / ||truth - h_z||
    int newton_iterations = 0;
};

struct MmsStudy {
    std::vector<MmsLevel> levels;
};

MmsLevel mms_run_level(std::size_t n_elements);

/// n_levels meshes doubling from n0 elements.
MmsStudy mms_convergence_study(int n_levels, std::size_t n0 = 16);

}  // namespace dropletfem
