#pragma once

#include <vector>

#include "dropletfem/assembly.hpp"
#include "dropletfem/mesh.hpp"
#include "dropletfem/properties.hpp"
#include "dropletfem/state.hpp"

namespace dropletfem {

struct NewtonOptions {
    double tol = 1e-8;      ///< relative residual reduction
    double abs_tol = 0.0;   ///< absolute residual floor (0 = disabled)
    int max_iters = 25;
    int max_halvings = 8;   ///< damping halvings before the step counts as failed
    bool move_mesh = true;  ///< re-impose dL/dt = u(tip) each iteration (transient only)
};

struct NewtonReport {
    std::vector<double> residual_norms;  ///< one entry per assembled iterate
    int iterations = 0;
    bool converged = false;
};

struct NewtonResult {
    State state;
    Mesh1D mesh;  ///< mesh with the final self-consistent length
    NewtonReport report;
};

/// Damped Newton on the assembled system. With move_mesh the droplet length
/// is recomputed from the tip kinematic condition before every assembly, so
/// L and u(tip) agree at convergence. Throws NonConvergence when the
/// iteration budget or the line search is exhausted, SingularMatrix from the
/// linear solver.
NewtonResult newton_solve(const State& guess, const Mesh1D& mesh, const FluidPair& fp,
                          const TimeContext& time, const AssemblyOptions& aopts,
                          const NewtonOptions& nopts);

}  // namespace dropletfem
