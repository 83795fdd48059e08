#include "dropletfem/solver.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "dropletfem/errors.hpp"

namespace dropletfem {

namespace {

double l2_norm(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

struct Iterate {
    State state;
    Mesh1D mesh;
    TimeContext time;
};

// Re-imposes the discrete tip kinematic condition dL/dt = u(tip): solves the
// time-derivative stencil for the new length so the ALE velocity matches the
// current tip speed. Returns false when the implied length is nonpositive.
bool sync_length(Iterate& it, const NewtonOptions& nopts) {
    if (!nopts.move_mesh || it.time.scheme == TimeScheme::steady) return true;
    const TimeDerivativeWeights w = time_derivative_weights(it.time);
    const double u_tip = it.state.u.back();
    const double l_old = it.time.old_state->length;
    const double l_older = it.time.older_state ? it.time.older_state->length : 0.0;
    const double length = (u_tip - w.c_old * l_old - w.c_older * l_older) / w.c0;
    if (!(length > 0.0) || !std::isfinite(length)) return false;
    it.state.length = length;
    it.mesh.length = length;
    it.time.dldt = u_tip;
    return true;
}

std::optional<DiscreteSystem> try_assemble(const Iterate& it, const FluidPair& fp,
                                           const AssemblyOptions& aopts) {
    try {
        DiscreteSystem sys = assemble(it.state, it.mesh, fp, it.time, aopts);
        apply_boundary_conditions(sys, it.state, it.mesh, fp, aopts);
        return sys;
    } catch (const SingularCurvature&) {
        return std::nullopt;  // unusable trial; the line search backs off
    }
}

}  // namespace

NewtonResult newton_solve(const State& guess, const Mesh1D& mesh, const FluidPair& fp,
                          const TimeContext& time, const AssemblyOptions& aopts,
                          const NewtonOptions& nopts) {
    Iterate cur{guess, mesh, time};
    if (!sync_length(cur, nopts))
        throw NonConvergence("newton_solve: tip kinematics give a nonpositive length");

    std::optional<DiscreteSystem> sys = try_assemble(cur, fp, aopts);
    if (!sys) throw SingularCurvature("newton_solve: initial guess has h <= 0");

    NewtonReport rep;
    double rnorm = l2_norm(sys->residual);
    rep.residual_norms.push_back(rnorm);
    const double r0 = rnorm;
    const auto converged = [&](double r) { return r <= nopts.tol * r0 || r <= nopts.abs_tol; };

    for (int iter = 0; iter < nopts.max_iters; ++iter) {
        if (converged(rnorm)) {
            rep.converged = true;
            rep.iterations = iter;
            return {std::move(cur.state), std::move(cur.mesh), std::move(rep)};
        }

        std::vector<double> rhs = sys->residual;
        for (double& r : rhs) r = -r;
        const std::vector<double> delta = sys->jacobian.solve(rhs);

        bool accepted = false;
        double alpha = 1.0;
        for (int k = 0; k <= nopts.max_halvings; ++k, alpha *= 0.5) {
            Iterate trial = cur;
            for (std::size_t i = 0; i < trial.state.u.size(); ++i) {
                trial.state.u[i] += alpha * delta[3 * i + 0];
                trial.state.h[i] += alpha * delta[3 * i + 1];
                trial.state.s[i] += alpha * delta[3 * i + 2];
            }
            if (!sync_length(trial, nopts)) continue;
            std::optional<DiscreteSystem> trial_sys = try_assemble(trial, fp, aopts);
            if (!trial_sys) continue;
            const double tnorm = l2_norm(trial_sys->residual);
            if (!(tnorm < rnorm) && !converged(tnorm)) continue;
            cur = std::move(trial);
            sys = std::move(trial_sys);
            rnorm = tnorm;
            rep.residual_norms.push_back(rnorm);
            accepted = true;
            break;
        }
        if (!accepted)
            throw NonConvergence("newton_solve: line search stalled at residual " +
                                 std::to_string(rnorm));
    }

    if (converged(rnorm)) {
        rep.converged = true;
        rep.iterations = nopts.max_iters;
        return {std::move(cur.state), std::move(cur.mesh), std::move(rep)};
    }
    throw NonConvergence("newton_solve: no convergence in " + std::to_string(nopts.max_iters) +
                         " iterations, residual " + std::to_string(rnorm));
}

}  // namespace dropletfem
