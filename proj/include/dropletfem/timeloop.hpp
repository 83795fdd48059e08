#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dropletfem/amr.hpp"
#include "dropletfem/assembly.hpp"
#include "dropletfem/estimator.hpp"
#include "dropletfem/mesh.hpp"
#include "dropletfem/physics.hpp"
#include "dropletfem/properties.hpp"
#include "dropletfem/state.hpp"

namespace dropletfem {

struct RunConfig {
    // time stepping
    double dt_init = 1e-4;
    double dt_min = 1e-9;
    double dt_max = 2e-3;
    double t_max = 5.0;
    TimeScheme scheme = TimeScheme::backward_euler;
    double newton_tol = 1e-8;
    int newton_max_iters = 25;

    // discretization
    std::size_t n_elements_init = 100;
    double initial_length = 0.0;  ///< m; 0 = one inlet radius
    int quad_order = 3;
    TipModel tip_model = TipModel::pinned;
    /// Pinned tip radius as a fraction of h_in. The regularized cap occupies a
    /// reference-coordinate layer of width ~eps_tip_frac^2/2, so values much
    /// below 0.05 bury the tip inside a single element until many bisection
    /// levels deep; under-resolving that layer excites a mesh-scale mode that
    /// corrupts the inlet volume balance.
    double eps_tip_frac = 0.05;
    bool include_bulk_pressure_term = false;
    bool parallel = true;

    // adaptivity
    MarkingStrategy strategy = MarkingStrategy::doerfler;
    double lambda = std::numeric_limits<double>::quiet_NaN();  ///< NaN = per-strategy default
    DoerflerAccounting accounting = DoerflerAccounting::sum_of_squares;
    int refine_trigger_n = 2;        ///< refine when floor(L/h_in) first reaches each integer >= this
    double safety_min_h_frac = 0.2;  ///< extra trigger when min h drops below this fraction of
                                     ///< h_in; re-arms at 80% of the minimum that fired (0 = off)
    int max_generation = 12;
    std::size_t max_elements = 16384;  ///< global element budget for refinement (0 = unlimited)

    // termination and output
    double pinch_threshold_frac = 0.01;  ///< pinch when the neck drops below this fraction of h_in
    double tip_exclusion_frac = 0.05;    ///< neck search ignores this fraction of zeta at both ends
    int output_every = 0;                ///< snapshot every k accepted steps (0 = off)
    double snapshot_dt = 0.0;            ///< clip steps to land on multiples of this and snapshot there (0 = off)
};

/// The marking parameter actually used: cfg.lambda when set, otherwise 0.1
/// for max-threshold and 0.9 for Doerfler.
double marking_parameter(const RunConfig& cfg);

/// Throws std::invalid_argument naming the offending entry.
void validate(const RunConfig& cfg);

enum class Termination { t_max_reached, pinch, hard_failure };

struct StepRecord {
    int step = 0;
    double t = 0.0;   ///< time after the step, s
    double dt = 0.0;
    int newton_iterations = 0;
    double length = 0.0;
    double neck_h = 0.0;          ///< window-minimum radius, m
    double dvol = 0.0;            ///< signed volume change over the step, m^3
    double volume_defect = 0.0;   ///< |dV - pi h_in^2 u_in dt| / (pi h_in^2 u_in dt)
};

struct DtChange {
    int step = 0;  ///< index of the next step the new dt applies to
    double dt = 0.0;
    std::string cause;  ///< "newton_failure", "positivity", or "growth"
};

struct RefinementRecord {
    int step = 0;        ///< step whose solve triggered the cycle (re-solved afterwards)
    double t = 0.0;      ///< time level being re-solved
    std::string trigger; ///< "length_crossing" or "min_h_safety"
    std::size_t n_marked = 0;
    std::size_t n_elements_before = 0;
    std::size_t n_elements_after = 0;
    double eta_before = 0.0;
    double eta_after = 0.0;  ///< measured on the re-solved step
};

struct Snapshot {
    int step = 0;
    State state;
    Mesh1D mesh;
    ErrorField error;
};

/// Optional observers. Both are invoked synchronously in deterministic order.
struct RunSinks {
    std::function<void(const Snapshot&)> on_snapshot;
    std::function<void(const std::string&)> on_log;
};

struct RunReport {
    Termination termination = Termination::t_max_reached;
    int n_steps = 0;
    double end_time = 0.0;
    std::optional<PinchPoint> pinch;
    double pinch_time = std::numeric_limits<double>::quiet_NaN();
    double droplet_volume = std::numeric_limits<double>::quiet_NaN();  ///< below the pinch, m^3
    int n_refinements = 0;        ///< cycles that bisected and were re-solved
    std::size_t total_marked = 0;
    double eta_global_final = 0.0;
    double max_volume_defect = 0.0;      ///< worst per-step defect
    double injected_volume_defect = 0.0; ///< |V_end - V_0 - pi h_in^2 u_in t_end| / injected
    std::vector<StepRecord> steps;
    std::vector<DtChange> dt_changes;
    std::vector<RefinementRecord> refinements;
    State final_state;
    Mesh1D final_mesh;
    ErrorField final_error;
};

Mesh1D initial_mesh(const RunConfig& cfg, const FluidPair& fp);

/// Pendant hemisphere: h = h_in sqrt(1 - zeta^2) floored at the tip pinning
/// radius, u = u_in everywhere, s the L2-projected slope of h.
State initial_state(const RunConfig& cfg, const FluidPair& fp, const Mesh1D& mesh);

/// Explicit tip kinematic update L + dt u(tip).
/// Throws std::domain_error when the result is nonpositive.
double advance_length(const State& state, double dt);

RunReport run(const FluidPair& fp, const RunConfig& cfg, const RunSinks& sinks = {});

}  // namespace dropletfem
