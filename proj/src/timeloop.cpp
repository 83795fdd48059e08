#include "dropletfem/timeloop.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <stdexcept>
#include <utility>

#include "dropletfem/errors.hpp"
#include "dropletfem/solver.hpp"

namespace dropletfem {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string strprintf(const char* fmt, ...) {
    char buf[256];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    return buf;
}

}  // namespace

double marking_parameter(const RunConfig& cfg) {
    if (std::isfinite(cfg.lambda)) return cfg.lambda;
    switch (cfg.strategy) {
        case MarkingStrategy::max_threshold: return 0.1;
        case MarkingStrategy::doerfler: return 0.9;
        case MarkingStrategy::none: return 0.0;
    }
    return 0.0;
}

void validate(const RunConfig& cfg) {
    const auto fail = [](const std::string& what) {
        throw std::invalid_argument("RunConfig: " + what);
    };
    if (!(cfg.dt_min > 0.0)) fail("dt_min must be positive");
    if (!(cfg.dt_init >= cfg.dt_min)) fail("dt_init must be >= dt_min");
    if (!(cfg.dt_max >= cfg.dt_init)) fail("dt_max must be >= dt_init");
    if (!(cfg.t_max >= 0.0)) fail("t_max must be nonnegative");
    if (!(cfg.newton_tol > 0.0 && cfg.newton_tol < 1.0)) fail("newton_tol must be in (0, 1)");
    if (cfg.newton_max_iters < 1) fail("newton_max_iters must be >= 1");
    if (cfg.n_elements_init < kMinElements) fail("n_elements_init must be >= 4");
    if (!(cfg.initial_length >= 0.0)) fail("initial_length must be nonnegative");
    if (cfg.quad_order < 1 || cfg.quad_order > 5) fail("quad_order must be in [1, 5]");
    if (!(cfg.eps_tip_frac > 0.0 && cfg.eps_tip_frac < 0.5)) fail("eps_tip_frac must be in (0, 0.5)");
    if (std::isfinite(cfg.lambda)) {
        if (cfg.strategy == MarkingStrategy::max_threshold && !(cfg.lambda >= 0.0 && cfg.lambda <= 1.0))
            fail("lambda must be in [0, 1] for max-threshold marking");
        if (cfg.strategy == MarkingStrategy::doerfler && !(cfg.lambda > 0.0 && cfg.lambda <= 1.0))
            fail("lambda must be in (0, 1] for Doerfler marking");
    }
    if (cfg.refine_trigger_n < 1) fail("refine_trigger_n must be >= 1");
    if (!(cfg.safety_min_h_frac >= 0.0 && cfg.safety_min_h_frac < 1.0))
        fail("safety_min_h_frac must be in [0, 1)");
    if (cfg.max_generation < 0) fail("max_generation must be nonnegative");
    if (cfg.max_elements > 0 && cfg.max_elements < static_cast<std::size_t>(cfg.n_elements_init))
        fail("max_elements must be 0 (unlimited) or >= n_elements_init");
    if (!(cfg.pinch_threshold_frac > 0.0 && cfg.pinch_threshold_frac < 1.0))
        fail("pinch_threshold_frac must be in (0, 1)");
    if (!(cfg.tip_exclusion_frac >= 0.0 && cfg.tip_exclusion_frac < 0.5))
        fail("tip_exclusion_frac must be in [0, 0.5)");
    if (cfg.output_every < 0) fail("output_every must be nonnegative");
    if (!(cfg.snapshot_dt >= 0.0)) fail("snapshot_dt must be nonnegative");
}

Mesh1D initial_mesh(const RunConfig& cfg, const FluidPair& fp) {
    const double l0 = cfg.initial_length > 0.0 ? cfg.initial_length : fp.h_in;
    return build_uniform(cfg.n_elements_init, l0);
}

State initial_state(const RunConfig& cfg, const FluidPair& fp, const Mesh1D& mesh) {
    State st;
    const std::size_t n = mesh.n_nodes();
    const double eps_tip = cfg.eps_tip_frac * fp.h_in;
    st.u.assign(n, fp.u_in);
    st.h.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double zeta = mesh.ref_coords[i];
        const double cap = fp.h_in * std::sqrt(std::max(0.0, 1.0 - zeta * zeta));
        st.h[i] = std::max(cap, eps_tip);
    }
    st.s = project_slope(st.h, mesh);
    st.length = mesh.length;
    st.time = 0.0;
    return st;
}

double advance_length(const State& state, double dt) {
    const double l = state.length + dt * state.u.back();
    if (!(l > 0.0)) throw std::domain_error("advance_length: nonpositive length");
    return l;
}

RunReport run(const FluidPair& fp, const RunConfig& cfg, const RunSinks& sinks) {
    validate(fp);
    validate(cfg);

    RunReport rep;
    Mesh1D mesh = initial_mesh(cfg, fp);
    State state = initial_state(cfg, fp, mesh);

    AssemblyOptions aopts;
    aopts.quad_order = cfg.quad_order;
    aopts.tip_model = cfg.tip_model;
    aopts.eps_tip = cfg.eps_tip_frac * fp.h_in;
    aopts.include_bulk_pressure_term = cfg.include_bulk_pressure_term;
    aopts.parallel = cfg.parallel;

    NewtonOptions nopts;
    nopts.tol = cfg.newton_tol;
    nopts.max_iters = cfg.newton_max_iters;

    RefineParams rparams;
    rparams.strategy = cfg.strategy;
    rparams.parameter = marking_parameter(cfg);
    rparams.accounting = cfg.accounting;
    rparams.max_generation = cfg.max_generation;
    rparams.quad_order = cfg.quad_order;
    rparams.max_elements = cfg.max_elements;

    const auto log = [&](const std::string& line) {
        if (sinks.on_log) sinks.on_log(line);
    };
    int last_emitted = -1;
    const auto emit = [&](int step, const State& st, const Mesh1D& m) {
        if (!sinks.on_snapshot || step == last_emitted) return;
        last_emitted = step;
        Snapshot snap;
        snap.step = step;
        snap.state = st;
        snap.mesh = m;
        snap.error = estimate(st, m, cfg.quad_order, cfg.parallel);
        sinks.on_snapshot(snap);
    };
    const auto finalize = [&](Termination why) -> RunReport& {
        rep.termination = why;
        rep.end_time = state.time;
        rep.final_error = estimate(state, mesh, cfg.quad_order, cfg.parallel);
        rep.eta_global_final = rep.final_error.eta_global;
        rep.final_state = state;
        rep.final_mesh = mesh;
        return rep;
    };

    const double v_initial = droplet_volume(state, mesh);

    if (!(cfg.t_max > 0.0)) return finalize(Termination::t_max_reached);

    emit(0, state, mesh);

    State state_old;       // one committed step back (bdf2 history)
    bool have_old = false;
    double dt_prev = 0.0;

    double dt = std::min(cfg.dt_init, cfg.dt_max);
    int fast_streak = 0;
    double t = 0.0;
    int step = 0;

    long long prev_crossing = static_cast<long long>(std::floor(state.length / fp.h_in + 1e-12));
    double safety_level = cfg.safety_min_h_frac;

    std::optional<RefinementRecord> pending_refine;
    State resolve_guess;
    bool have_resolve_guess = false;

    const double pinch_h = cfg.pinch_threshold_frac * fp.h_in;
    const double influx = kPi * fp.h_in * fp.h_in * fp.u_in;

    while (t < cfg.t_max * (1.0 - 1e-14)) {
        double dt_eff = std::min(dt, cfg.t_max - t);
        if (cfg.snapshot_dt > 0.0) {
            const double next_snap =
                (std::floor(t / cfg.snapshot_dt + 1e-9) + 1.0) * cfg.snapshot_dt;
            const double gap = next_snap - t;
            if (gap > 1e-12 * cfg.snapshot_dt && gap < dt_eff) dt_eff = gap;
        }

        TimeContext tc;
        tc.dt = dt_eff;
        tc.old_state = &state;
        if (cfg.scheme == TimeScheme::bdf2 && have_old) {
            tc.scheme = TimeScheme::bdf2;
            tc.dt_old = dt_prev;
            tc.older_state = &state_old;
        } else {
            tc.scheme = TimeScheme::backward_euler;
        }

        std::optional<NewtonResult> res;
        try {
            res = newton_solve(have_resolve_guess ? resolve_guess : state, mesh, fp, tc, aopts,
                               nopts);
        } catch (const NonConvergence&) {
        } catch (const SingularMatrix&) {
        } catch (const SingularCurvature&) {
        }

        const char* reject_cause = nullptr;
        if (!res) {
            reject_cause = "newton_failure";
        } else {
            // h is a radius; a converged state with h <= 0 (or NaN) anywhere
            // is nonphysical and the step is rejected like a solver failure.
            for (const double hv : res->state.h)
                if (!(hv > 0.0)) {
                    reject_cause = "positivity";
                    break;
                }
        }
        if (reject_cause) {
            dt *= 0.5;
            fast_streak = 0;
            have_resolve_guess = false;
            if (dt < cfg.dt_min) {
                log(strprintf("hard_failure step=%d t=%.9e dt=%.3e below dt_min cause=%s",
                              step + 1, t, dt, reject_cause));
                emit(step, state, mesh);
                return finalize(Termination::hard_failure);
            }
            rep.dt_changes.push_back({step + 1, dt, reject_cause});
            log(strprintf("dt_change step=%d dt=%.9e cause=%s", step + 1, dt, reject_cause));
            continue;
        }

        const double t_new = t + dt_eff;
        State new_state = std::move(res->state);
        Mesh1D new_mesh = std::move(res->mesh);
        new_state.time = t_new;

        // Refinement triggers, evaluated before the step commits so the cycle
        // can rewind and re-solve this very step on the refined mesh.
        if (cfg.strategy != MarkingStrategy::none) {
            std::string trigger;
            const long long crossing =
                static_cast<long long>(std::floor(new_state.length / fp.h_in + 1e-12));
            if (crossing > prev_crossing) {
                if (crossing >= cfg.refine_trigger_n) trigger = "length_crossing";
                prev_crossing = crossing;
            }
            if (trigger.empty() && safety_level > 0.0) {
                const PinchPoint neck = neck_minimum(new_state, new_mesh, cfg.tip_exclusion_frac);
                if (neck.h_min < safety_level * fp.h_in) {
                    trigger = "min_h_safety";
                    // Re-arm at 80% of the minimum that fired, so the trigger
                    // cadence follows the neck's own collapse rate: sparse while
                    // thinning is slow, dense through the final acceleration.
                    safety_level = 0.8 * neck.h_min / fp.h_in;
                }
            }
            if (!trigger.empty()) {
                std::vector<std::vector<double>> extras = {state.u, state.h, state.s};
                if (tc.scheme == TimeScheme::bdf2) {
                    extras.push_back(state_old.u);
                    extras.push_back(state_old.h);
                    extras.push_back(state_old.s);
                }
                bool refined = false;
                RefineOutcome out;
                try {
                    out = refine_cycle(new_state, new_mesh, rparams, extras);
                    refined = !out.marks.marked.empty();
                } catch (const RefinementExhausted&) {
                    log(strprintf("refinement_exhausted step=%d t=%.9e trigger=%s", step + 1,
                                  t_new, trigger.c_str()));
                }
                if (refined) {
                    if (pending_refine) {
                        pending_refine->eta_after = out.error_before.eta_global;
                        rep.refinements.push_back(*pending_refine);
                        ++rep.n_refinements;
                        pending_refine.reset();
                    }
                    RefinementRecord rr;
                    rr.step = step + 1;
                    rr.t = t_new;
                    rr.trigger = trigger;
                    rr.n_marked = out.marks.marked.size();
                    rr.n_elements_before = new_mesh.n_elements();
                    rr.n_elements_after = out.mesh.n_elements();
                    rr.eta_before = out.error_before.eta_global;
                    pending_refine = rr;
                    rep.total_marked += rr.n_marked;
                    log(strprintf(
                        "refine step=%d t=%.9e trigger=%s marked=%zu elements=%zu->%zu "
                        "eta_before=%.6e capped=%zu trimmed=%zu",
                        step + 1, t_new, trigger.c_str(), rr.n_marked, rr.n_elements_before,
                        rr.n_elements_after, rr.eta_before, out.n_capped, out.n_trimmed));

                    // Rewind: transferred history becomes the current state, the
                    // transferred solve becomes the Newton guess; same t, same dt.
                    resolve_guess = std::move(out.state);
                    have_resolve_guess = true;
                    mesh = grow_domain(out.mesh, state.length);
                    State hist;
                    hist.u = std::move(out.extra_fields[0]);
                    hist.h = std::move(out.extra_fields[1]);
                    hist.s = std::move(out.extra_fields[2]);
                    hist.length = state.length;
                    hist.time = state.time;
                    state = std::move(hist);
                    if (tc.scheme == TimeScheme::bdf2) {
                        State hist2;
                        hist2.u = std::move(out.extra_fields[3]);
                        hist2.h = std::move(out.extra_fields[4]);
                        hist2.s = std::move(out.extra_fields[5]);
                        hist2.length = state_old.length;
                        hist2.time = state_old.time;
                        state_old = std::move(hist2);
                    }
                    continue;
                }
            }
        }

        // Commit. The balance rate dV/dt = pi h_in^2 u_in holds when dL/dt =
        // u(tip): the tip outflux cancels against the boundary-motion flux.
        const double v_old = droplet_volume(state, mesh);
        const double v_new = droplet_volume(new_state, new_mesh);
        const double defect = std::abs(v_new - v_old - dt_eff * influx) / (dt_eff * influx);
        rep.max_volume_defect = std::max(rep.max_volume_defect, defect);

        const PinchPoint neck = neck_minimum(new_state, new_mesh, cfg.tip_exclusion_frac);
        ++step;
        rep.steps.push_back({step, t_new, dt_eff, res->report.iterations, new_state.length,
                             neck.h_min, v_new - v_old, defect});
        rep.n_steps = step;

        state_old = std::move(state);
        have_old = true;
        state = std::move(new_state);
        mesh = std::move(new_mesh);
        dt_prev = dt_eff;
        t = t_new;
        have_resolve_guess = false;

        if (pending_refine) {
            pending_refine->eta_after =
                estimate(state, mesh, cfg.quad_order, cfg.parallel).eta_global;
            rep.refinements.push_back(*pending_refine);
            ++rep.n_refinements;
            log(strprintf("refine_resolved step=%d eta_after=%.6e", step,
                          rep.refinements.back().eta_after));
            pending_refine.reset();
        }

        if (res->report.iterations <= 5) {
            if (++fast_streak >= 3 && dt < cfg.dt_max) {
                dt = std::min(dt * 1.2, cfg.dt_max);
                fast_streak = 0;
                rep.dt_changes.push_back({step + 1, dt, "growth"});
                log(strprintf("dt_change step=%d dt=%.9e cause=growth", step + 1, dt));
            }
        } else {
            fast_streak = 0;
        }

        if (const auto pinch = detect_pinch(state, mesh, cfg.tip_exclusion_frac, pinch_h)) {
            rep.pinch = pinch;
            rep.pinch_time = t;
            rep.droplet_volume = droplet_volume(state, mesh, pinch->z);
            log(strprintf("pinch step=%d t=%.9e z=%.9e h=%.6e volume=%.9e", step, t, pinch->z,
                          pinch->h_min, rep.droplet_volume));
            emit(step, state, mesh);
            RunReport& done = finalize(Termination::pinch);
            done.injected_volume_defect =
                std::abs(droplet_volume(state, mesh) - v_initial - influx * t) /
                std::max(influx * t, 1e-300);
            return done;
        }

        bool snap_due = cfg.output_every > 0 && step % cfg.output_every == 0;
        if (cfg.snapshot_dt > 0.0) {
            const double k = std::round(t / cfg.snapshot_dt);
            if (k >= 1.0 && std::abs(t - k * cfg.snapshot_dt) <=
                                1e-9 * std::max(cfg.snapshot_dt, std::abs(t)))
                snap_due = true;
        }
        if (snap_due) emit(step, state, mesh);
    }

    emit(step, state, mesh);
    RunReport& done = finalize(Termination::t_max_reached);
    if (t > 0.0)
        done.injected_volume_defect =
            std::abs(droplet_volume(state, mesh) - v_initial - influx * t) /
            std::max(influx * t, 1e-300);
    return done;
}

}  // namespace dropletfem
