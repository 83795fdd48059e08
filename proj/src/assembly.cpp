#include "dropletfem/assembly.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dropletfem/errors.hpp"
#include "dropletfem/quadrature.hpp"

namespace dropletfem {

namespace {

// Bandwidths of the interleaved (u, h, s) ordering with P1 coupling.
constexpr std::size_t kBand = 5;

struct TimeWeights {
    double c0 = 0.0;      // coefficient of the current value in df/dt
    double c_old = 0.0;   // coefficient of the old value
    double c_older = 0.0; // coefficient of the value two levels back
    bool ale = false;     // subtract w df/dz
};

TimeWeights time_weights(const TimeContext& time) {
    TimeWeights w;
    switch (time.scheme) {
        case TimeScheme::steady:
            return w;
        case TimeScheme::backward_euler:
            if (!time.old_state || !(time.dt > 0.0))
                throw std::invalid_argument("assemble: backward Euler needs old_state and dt > 0");
            w.c0 = 1.0 / time.dt;
            w.c_old = -1.0 / time.dt;
            w.ale = true;
            return w;
        case TimeScheme::bdf2: {
            if (!time.old_state || !time.older_state || !(time.dt > 0.0) || !(time.dt_old > 0.0))
                throw std::invalid_argument("assemble: bdf2 needs two history states and step sizes");
            // Variable-step BDF2 weights; reduces to (3/2, -2, 1/2)/dt for equal steps.
            const double r = time.dt / time.dt_old;
            w.c0 = (1.0 + 2.0 * r) / (1.0 + r) / time.dt;
            w.c_old = -(1.0 + r) / time.dt;
            w.c_older = r * r / (1.0 + r) / time.dt;
            w.ale = true;
            return w;
        }
    }
    throw std::logic_error("time_weights: unknown scheme");
}

struct ElementKernelInput {
    const State* state;
    const Mesh1D* mesh;
    const State* old_state;
    const State* older_state;
    TimeWeights tw;
    double dldt;
    double gamma_over_rho;
    double nu;
    double a1, a2;           // viscosity-ratio factors
    double pressure_force;   // shear (and optional bulk) pressure terms, m/s^2
    double buoyancy_g;       // (1 - rho_c/rho_d) g, m/s^2
    const Forcing* forcing;
    std::span<const QuadPoint> quad;
};

// Local residual (2 nodes x 3 equations, node-major) and Jacobian
// (same ordering on both axes) of one element.
struct ElementLocal {
    std::array<double, 6> r;
    std::array<double, 36> j;
    bool singular_h;
};

double interp(const std::vector<double>& f, std::size_t a, double na, double nb) {
    return f[a] * na + f[a + 1] * nb;
}

ElementLocal element_kernel(const ElementKernelInput& in, std::size_t e) {
    ElementLocal loc{};
    loc.r.fill(0.0);
    loc.j.fill(0.0);
    loc.singular_h = false;

    const State& st = *in.state;
    const Mesh1D& mesh = *in.mesh;
    const double zeta_a = mesh.ref_coords[e];
    const double zeta_b = mesh.ref_coords[e + 1];
    const double le = (zeta_b - zeta_a) * mesh.length;
    const double inv_le = 1.0 / le;
    const std::size_t a = e;

    // u_z, h_z, s_z are constant on the element.
    const double uz = (st.u[a + 1] - st.u[a]) * inv_le;
    const double hz = (st.h[a + 1] - st.h[a]) * inv_le;
    const double sz = (st.s[a + 1] - st.s[a]) * inv_le;

    for (const QuadPoint& qp : in.quad) {
        const double nb = qp.xi;
        const double na = 1.0 - qp.xi;
        const double shape[2] = {na, nb};
        const double dshape[2] = {-inv_le, inv_le};
        const double weight = qp.weight * le;

        const double u = interp(st.u, a, na, nb);
        const double h = interp(st.h, a, na, nb);
        const double s = interp(st.s, a, na, nb);
        if (!(h > 0.0)) {
            loc.singular_h = true;
            return loc;
        }

        const double zeta = zeta_a + qp.xi * (zeta_b - zeta_a);
        const double z = zeta * mesh.length;
        const double w_mesh = in.tw.ale ? zeta * in.dldt : 0.0;

        // Discrete time derivatives at fixed reference coordinate.
        double ut_hist = 0.0, ht_hist = 0.0;
        if (in.tw.c_old != 0.0) {
            ut_hist += in.tw.c_old * interp(in.old_state->u, a, na, nb);
            ht_hist += in.tw.c_old * interp(in.old_state->h, a, na, nb);
        }
        if (in.tw.c_older != 0.0) {
            ut_hist += in.tw.c_older * interp(in.older_state->u, a, na, nb);
            ht_hist += in.tw.c_older * interp(in.older_state->h, a, na, nb);
        }

        const double one_s2 = 1.0 + s * s;
        const double r1 = std::sqrt(one_s2);
        const double r3 = one_s2 * r1;
        const double r5 = one_s2 * r3;

        const double bulk = -s * sz / (h * r3) - s / (h * h * r1);
        const double dbulk_dh = s * sz / (h * h * r3) + 2.0 * s / (h * h * h * r1);
        const double dbulk_ds = -sz * (1.0 - 2.0 * s * s) / (h * r5) - 1.0 / (h * h * r3);
        const double dbulk_dsz = -s / (h * r3);

        const double visc1 = 6.0 * in.nu * in.a1;  // first-derivative viscous factor

        // Momentum: plain test-function part.
        double au = in.tw.c0 * u + ut_hist - w_mesh * uz + u * uz - visc1 * (s / h) * uz +
                    in.gamma_over_rho * bulk + in.pressure_force - in.buoyancy_g;
        if (in.forcing && in.forcing->momentum) au -= in.forcing->momentum(z);
        const double dau_du = in.tw.c0 + uz;
        const double dau_duz = -w_mesh + u - visc1 * s / h;
        const double dau_dh = visc1 * s * uz / (h * h) + in.gamma_over_rho * dbulk_dh;
        const double dau_ds = -visc1 * uz / h + in.gamma_over_rho * dbulk_ds;
        const double dau_dsz = in.gamma_over_rho * dbulk_dsz;

        // Momentum: gradient-of-test-function part (viscous + curvature flux).
        const double visc2 = 3.0 * in.nu * in.a2;
        const double bu = visc2 * uz + in.gamma_over_rho * sz / r3;
        const double dbu_duz = visc2;
        const double dbu_ds = in.gamma_over_rho * (-3.0 * s * sz / r5);
        const double dbu_dsz = in.gamma_over_rho / r3;

        // Interface advection.
        double ah = in.tw.c0 * h + ht_hist - w_mesh * hz + u * hz + 0.5 * h * uz;
        if (in.forcing && in.forcing->interface) ah -= in.forcing->interface(z);
        const double dah_dh = in.tw.c0 + 0.5 * uz;
        const double dah_dhz = -w_mesh + u;
        const double dah_du = hz;
        const double dah_duz = 0.5 * h;

        // Slope projection.
        const double as = s - hz;

        for (int i = 0; i < 2; ++i) {
            const double ni = shape[i] * weight;
            const double di = dshape[i] * weight;
            loc.r[3 * i + 0] += ni * au + di * bu;
            loc.r[3 * i + 1] += ni * ah;
            loc.r[3 * i + 2] += ni * as;
            for (int jn = 0; jn < 2; ++jn) {
                const double njt = shape[jn];
                const double djt = dshape[jn];
                loc.j[(3 * i + 0) * 6 + 3 * jn + 0] +=
                    ni * (dau_du * njt + dau_duz * djt) + di * dbu_duz * djt;
                loc.j[(3 * i + 0) * 6 + 3 * jn + 1] += ni * dau_dh * njt;
                loc.j[(3 * i + 0) * 6 + 3 * jn + 2] +=
                    ni * (dau_ds * njt + dau_dsz * djt) + di * (dbu_ds * njt + dbu_dsz * djt);
                loc.j[(3 * i + 1) * 6 + 3 * jn + 0] += ni * (dah_du * njt + dah_duz * djt);
                loc.j[(3 * i + 1) * 6 + 3 * jn + 1] += ni * (dah_dh * njt + dah_dhz * djt);
                loc.j[(3 * i + 2) * 6 + 3 * jn + 1] += ni * (-djt);
                loc.j[(3 * i + 2) * 6 + 3 * jn + 2] += ni * njt;
            }
        }
    }
    return loc;
}

void scatter(DiscreteSystem& sys, const ElementLocal& loc, std::size_t e) {
    for (int i = 0; i < 6; ++i) {
        const std::size_t row = 3 * e + static_cast<std::size_t>(i);
        sys.residual[row] += loc.r[static_cast<std::size_t>(i)];
        for (int j = 0; j < 6; ++j)
            sys.jacobian.add(row, 3 * e + static_cast<std::size_t>(j),
                             loc.j[static_cast<std::size_t>(i) * 6 + static_cast<std::size_t>(j)]);
    }
}

}  // namespace

TimeDerivativeWeights time_derivative_weights(const TimeContext& time) {
    const TimeWeights w = time_weights(time);
    return {w.c0, w.c_old, w.c_older};
}

DiscreteSystem assemble(const State& state, const Mesh1D& mesh, const FluidPair& fp,
                        const TimeContext& time, const AssemblyOptions& opts) {
    validate(state, mesh);
    const std::size_t n = mesh.n_nodes();
    DiscreteSystem sys{std::vector<double>(3 * n, 0.0), BandedMatrix(3 * n, kBand, kBand)};

    ElementKernelInput in;
    in.state = &state;
    in.mesh = &mesh;
    in.old_state = time.old_state;
    in.older_state = time.older_state;
    in.tw = time_weights(time);
    in.dldt = time.dldt;
    in.gamma_over_rho = fp.gamma / fp.rho_d;
    in.nu = fp.nu_d;
    const auto [a1, a2] = viscosity_ratio_terms(fp);
    in.a1 = a1;
    in.a2 = a2;
    in.pressure_force = shear_pressure_coefficient(fp) * fp.dpdz_c;
    if (opts.include_bulk_pressure_term) in.pressure_force += 2.0 / fp.rho_d * fp.dpdz_c;
    in.buoyancy_g = buoyancy_factor(fp) * fp.g;
    in.forcing = opts.forcing;
    in.quad = gauss_rule(opts.quad_order);

    const std::size_t n_el = mesh.n_elements();
    std::vector<ElementLocal> locals(n_el);
    if (opts.parallel) {
#pragma omp parallel for schedule(static)
        for (long long e = 0; e < static_cast<long long>(n_el); ++e)
            locals[static_cast<std::size_t>(e)] =
                element_kernel(in, static_cast<std::size_t>(e));
    } else {
        for (std::size_t e = 0; e < n_el; ++e) locals[e] = element_kernel(in, e);
    }

    // Fixed-order scatter keeps the result bit-identical across thread counts.
    for (std::size_t e = 0; e < n_el; ++e) {
        if (locals[e].singular_h)
            throw SingularCurvature("assemble: h <= 0 at a quadrature point of element " +
                                    std::to_string(e));
        scatter(sys, locals[e], e);
    }

    // Boundary term of the momentum weak form at the tip. The flux is an
    // imposed datum, not a function of the unknowns, so the Jacobian is
    // untouched. The inlet counterpart never appears: u is essential there.
    sys.residual[3 * (n - 1)] -= opts.tip_flux;
    return sys;
}

void apply_boundary_conditions(DiscreteSystem& sys, const State& state,
                               const Mesh1D& mesh, const FluidPair& fp,
                               const AssemblyOptions& opts) {
    auto dirichlet = [&](std::size_t row, double residual) {
        sys.jacobian.clear_row(row);
        sys.jacobian.set(row, row, 1.0);
        sys.residual[row] = residual;
    };
    const double u_in = std::isfinite(opts.inlet_u) ? opts.inlet_u : fp.u_in;
    const double h_in = std::isfinite(opts.inlet_h) ? opts.inlet_h : fp.h_in;
    dirichlet(0, state.u[0] - u_in);
    dirichlet(1, state.h[0] - h_in);
    if (opts.tip_model == TipModel::pinned) {
        const std::size_t t = mesh.n_nodes() - 1;
        dirichlet(3 * t + 1, state.h[t] - opts.eps_tip);
    }
}

std::vector<double> project_slope(const std::vector<double>& h, const Mesh1D& mesh) {
    if (h.size() != mesh.n_nodes())
        throw std::invalid_argument("project_slope: field size does not match the mesh");
    const std::size_t n = mesh.n_nodes();
    BandedMatrix mass(n, 1, 1);
    std::vector<double> rhs(n, 0.0);
    for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
        const double le = mesh.element_length(e);
        const double hz = (h[e + 1] - h[e]) / le;
        // Consistent P1 mass matrix and right-hand side, exact integrals.
        mass.add(e, e, le / 3.0);
        mass.add(e, e + 1, le / 6.0);
        mass.add(e + 1, e, le / 6.0);
        mass.add(e + 1, e + 1, le / 3.0);
        rhs[e] += 0.5 * le * hz;
        rhs[e + 1] += 0.5 * le * hz;
    }
    return mass.solve(rhs);
}

double droplet_volume(const State& state, const Mesh1D& mesh, double z_from) {
    const double pi = 3.14159265358979323846;
    double vol = 0.0;
    for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
        const double za = mesh.node_z(e);
        const double zb = mesh.node_z(e + 1);
        if (zb <= z_from) continue;
        double ha = state.h[e];
        double hb = state.h[e + 1];
        double a = za;
        if (z_from > za) {
            const double xi = (z_from - za) / (zb - za);
            ha = state.h[e] + xi * (state.h[e + 1] - state.h[e]);
            a = z_from;
        }
        // Exact integral of a squared linear function.
        vol += (zb - a) * (ha * ha + ha * hb + hb * hb) / 3.0;
    }
    return pi * vol;
}

}  // namespace dropletfem
