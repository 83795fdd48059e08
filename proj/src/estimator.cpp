#include "dropletfem/estimator.hpp"

#include <cmath>
#include <stdexcept>

#include "dropletfem/quadrature.hpp"

namespace dropletfem {

namespace {

double element_eta_sq(const State& state, const Mesh1D& mesh, std::size_t e,
                      std::span<const QuadPoint> quad) {
    const double le = mesh.element_length(e);
    const double hz = (state.h[e + 1] - state.h[e]) / le;
    double acc = 0.0;
    for (const QuadPoint& qp : quad) {
        const double s = state.s[e] * (1.0 - qp.xi) + state.s[e + 1] * qp.xi;
        const double d = s - hz;
        acc += qp.weight * le * d * d;
    }
    return acc;
}

// L2 norm of (truth(z) - broken dh/dz) or (truth(z) - s(z)) over the domain.
double truth_mismatch_norm(const State& state, const Mesh1D& mesh,
                           const std::function<double(double)>& truth, bool against_s,
                           int quad_order) {
    const auto quad = gauss_rule(quad_order);
    double acc = 0.0;
    for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
        const double le = mesh.element_length(e);
        const double za = mesh.node_z(e);
        const double hz = (state.h[e + 1] - state.h[e]) / le;
        for (const QuadPoint& qp : quad) {
            const double z = za + qp.xi * le;
            const double approx =
                against_s ? state.s[e] * (1.0 - qp.xi) + state.s[e + 1] * qp.xi : hz;
            const double d = truth(z) - approx;
            acc += qp.weight * le * d * d;
        }
    }
    return std::sqrt(acc);
}

}  // namespace

ErrorField estimate(const State& state, const Mesh1D& mesh, int quad_order, bool parallel) {
    validate(state, mesh);
    const std::size_t n_el = mesh.n_elements();
    const auto quad = gauss_rule(quad_order);
    std::vector<double> eta_sq(n_el);
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (long long e = 0; e < static_cast<long long>(n_el); ++e)
            eta_sq[static_cast<std::size_t>(e)] =
                element_eta_sq(state, mesh, static_cast<std::size_t>(e), quad);
    } else {
        for (std::size_t e = 0; e < n_el; ++e) eta_sq[e] = element_eta_sq(state, mesh, e, quad);
    }
    ErrorField out;
    out.eta.resize(n_el);
    out.time = state.time;
    double total = 0.0;
    for (std::size_t e = 0; e < n_el; ++e) {  // fixed-order reduction
        out.eta[e] = std::sqrt(eta_sq[e]);
        total += eta_sq[e];
    }
    out.eta_global = std::sqrt(total);
    return out;
}

std::pair<double, double> error_bounds(double eta_global, double c) {
    if (!(c > 0.0 && c < 1.0))
        throw std::domain_error("error_bounds: c must lie in (0, 1)");
    return {eta_global / (1.0 + c), eta_global / (1.0 - c)};
}

double effectivity(const State& state, const Mesh1D& mesh,
                   const std::function<double(double)>& truth_slope, int quad_order) {
    const double true_err = truth_mismatch_norm(state, mesh, truth_slope, false, quad_order);
    if (true_err == 0.0) throw std::domain_error("effectivity: true error is zero");
    return estimate(state, mesh, quad_order).eta_global / true_err;
}

double empirical_c(const State& state, const Mesh1D& mesh,
                   const std::function<double(double)>& truth_slope, int quad_order) {
    const double true_err = truth_mismatch_norm(state, mesh, truth_slope, false, quad_order);
    if (true_err == 0.0) throw std::domain_error("empirical_c: true error is zero");
    return truth_mismatch_norm(state, mesh, truth_slope, true, quad_order) / true_err;
}

}  // namespace dropletfem
