#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "dropletfem/errors.hpp"
#include "dropletfem/mesh.hpp"
#include "dropletfem/physics.hpp"
#include "dropletfem/state.hpp"

using namespace dropletfem;

namespace {

State flat_state(const Mesh1D& mesh, double h0) {
    State st;
    st.u.assign(mesh.n_nodes(), 0.0);
    st.h.assign(mesh.n_nodes(), h0);
    st.s.assign(mesh.n_nodes(), 0.0);
    st.length = mesh.length;
    return st;
}

}  // namespace

TEST_CASE("curvature of a cylinder is 1/h") {
    for (double h0 : {1.0, 2.5e-3, 42.0}) {
        const double k = curvature({h0, 0.0, 0.0});
        CHECK(k == doctest::Approx(1.0 / h0).epsilon(1e-15));
    }
}

TEST_CASE("curvature of a sphere is 2/a at the equator") {
    // h(z) = sqrt(a^2 - z^2) about the equator z = 0: s = 0, dsdz = -1/a.
    const double a = 0.75;
    const double k = curvature({a, 0.0, -1.0 / a});
    CHECK(k == doctest::Approx(2.0 / a).epsilon(1e-15));
}

TEST_CASE("curvature of a sphere is 2/a everywhere on it") {
    // h(z) = sqrt(a^2 - z^2), s = -z/sqrt(a^2 - z^2), dsdz = -a^2/(a^2-z^2)^{3/2}.
    const double a = 1.3;
    for (int i = 0; i < 10; ++i) {
        const double z = -0.9 * a + 1.8 * a * static_cast<double>(i) / 9.0;
        const double h = std::sqrt(a * a - z * z);
        const double s = -z / h;
        const double dsdz = -a * a / std::pow(a * a - z * z, 1.5);
        CHECK(curvature({h, s, dsdz}) == doctest::Approx(2.0 / a).epsilon(1e-10));
    }
}

TEST_CASE("curvature frozen value at h=1, s=1, dsdz=0") {
    // 1/(1*sqrt(2)) = 0.7071067811865476
    CHECK(curvature({1.0, 1.0, 0.0}) == doctest::Approx(0.7071067811865476).epsilon(1e-15));
}

TEST_CASE("curvature is even in the slope sign") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> uh(0.1, 3.0), us(-2.0, 2.0), ud(-5.0, 5.0);
    for (int i = 0; i < 50; ++i) {
        const double h = uh(rng), s = us(rng), d = ud(rng);
        CHECK(curvature({h, s, d}) == curvature({h, -s, d}));
    }
}

TEST_CASE("curvature rejects nonpositive radius") {
    CHECK_THROWS_AS(curvature({0.0, 0.0, 0.0}), SingularCurvature);
    CHECK_THROWS_AS(curvature({-1.0, 0.5, 0.0}), SingularCurvature);
    CHECK_THROWS_AS(curvature_gradient_terms({0.0, 0.0, 0.0}), SingularCurvature);
}

TEST_CASE("curvature gradient terms at reference points") {
    // s = 0 kills the bulk grouping; the flux grouping reduces to dsdz.
    const CurvatureGradientTerms flatish = curvature_gradient_terms({0.7, 0.0, 3.0});
    CHECK(flatish.bulk == 0.0);
    CHECK(flatish.flux == doctest::Approx(3.0).epsilon(1e-15));

    // h = s = dsdz = 1: bulk = -1/2^{3/2} - 1/2^{1/2} = -3/(2 sqrt 2),
    // flux = 1/2^{3/2}.
    const CurvatureGradientTerms unit = curvature_gradient_terms({1.0, 1.0, 1.0});
    CHECK(unit.bulk == doctest::Approx(-1.0606601717798213).epsilon(1e-15));
    CHECK(unit.flux == doctest::Approx(0.35355339059327376).epsilon(1e-15));
}

TEST_CASE("gradient terms reassemble the curvature derivative") {
    // For h(z) = 1 + 0.1 sin z with s = h', dsdz = h'':
    // dK/dz == bulk - d(flux)/dz. Check with centered differences in z.
    auto hf = [](double z) { return 1.0 + 0.1 * std::sin(z); };
    auto sf = [](double z) { return 0.1 * std::cos(z); };
    auto df = [](double z) { return -0.1 * std::sin(z); };
    auto kf = [&](double z) { return curvature({hf(z), sf(z), df(z)}); };
    auto fluxf = [&](double z) { return curvature_gradient_terms({hf(z), sf(z), df(z)}).flux; };

    const double dz = 1e-5;
    for (double z : {0.3, 1.1, 2.0, 4.5}) {
        const double dKdz = (kf(z + dz) - kf(z - dz)) / (2.0 * dz);
        const double dfluxdz = (fluxf(z + dz) - fluxf(z - dz)) / (2.0 * dz);
        const double bulk = curvature_gradient_terms({hf(z), sf(z), df(z)}).bulk;
        CHECK(dKdz == doctest::Approx(bulk - dfluxdz).epsilon(1e-6));
    }
}

TEST_CASE("neck_minimum finds the V-profile vertex") {
    const double h_in = 2.5e-3;
    const Mesh1D mesh = build_uniform(10, 1.0);
    State st = flat_state(mesh, h_in);
    for (std::size_t i = 0; i < mesh.n_nodes(); ++i)
        st.h[i] = h_in * (0.5 + std::abs(mesh.ref_coords[i] - 0.6));
    const PinchPoint p = neck_minimum(st, mesh, 0.05);
    CHECK(p.node == 6);
    CHECK(p.z == doctest::Approx(0.6 * mesh.length).epsilon(1e-15));
    CHECK(p.h_min == doctest::Approx(0.5 * h_in).epsilon(1e-15));
}

TEST_CASE("neck_minimum honors the exclusion window") {
    const Mesh1D mesh = build_uniform(10, 1.0);
    State st = flat_state(mesh, 1.0);
    st.h[0] = 1e-6;   // inlet artifact
    st.h[10] = 1e-6;  // tip artifact
    st.h[5] = 0.3;
    const PinchPoint p = neck_minimum(st, mesh, 0.05);
    CHECK(p.node == 5);
    CHECK(p.h_min == doctest::Approx(0.3).epsilon(1e-15));
    CHECK_THROWS_AS(neck_minimum(st, mesh, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(neck_minimum(st, mesh, 0.5), std::invalid_argument);
}

TEST_CASE("detect_pinch on a uniform cylinder reports nothing") {
    const Mesh1D mesh = build_uniform(10, 1.0);
    const State st = flat_state(mesh, 2.5e-3);
    CHECK_FALSE(detect_pinch(st, mesh, 0.05, 0.6 * 2.5e-3).has_value());
}

TEST_CASE("detect_pinch reports a resolved V-profile neck") {
    const double h_in = 2.5e-3;
    const Mesh1D mesh = build_uniform(10, 1.0);
    State st = flat_state(mesh, h_in);
    for (std::size_t i = 0; i < mesh.n_nodes(); ++i)
        st.h[i] = h_in * (0.5 + std::abs(mesh.ref_coords[i] - 0.6));
    const auto p = detect_pinch(st, mesh, 0.05, 0.6 * h_in);
    REQUIRE(p.has_value());
    CHECK(p->node == 6);
    CHECK(p->h_min == doctest::Approx(0.5 * h_in).epsilon(1e-15));

    // Threshold below the minimum: no pinch.
    CHECK_FALSE(detect_pinch(st, mesh, 0.05, 0.4 * h_in).has_value());
}

TEST_CASE("detect_pinch rejects an isolated spike") {
    // A single node dropped far below its neighbors is an under-resolution
    // artifact, not a neck: the basin test (neighbors within a small factor
    // of the minimum) must reject it.
    const Mesh1D mesh = build_uniform(10, 1.0);
    State st = flat_state(mesh, 1.0);
    st.h[5] = 0.01;  // neighbors are 100x the minimum
    CHECK_FALSE(detect_pinch(st, mesh, 0.05, 0.5).has_value());
    // But neck_minimum still reports it as the raw minimum.
    CHECK(neck_minimum(st, mesh, 0.05).node == 5);
}

TEST_CASE("detect_pinch rejects nonpositive minima") {
    const Mesh1D mesh = build_uniform(10, 1.0);
    State st = flat_state(mesh, 1.0);
    st.h[4] = 0.0;
    st.h[5] = 0.0;
    st.h[6] = 0.0;
    CHECK_FALSE(detect_pinch(st, mesh, 0.05, 0.5).has_value());
}

TEST_CASE("nodal_curvature of a cylinder is 1/h at every node") {
    const Mesh1D mesh = build_uniform(8, 2.0);
    const State st = flat_state(mesh, 0.4);
    const std::vector<double> k = nodal_curvature(st, mesh);
    REQUIRE(k.size() == mesh.n_nodes());
    for (double v : k) CHECK(v == doctest::Approx(2.5).epsilon(1e-14));
}
