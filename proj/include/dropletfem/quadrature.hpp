#pragma once

#include <cstddef>
#include <span>

namespace dropletfem {

/// One Gauss-Legendre point on the reference interval [0, 1].
struct QuadPoint {
    double xi;      ///< abscissa in [0, 1]
    double weight;  ///< weight; weights sum to 1
};

/// Gauss-Legendre rule with `order` points (1..5), exact for polynomials of
/// degree 2*order - 1. Throws std::out_of_range outside the supported range.
std::span<const QuadPoint> gauss_rule(int order);

}  // namespace dropletfem
