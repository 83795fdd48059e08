#pragma once

#include <stdexcept>
#include <string>

namespace dropletfem {

/// Interface radius reached h <= 0 at an evaluation point.
struct SingularCurvature : std::runtime_error {
    explicit SingularCurvature(const std::string& what) : std::runtime_error(what) {}
};

/// Banded LU hit an exactly singular pivot.
struct SingularMatrix : std::runtime_error {
    explicit SingularMatrix(const std::string& what) : std::runtime_error(what) {}
};

/// Newton iteration failed to reach the requested tolerance.
struct NonConvergence : std::runtime_error {
    explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

/// Every marked element is already at the refinement depth or spacing limit.
struct RefinementExhausted : std::runtime_error {
    explicit RefinementExhausted(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dropletfem
