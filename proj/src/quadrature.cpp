#include "dropletfem/quadrature.hpp"

#include <stdexcept>

namespace dropletfem {

namespace {

// Standard [-1, 1] abscissae/weights mapped to [0, 1]: xi = (x+1)/2, w = w/2.
constexpr QuadPoint kGauss1[] = {
    {0.5, 1.0},
};

constexpr QuadPoint kGauss2[] = {
    {0.21132486540518711775, 0.5},
    {0.78867513459481288225, 0.5},
};

constexpr QuadPoint kGauss3[] = {
    {0.11270166537925831148, 0.27777777777777777778},
    {0.5, 0.44444444444444444444},
    {0.88729833462074168852, 0.27777777777777777778},
};

constexpr QuadPoint kGauss4[] = {
    {0.069431844202973712388, 0.17392742256872692869},
    {0.33000947820757186760, 0.32607257743127307131},
    {0.66999052179242813240, 0.32607257743127307131},
    {0.93056815579702628761, 0.17392742256872692869},
};

constexpr QuadPoint kGauss5[] = {
    {0.046910077030668003601, 0.11846344252809454376},
    {0.23076534494715845448, 0.23931433524968323402},
    {0.5, 0.28444444444444444444},
    {0.76923465505284154552, 0.23931433524968323402},
    {0.95308992296933099640, 0.11846344252809454376},
};

}  // namespace

std::span<const QuadPoint> gauss_rule(int order) {
    switch (order) {
        case 1: return kGauss1;
        case 2: return kGauss2;
        case 3: return kGauss3;
        case 4: return kGauss4;
        case 5: return kGauss5;
        default: throw std::out_of_range("gauss_rule: order must be in 1..5");
    }
}

}  // namespace dropletfem
