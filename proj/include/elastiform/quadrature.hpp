#pragma once

#include "elastiform/types.hpp"

#include <vector>

namespace ef {

// Quadrature on the reference triangle (0,0)-(1,0)-(0,1). Weights sum to 1/2.
struct TriQuadrature {
    std::vector<Vec2> points;
    std::vector<double> weights;
};

// Rules exact for polynomials up to `order`, order in {1,2,3,4}.
const TriQuadrature& tri_quadrature(int order);

// Gauss-Legendre on [0,1]; weights sum to 1. npoints in {1,2,3,4}.
struct EdgeQuadrature {
    std::vector<double> points;
    std::vector<double> weights;
};

const EdgeQuadrature& edge_quadrature(int npoints);

} // namespace ef
