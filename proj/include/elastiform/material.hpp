#pragma once

#include "elastiform/types.hpp"

namespace ef {

// Homogeneous isotropic material given by the Lame pair.
// Valid range: mu > 0, d*lambda + 2*mu > 0 with d = 2. The incompressible
// limit (lambda -> inf, nu = 0.5) is excluded: the compliance tensor below
// becomes singular there.
struct MaterialParams {
    double lambda = 0.0;
    double mu = 0.0;
    static constexpr int dim = 2;

    static MaterialParams from_lame(double lambda, double mu);
};

// Plane-strain conversion from engineering constants.
// Requires E > 0 and -1 < nu < 0.5 (strict).
MaterialParams lame_from_young_poisson(double E, double nu);

// sigma = A e = 2 mu e + lambda tr(e) Id
Mat2 apply_A(const Mat2& e, const MaterialParams& m);

// e = A^-1 s = s/(2 mu) - lambda/(2 mu (d lambda + 2 mu)) tr(s) Id
Mat2 apply_Ainv(const Mat2& s, const MaterialParams& m);

} // namespace ef
