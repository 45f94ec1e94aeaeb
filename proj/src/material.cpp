#include "elastiform/material.hpp"

#include <cmath>

namespace ef {

MaterialParams MaterialParams::from_lame(double lambda, double mu) {
    if (!(mu > 0.0))
        throw ConfigError("material: mu must be positive");
    if (!(MaterialParams::dim * lambda + 2.0 * mu > 0.0))
        throw ConfigError("material: d*lambda + 2*mu must be positive");
    if (!std::isfinite(lambda) || !std::isfinite(mu))
        throw ConfigError("material: Lame constants must be finite");
    MaterialParams m;
    m.lambda = lambda;
    m.mu = mu;
    return m;
}

MaterialParams lame_from_young_poisson(double E, double nu) {
    if (!(E > 0.0))
        throw ConfigError("material: E must be positive");
    if (!(nu > -1.0) || !(nu < 0.5))
        throw ConfigError("material: nu must lie in (-1, 0.5); nu = 0.5 is incompressible");
    const double lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    const double mu = E / (2.0 * (1.0 + nu));
    return MaterialParams::from_lame(lambda, mu);
}

Mat2 apply_A(const Mat2& e, const MaterialParams& m) {
    return 2.0 * m.mu * e + m.lambda * e.trace() * Mat2::Identity();
}

Mat2 apply_Ainv(const Mat2& s, const MaterialParams& m) {
    const double d = MaterialParams::dim;
    const double c = m.lambda / (2.0 * m.mu * (d * m.lambda + 2.0 * m.mu));
    return s / (2.0 * m.mu) - c * s.trace() * Mat2::Identity();
}

} // namespace ef
