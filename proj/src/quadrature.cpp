#include "elastiform/quadrature.hpp"

#include <cmath>

namespace ef {

namespace {

TriQuadrature make_tri_rule(int order) {
    TriQuadrature q;
    switch (order) {
    case 1:
        q.points = {{1.0 / 3.0, 1.0 / 3.0}};
        q.weights = {0.5};
        break;
    case 2:
        q.points = {{1.0 / 6.0, 1.0 / 6.0}, {2.0 / 3.0, 1.0 / 6.0}, {1.0 / 6.0, 2.0 / 3.0}};
        q.weights = {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
        break;
    case 3:
        q.points = {{1.0 / 3.0, 1.0 / 3.0}, {0.6, 0.2}, {0.2, 0.6}, {0.2, 0.2}};
        q.weights = {-27.0 / 96.0, 25.0 / 96.0, 25.0 / 96.0, 25.0 / 96.0};
        break;
    case 4: {
        // Dunavant degree-4 rule, six points.
        const double a = 0.445948490915965;
        const double b = 0.091576213509771;
        const double wa = 0.223381589678011 / 2.0;
        const double wb = 0.109951743655322 / 2.0;
        q.points = {{a, a}, {1.0 - 2.0 * a, a}, {a, 1.0 - 2.0 * a},
                    {b, b}, {1.0 - 2.0 * b, b}, {b, 1.0 - 2.0 * b}};
        q.weights = {wa, wa, wa, wb, wb, wb};
        break;
    }
    default:
        throw ConfigError("tri_quadrature: unsupported order " + std::to_string(order));
    }
    return q;
}

EdgeQuadrature make_edge_rule(int npoints) {
    EdgeQuadrature q;
    switch (npoints) {
    case 1:
        q.points = {0.5};
        q.weights = {1.0};
        break;
    case 2: {
        const double d = 0.5 / std::sqrt(3.0);
        q.points = {0.5 - d, 0.5 + d};
        q.weights = {0.5, 0.5};
        break;
    }
    case 3: {
        const double d = 0.5 * std::sqrt(3.0 / 5.0);
        q.points = {0.5 - d, 0.5, 0.5 + d};
        q.weights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
        break;
    }
    case 4: {
        const double d1 = 0.5 * std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
        const double d2 = 0.5 * std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
        const double w1 = (18.0 + std::sqrt(30.0)) / 72.0;
        const double w2 = (18.0 - std::sqrt(30.0)) / 72.0;
        q.points = {0.5 - d2, 0.5 - d1, 0.5 + d1, 0.5 + d2};
        q.weights = {w2, w1, w1, w2};
        break;
    }
    default:
        throw ConfigError("edge_quadrature: unsupported point count " + std::to_string(npoints));
    }
    return q;
}

} // namespace

const TriQuadrature& tri_quadrature(int order) {
    static const TriQuadrature r1 = make_tri_rule(1);
    static const TriQuadrature r2 = make_tri_rule(2);
    static const TriQuadrature r3 = make_tri_rule(3);
    static const TriQuadrature r4 = make_tri_rule(4);
    switch (order) {
    case 1: return r1;
    case 2: return r2;
    case 3: return r3;
    case 4: return r4;
    default:
        throw ConfigError("tri_quadrature: unsupported order " + std::to_string(order));
    }
}

const EdgeQuadrature& edge_quadrature(int npoints) {
    static const EdgeQuadrature e1 = make_edge_rule(1);
    static const EdgeQuadrature e2 = make_edge_rule(2);
    static const EdgeQuadrature e3 = make_edge_rule(3);
    static const EdgeQuadrature e4 = make_edge_rule(4);
    switch (npoints) {
    case 1: return e1;
    case 2: return e2;
    case 3: return e3;
    case 4: return e4;
    default:
        throw ConfigError("edge_quadrature: unsupported point count " + std::to_string(npoints));
    }
}

} // namespace ef
