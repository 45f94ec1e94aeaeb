#pragma once

#include "elastiform/mesh.hpp"
#include "elastiform/types.hpp"

#include <array>
#include <functional>

namespace ef {

// Affine map x = B xhat + b from the reference triangle (0,0)-(1,0)-(0,1).
struct ElementMap {
    Mat2 B;
    Vec2 b;
    double detB = 0.0;
    Mat2 Binv;

    static ElementMap from_triangle(const Mesh& mesh, int t);
    Vec2 to_physical(const Vec2& xhat) const { return B * xhat + b; }
};

// Barycentric gradients of the three P1 hat functions (constant per element).
std::array<Vec2, 3> p1_gradients(const Mesh& mesh, int t);

// Symmetrized gradient e(phi) for the six local displacement DOFs
// (vertex-major: dof 2*i+k is hat_i * e_k).
std::array<Mat2, 6> p1_strain_matrices(const Mesh& mesh, int t);

// One BDM1 scalar-row basis on a physical triangle: six linear vector fields
// dual to the global edge moments against {1, s-1/2}, with s the arclength
// fraction along the mesh's global edge orientation. Local DOF ordering:
// (local edge 0, moment 0), (local edge 0, moment 1), (edge 1, ...), ...
// where local edge k is opposite local vertex k.
struct Bdm1Basis {
    // field i: x -> coeff_const[i] + coeff_lin[i] * (x - centroid)
    std::array<Vec2, 6> coeff_const;
    std::array<Mat2, 6> coeff_lin;
    std::array<double, 6> divergence; // constant per field
    Vec2 centroid;

    Vec2 eval(int i, const Vec2& x) const {
        return coeff_const[i] + coeff_lin[i] * (x - centroid);
    }
};

Bdm1Basis bdm1_basis(const Mesh& mesh, int t);

// Global DOF layout of the weak-symmetry mixed problem:
// stress row r (r=0,1): 2 DOFs per mesh edge, then P0 displacement
// (2 per triangle), then the P0 skew multiplier (1 per triangle).
struct MixedDofMap {
    int n_edges = 0;
    int n_tris = 0;

    explicit MixedDofMap(const Mesh& mesh)
        : n_edges(mesh.n_edges()), n_tris(mesh.n_triangles()) {}

    int stress(int row, int edge, int moment) const {
        return row * 2 * n_edges + 2 * edge + moment;
    }
    int displacement(int tri, int comp) const { return 4 * n_edges + 2 * tri + comp; }
    int rotation(int tri) const { return 4 * n_edges + 2 * n_tris + tri; }
    int total() const { return 4 * n_edges + 3 * n_tris; }
};

// Contravariant Piola image of a tensor field under a given transformation.
// Used by the transport lemma checks; the solvers never call it.
struct PiolaMap {
    std::function<Vec2(const Vec2&)> X;        // forward map
    std::function<Vec2(const Vec2&)> Xinv;     // inverse map
    std::function<Mat2(const Vec2&)> jacobian; // D_theta at a reference point
};

// Evaluates (1/I) D tau(x) D^T at y = X(x), x = Xinv(y).
Mat2 piola_contravariant(const PiolaMap& map, const std::function<Mat2(const Vec2&)>& tau,
                         const Vec2& y);

} // namespace ef
