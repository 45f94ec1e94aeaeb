#include "elastiform/fem.hpp"

#include "elastiform/quadrature.hpp"

#include <Eigen/Dense>

namespace ef {

ElementMap ElementMap::from_triangle(const Mesh& mesh, int t) {
    const auto& tri = mesh.triangles[t];
    const Vec2& p0 = mesh.vertices[tri[0]];
    ElementMap m;
    m.B.col(0) = mesh.vertices[tri[1]] - p0;
    m.B.col(1) = mesh.vertices[tri[2]] - p0;
    m.b = p0;
    m.detB = m.B.determinant();
    if (!(m.detB > 0.0))
        throw SolverError("element map: non-positive Jacobian");
    m.Binv = m.B.inverse();
    return m;
}

std::array<Vec2, 3> p1_gradients(const Mesh& mesh, int t) {
    const ElementMap m = ElementMap::from_triangle(mesh, t);
    // lambda_hat = Binv (x - p0); gradients are the rows of Binv.
    const Vec2 g1 = m.Binv.row(0);
    const Vec2 g2 = m.Binv.row(1);
    return {-(g1 + g2), g1, g2};
}

std::array<Mat2, 6> p1_strain_matrices(const Mesh& mesh, int t) {
    const auto grads = p1_gradients(mesh, t);
    std::array<Mat2, 6> e;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 2; ++k) {
            Mat2 g = Mat2::Zero();
            g.row(k) = grads[i].transpose(); // grad of (hat_i e_k)
            e[2 * i + k] = 0.5 * (g + g.transpose());
        }
    return e;
}

Bdm1Basis bdm1_basis(const Mesh& mesh, int t) {
    Bdm1Basis basis;
    basis.centroid = mesh.centroid(t);

    // Moment matrix of the six monomial fields {e_k, e_k (x-c), e_k (y-c)}
    // against the six global edge-moment functionals, then invert to get the
    // dual basis. Edge moments use the mesh's global orientation; 2-point
    // Gauss is exact for the quadratic integrands.
    const auto& eq = edge_quadrature(2);
    Eigen::Matrix<double, 6, 6> M = Eigen::Matrix<double, 6, 6>::Zero();
    auto mono_val = [&](int j, const Vec2& x) -> Vec2 {
        const Vec2 r = x - basis.centroid;
        switch (j) {
        case 0: return Vec2(1, 0);
        case 1: return Vec2(0, 1);
        case 2: return Vec2(r.x(), 0);
        case 3: return Vec2(0, r.x());
        case 4: return Vec2(r.y(), 0);
        default: return Vec2(0, r.y());
        }
    };
    for (int le = 0; le < 3; ++le) {
        const EdgeRec& rec = mesh.edges[mesh.tri_edges[t][le]];
        const Vec2& a = mesh.vertices[rec.a];
        const Vec2& bb = mesh.vertices[rec.b];
        const double len = (bb - a).norm();
        const Vec2 tangent = (bb - a) / len;
        const Vec2 n(tangent.y(), -tangent.x());
        for (int mom = 0; mom < 2; ++mom) {
            for (int j = 0; j < 6; ++j) {
                double acc = 0.0;
                for (size_t q = 0; q < eq.points.size(); ++q) {
                    const double s = eq.points[q];
                    const Vec2 x = a + s * (bb - a);
                    const double w = eq.weights[q] * len;
                    const double test = (mom == 0) ? 1.0 : (s - 0.5);
                    acc += w * test * mono_val(j, x).dot(n);
                }
                M(2 * le + mom, j) = acc;
            }
        }
    }
    const Eigen::Matrix<double, 6, 6> C = M.fullPivLu().solve(Eigen::Matrix<double, 6, 6>::Identity());
    for (int i = 0; i < 6; ++i) {
        // column i of C: monomial coefficients of the basis field dual to DOF i
        basis.coeff_const[i] = Vec2(C(0, i), C(1, i));
        Mat2 lin;
        lin << C(2, i), C(4, i), C(3, i), C(5, i);
        basis.coeff_lin[i] = lin;
        basis.divergence[i] = lin.trace();
    }
    return basis;
}

Mat2 piola_contravariant(const PiolaMap& map, const std::function<Mat2(const Vec2&)>& tau,
                         const Vec2& y) {
    const Vec2 x = map.Xinv(y);
    const Mat2 D = map.jacobian(x);
    const double I = D.determinant();
    if (!(I > 0.0))
        throw SolverError("piola transform: non-invertible Jacobian");
    return (1.0 / I) * D * tau(x) * D.transpose();
}

} // namespace ef
