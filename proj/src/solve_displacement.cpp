#include "elastiform/solve_displacement.hpp"

#include "elastiform/fem.hpp"
#include "elastiform/quadrature.hpp"

#include <Eigen/SparseCholesky>

namespace ef {

Mat2 DisplacementSolution::strain(int t) const {
    const auto grads = p1_gradients(*mesh, t);
    const auto& tri = mesh->triangles[t];
    Mat2 g = Mat2::Zero();
    for (int i = 0; i < 3; ++i)
        g += u[tri[i]] * grads[i].transpose();
    return 0.5 * (g + g.transpose());
}

DisplacementSystem assemble_displacement(const Mesh& mesh, const MaterialParams& material,
                                         const LoadSpec& loads, const DirichletSpec& dirichlet) {
    const int n = 2 * mesh.n_vertices();

    std::vector<bool> constrained(mesh.n_vertices(), false);
    for (const auto& be : mesh.boundary_edges)
        if (dirichlet.labels.count(be.label)) {
            constrained[be.a] = true;
            constrained[be.b] = true;
        }
    bool any = false;
    for (bool c : constrained)
        any = any || c;
    if (!any)
        throw SolverError("displacement solve: Gamma_D is empty, operator singular");

    DisplacementSystem sys;
    sys.free_of_full.assign(n, -1);
    sys.full_values = Eigen::VectorXd::Zero(n);
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        if (constrained[v]) {
            const Vec2 val = dirichlet.eval(mesh.vertices[v]);
            sys.full_values[2 * v] = val.x();
            sys.full_values[2 * v + 1] = val.y();
        } else {
            sys.free_of_full[2 * v] = sys.n_free++;
            sys.free_of_full[2 * v + 1] = sys.n_free++;
        }
    }

    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sys.n_free);
    const auto& q2 = tri_quadrature(2);

    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        const double area = mesh.triangle_area(t);
        const auto strains = p1_strain_matrices(mesh, t);

        double ke[6][6];
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
                ke[i][j] = area * (apply_A(strains[i], material).cwiseProduct(strains[j])).sum();

        double fe[6] = {0, 0, 0, 0, 0, 0};
        if (!loads.f.is_zero) {
            const ElementMap em = ElementMap::from_triangle(mesh, t);
            for (size_t q = 0; q < q2.points.size(); ++q) {
                const Vec2 x = em.to_physical(q2.points[q]);
                const double w = q2.weights[q] * em.detB;
                const Vec2 fval = loads.f.value(x);
                const double hat[3] = {1.0 - q2.points[q].x() - q2.points[q].y(),
                                       q2.points[q].x(), q2.points[q].y()};
                for (int i = 0; i < 3; ++i) {
                    fe[2 * i] += w * hat[i] * fval.x();
                    fe[2 * i + 1] += w * hat[i] * fval.y();
                }
            }
        }

        int dof[6];
        for (int i = 0; i < 3; ++i) {
            dof[2 * i] = 2 * tri[i];
            dof[2 * i + 1] = 2 * tri[i] + 1;
        }
        for (int i = 0; i < 6; ++i) {
            const int gi = sys.free_of_full[dof[i]];
            if (gi < 0)
                continue;
            rhs[gi] += fe[i];
            for (int j = 0; j < 6; ++j) {
                const int gj = sys.free_of_full[dof[j]];
                if (gj >= 0)
                    trips.emplace_back(gi, gj, ke[i][j]);
                else
                    rhs[gi] -= ke[i][j] * sys.full_values[dof[j]];
            }
        }
    }

    if (!loads.g.is_zero) {
        const auto& eq = edge_quadrature(4);
        for (const auto& be : mesh.boundary_edges) {
            if (be.label != BoundaryLabel::Neumann)
                continue;
            const Vec2& a = mesh.vertices[be.a];
            const Vec2& b = mesh.vertices[be.b];
            const double len = (b - a).norm();
            for (size_t q = 0; q < eq.points.size(); ++q) {
                const double s = eq.points[q];
                const Vec2 x = a + s * (b - a);
                const double w = eq.weights[q] * len;
                const Vec2 gval = loads.g.value(x);
                const int dofs[2] = {be.a, be.b};
                const double hat[2] = {1.0 - s, s};
                for (int i = 0; i < 2; ++i) {
                    const int gx = sys.free_of_full[2 * dofs[i]];
                    const int gy = sys.free_of_full[2 * dofs[i] + 1];
                    if (gx >= 0)
                        rhs[gx] += w * hat[i] * gval.x();
                    if (gy >= 0)
                        rhs[gy] += w * hat[i] * gval.y();
                }
            }
        }
    }

    sys.K.resize(sys.n_free, sys.n_free);
    sys.K.setFromTriplets(trips.begin(), trips.end());
    sys.rhs = std::move(rhs);
    return sys;
}

DisplacementSolution solve_displacement(const Mesh& mesh, const MaterialParams& material,
                                        const LoadSpec& loads, const DirichletSpec& dirichlet) {
    DisplacementSystem sys = assemble_displacement(mesh, material, loads, dirichlet);

    Eigen::VectorXd x = Eigen::VectorXd::Zero(sys.n_free);
    if (sys.n_free > 0) {
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
        solver.compute(sys.K);
        if (solver.info() != Eigen::Success)
            throw SolverError("displacement solve: factorization failed (n=" +
                              std::to_string(sys.n_free) + ")");
        x = solver.solve(sys.rhs);
        if (solver.info() != Eigen::Success)
            throw SolverError("displacement solve: back substitution failed");
    }

    DisplacementSolution sol;
    sol.mesh = &mesh;
    sol.material = material;
    sol.loads = loads;
    const double rhs_norm = sys.rhs.norm();
    sol.residual = rhs_norm > 0.0 ? (sys.K * x - sys.rhs).norm() / rhs_norm
                                  : (sys.K * x).norm();
    if (sol.residual > 1e-10)
        throw SolverError("displacement solve: residual " + std::to_string(sol.residual) +
                          " exceeds tolerance");

    sol.u.resize(mesh.n_vertices());
    for (int v = 0; v < mesh.n_vertices(); ++v)
        for (int k = 0; k < 2; ++k) {
            const int fi = sys.free_of_full[2 * v + k];
            sol.u[v][k] = fi >= 0 ? x[fi] : sys.full_values[2 * v + k];
        }
    return sol;
}

ComplianceValue compliance_displacement(const DisplacementSolution& sol) {
    const Mesh& mesh = *sol.mesh;
    ComplianceValue c;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const Mat2 e = sol.strain(t);
        c.energy += mesh.triangle_area(t) * (apply_A(e, sol.material).cwiseProduct(e)).sum();
    }
    if (!sol.loads.f.is_zero) {
        const auto& q2 = tri_quadrature(2);
        for (int t = 0; t < mesh.n_triangles(); ++t) {
            const ElementMap em = ElementMap::from_triangle(mesh, t);
            const auto& tri = mesh.triangles[t];
            for (size_t q = 0; q < q2.points.size(); ++q) {
                const Vec2 xh = q2.points[q];
                const Vec2 x = em.to_physical(xh);
                const Vec2 uq = (1.0 - xh.x() - xh.y()) * sol.u[tri[0]] +
                                xh.x() * sol.u[tri[1]] + xh.y() * sol.u[tri[2]];
                c.work += q2.weights[q] * em.detB * sol.loads.f.value(x).dot(uq);
            }
        }
    }
    if (!sol.loads.g.is_zero) {
        const auto& eq = edge_quadrature(4);
        for (const auto& be : mesh.boundary_edges) {
            if (be.label != BoundaryLabel::Neumann)
                continue;
            const Vec2& a = mesh.vertices[be.a];
            const Vec2& b = mesh.vertices[be.b];
            const double len = (b - a).norm();
            for (size_t q = 0; q < eq.points.size(); ++q) {
                const double s = eq.points[q];
                const Vec2 x = a + s * (b - a);
                const Vec2 uq = (1.0 - s) * sol.u[be.a] + s * sol.u[be.b];
                c.work += eq.weights[q] * len * sol.loads.g.value(x).dot(uq);
            }
        }
    }
    return c;
}

std::vector<double> energy_density(const DisplacementSolution& sol) {
    const Mesh& mesh = *sol.mesh;
    std::vector<double> density(mesh.n_triangles());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const Mat2 e = sol.strain(t);
        density[t] = (apply_A(e, sol.material).cwiseProduct(e)).sum();
    }
    return density;
}

} // namespace ef
