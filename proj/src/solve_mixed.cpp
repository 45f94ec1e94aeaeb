#include "elastiform/solve_mixed.hpp"

#include "elastiform/quadrature.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <random>

namespace ef {

Mat2 MixedSolution::sigma_at(int t, const Vec2& x, const Bdm1Basis& basis) const {
    const MixedDofMap dm(*mesh);
    Mat2 s = Mat2::Zero();
    for (int le = 0; le < 3; ++le) {
        const int e = mesh->tri_edges[t][le];
        for (int mom = 0; mom < 2; ++mom) {
            const Vec2 w = basis.eval(2 * le + mom, x);
            for (int r = 0; r < 2; ++r)
                s.row(r) += sigma[dm.stress(r, e, mom)] * w.transpose();
        }
    }
    return s;
}

Mat2 MixedSolution::sigma_at(int t, const Vec2& x) const {
    return sigma_at(t, x, bdm1_basis(*mesh, t));
}

std::map<int, double> impose_traction_dofs(const Mesh& mesh, const AnalyticField& g) {
    const MixedDofMap dm(mesh);
    std::map<int, double> fixed;
    const auto& eq = edge_quadrature(4);
    for (int e = 0; e < mesh.n_edges(); ++e) {
        const EdgeRec& rec = mesh.edges[e];
        if (rec.boundary_index < 0)
            continue;
        const BoundaryLabel label = mesh.boundary_edges[rec.boundary_index].label;
        if (label == BoundaryLabel::Dirichlet)
            continue; // natural side in the dual formulation
        double m[2][2] = {{0, 0}, {0, 0}};
        if (label == BoundaryLabel::Neumann && !g.is_zero) {
            const Vec2& a = mesh.vertices[rec.a];
            const Vec2& b = mesh.vertices[rec.b];
            const double len = (b - a).norm();
            for (size_t q = 0; q < eq.points.size(); ++q) {
                const double s = eq.points[q];
                const Vec2 gval = g.value(a + s * (b - a));
                const double w = eq.weights[q] * len;
                for (int r = 0; r < 2; ++r) {
                    m[r][0] += w * gval[r];
                    m[r][1] += w * gval[r] * (s - 0.5);
                }
            }
        }
        for (int r = 0; r < 2; ++r)
            for (int mom = 0; mom < 2; ++mom)
                fixed[dm.stress(r, e, mom)] = m[r][mom];
    }
    return fixed;
}

MixedSystem assemble_mixed(const Mesh& mesh, const MaterialParams& material,
                           const LoadSpec& loads) {
    const MixedDofMap dm(mesh);
    const int n = dm.total();

    auto fixed = impose_traction_dofs(mesh, loads.g);

    bool has_dirichlet = false;
    for (const auto& be : mesh.boundary_edges)
        if (be.label == BoundaryLabel::Dirichlet)
            has_dirichlet = true;
    if (!has_dirichlet) {
        // Pure traction: pin the rigid-motion kernel of the multiplier pair.
        fixed[dm.displacement(0, 0)] = 0.0;
        fixed[dm.displacement(0, 1)] = 0.0;
        fixed[dm.rotation(0)] = 0.0;
    }

    MixedSystem sys;
    sys.free_of_full.assign(n, -1);
    sys.full_values = Eigen::VectorXd::Zero(n);
    for (const auto& [dof, val] : fixed)
        sys.full_values[dof] = val;
    for (int i = 0; i < n; ++i)
        if (!fixed.count(i))
            sys.free_of_full[i] = sys.n_free++;

    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sys.n_free);
    const auto& q2 = tri_quadrature(2);
    const auto& q4 = tri_quadrature(4);
    const double mu = material.mu;
    const double lam = material.lambda;
    const double clam = lam / (2.0 * mu * (2.0 * lam + 2.0 * mu));

    auto scatter = [&](int gi_full, int gj_full, double v) {
        const int gi = sys.free_of_full[gi_full];
        if (gi < 0)
            return; // constrained row: equation dropped
        const int gj = sys.free_of_full[gj_full];
        if (gj >= 0)
            trips.emplace_back(gi, gj, v);
        else
            rhs[gi] -= v * sys.full_values[gj_full];
    };

    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const Bdm1Basis basis = bdm1_basis(mesh, t);
        const ElementMap em = ElementMap::from_triangle(mesh, t);
        const double area = mesh.triangle_area(t);

        int sdof[12]; // (row, local edge, moment)
        for (int r = 0; r < 2; ++r)
            for (int le = 0; le < 3; ++le)
                for (int mom = 0; mom < 2; ++mom)
                    sdof[6 * r + 2 * le + mom] = dm.stress(r, mesh.tri_edges[t][le], mom);

        // A-block: integral A^-1 phi_i : phi_j. phi for dof (r, k): tensor with
        // row r = basis field k. Same-row term from sigma:tau/(2 mu), the
        // lambda part couples rows through the traces.
        double aloc[12][12] = {};
        for (size_t q = 0; q < q2.points.size(); ++q) {
            const Vec2 x = em.to_physical(q2.points[q]);
            const double w = q2.weights[q] * em.detB;
            Vec2 val[6];
            for (int k = 0; k < 6; ++k)
                val[k] = basis.eval(k, x);
            for (int ri = 0; ri < 2; ++ri)
                for (int ki = 0; ki < 6; ++ki)
                    for (int rj = 0; rj < 2; ++rj)
                        for (int kj = 0; kj < 6; ++kj) {
                            double v = 0.0;
                            if (ri == rj)
                                v += val[ki].dot(val[kj]) / (2.0 * mu);
                            v -= clam * val[ki][ri] * val[kj][rj];
                            aloc[6 * ri + ki][6 * rj + kj] += w * v;
                        }
        }
        for (int i = 0; i < 12; ++i)
            for (int j = 0; j < 12; ++j)
                if (aloc[i][j] != 0.0)
                    scatter(sdof[i], sdof[j], aloc[i][j]);

        // B1: integral (div sigma) . delta_u and its transpose.
        for (int r = 0; r < 2; ++r)
            for (int k = 0; k < 6; ++k) {
                const double v = basis.divergence[k] * area;
                const int sd = sdof[6 * r + k];
                const int ud = dm.displacement(t, r);
                scatter(ud, sd, v);
                scatter(sd, ud, v);
            }

        // B2: (1/2mu) integral sigma : delta_eta with delta_eta = J per element.
        // sigma:J = sigma_12 - sigma_21; basis fields are linear, so the
        // centroid value integrates exactly.
        for (int r = 0; r < 2; ++r)
            for (int k = 0; k < 6; ++k) {
                const Vec2 wc = basis.eval(k, basis.centroid);
                const double comp = (r == 0) ? wc.y() : -wc.x();
                const double v = comp * area / (2.0 * mu);
                const int sd = sdof[6 * r + k];
                const int ed = dm.rotation(t);
                scatter(ed, sd, v);
                scatter(sd, ed, v);
            }

        // F(delta_u) = - integral f . delta_u
        if (!loads.f.is_zero) {
            Vec2 fint = Vec2::Zero();
            for (size_t q = 0; q < q4.points.size(); ++q)
                fint += q4.weights[q] * em.detB * loads.f.value(em.to_physical(q4.points[q]));
            for (int r = 0; r < 2; ++r) {
                const int gi = sys.free_of_full[dm.displacement(t, r)];
                if (gi >= 0)
                    rhs[gi] += -fint[r];
            }
        }
    }

    sys.K.resize(sys.n_free, sys.n_free);
    sys.K.setFromTriplets(trips.begin(), trips.end());
    sys.rhs = std::move(rhs);
    return sys;
}

MixedSolution solve_mixed(const Mesh& mesh, const MaterialParams& material,
                          const LoadSpec& loads) {
    MixedSystem sys = assemble_mixed(mesh, material, loads);

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> solver;
    solver.analyzePattern(sys.K);
    solver.factorize(sys.K);
    if (solver.info() != Eigen::Success)
        throw SolverError("mixed solve: factorization failed (n=" + std::to_string(sys.n_free) +
                          "): " + solver.lastErrorMessage());
    const Eigen::VectorXd x = solver.solve(sys.rhs);

    MixedSolution sol;
    sol.mesh = &mesh;
    sol.material = material;
    sol.loads = loads;
    const double rhs_norm = sys.rhs.norm();
    sol.residual = rhs_norm > 0.0 ? (sys.K * x - sys.rhs).norm() / rhs_norm
                                  : (sys.K * x).norm();
    if (sol.residual > 1e-9)
        throw SolverError("mixed solve: residual " + std::to_string(sol.residual) +
                          " exceeds tolerance");

    // One-sample condition estimate: amplification of a fixed random vector.
    {
        std::mt19937_64 rng(12345);
        std::normal_distribution<double> dist;
        Eigen::VectorXd b(sys.n_free);
        for (int i = 0; i < sys.n_free; ++i)
            b[i] = dist(rng);
        const Eigen::VectorXd y = solver.solve(b);
        double row_norm = 0.0;
        for (int k = 0; k < sys.K.outerSize(); ++k) {
            double acc = 0.0;
            for (Eigen::SparseMatrix<double>::InnerIterator it(sys.K, k); it; ++it)
                acc += std::abs(it.value());
            row_norm = std::max(row_norm, acc);
        }
        sol.cond_estimate = row_norm * y.norm() / b.norm();
    }

    const MixedDofMap dm(mesh);
    sol.sigma = Eigen::VectorXd::Zero(4 * mesh.n_edges());
    for (int i = 0; i < 4 * mesh.n_edges(); ++i) {
        const int fi = sys.free_of_full[i];
        sol.sigma[i] = fi >= 0 ? x[fi] : sys.full_values[i];
    }
    sol.u.resize(mesh.n_triangles());
    sol.eta.resize(mesh.n_triangles());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        for (int r = 0; r < 2; ++r) {
            const int dof = dm.displacement(t, r);
            const int fi = sys.free_of_full[dof];
            sol.u[t][r] = fi >= 0 ? x[fi] : sys.full_values[dof];
        }
        const int dof = dm.rotation(t);
        const int fi = sys.free_of_full[dof];
        sol.eta[t] = fi >= 0 ? x[fi] : sys.full_values[dof];
    }
    return sol;
}

double compliance_mixed(const MixedSolution& sol) {
    const Mesh& mesh = *sol.mesh;
    const auto& q2 = tri_quadrature(2);
    double acc = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const Bdm1Basis basis = bdm1_basis(mesh, t);
        const ElementMap em = ElementMap::from_triangle(mesh, t);
        for (size_t q = 0; q < q2.points.size(); ++q) {
            const Vec2 x = em.to_physical(q2.points[q]);
            const Mat2 s = sol.sigma_at(t, x, basis);
            acc += q2.weights[q] * em.detB *
                   (apply_Ainv(s, sol.material).cwiseProduct(s)).sum();
        }
    }
    return acc;
}

double symmetry_defect(const MixedSolution& sol) {
    const Mesh& mesh = *sol.mesh;
    const auto& q2 = tri_quadrature(2);
    double acc = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const Bdm1Basis basis = bdm1_basis(mesh, t);
        const ElementMap em = ElementMap::from_triangle(mesh, t);
        for (size_t q = 0; q < q2.points.size(); ++q) {
            const Vec2 x = em.to_physical(q2.points[q]);
            const Mat2 s = sol.sigma_at(t, x, basis);
            const double d = s(0, 1) - s(1, 0);
            acc += q2.weights[q] * em.detB * d * d;
        }
    }
    return std::sqrt(acc);
}

double momentum_residual(const MixedSolution& sol) {
    const Mesh& mesh = *sol.mesh;
    const MixedDofMap dm(mesh);
    const auto& q4 = tri_quadrature(4);
    double worst = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const Bdm1Basis basis = bdm1_basis(mesh, t);
        const ElementMap em = ElementMap::from_triangle(mesh, t);
        const double area = mesh.triangle_area(t);
        Vec2 div = Vec2::Zero();
        for (int r = 0; r < 2; ++r)
            for (int le = 0; le < 3; ++le)
                for (int mom = 0; mom < 2; ++mom)
                    div[r] += sol.sigma[dm.stress(r, mesh.tri_edges[t][le], mom)] *
                              basis.divergence[2 * le + mom];
        Vec2 fint = Vec2::Zero();
        if (!sol.loads.f.is_zero)
            for (size_t q = 0; q < q4.points.size(); ++q)
                fint += q4.weights[q] * em.detB * sol.loads.f.value(em.to_physical(q4.points[q]));
        worst = std::max(worst, (div * area + fint).cwiseAbs().maxCoeff());
    }
    return worst;
}

double weak_symmetry_residual(const MixedSolution& sol) {
    const Mesh& mesh = *sol.mesh;
    double worst = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const Bdm1Basis basis = bdm1_basis(mesh, t);
        const Mat2 s = sol.sigma_at(t, basis.centroid, basis);
        worst = std::max(worst, std::abs((s(0, 1) - s(1, 0)) * mesh.triangle_area(t)));
    }
    return worst;
}

} // namespace ef
