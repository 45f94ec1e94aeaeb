#include "elastiform/shape_gradient.hpp"

#include "elastiform/fem.hpp"
#include "elastiform/quadrature.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>

namespace ef {

namespace {

struct ThetaEval {
    Vec2 val;
    Mat2 grad; // (grad)_ij = d theta_i / d x_j
};

Mat2 n_of(const Mat2& G) { return G + G.transpose() - 0.5 * G.trace() * Mat2::Identity(); }

// Element state of the pure-displacement volumetric integrand.
struct DispState {
    Mat2 Ae;
    Mat2 gradu;
    double energy = 0.0;
};

double disp_vol_integrand(const DispState& st, const ThetaEval& th) {
    const Mat2& G = th.grad;
    const Mat2 m = st.gradu * G + G.transpose() * st.gradu.transpose();
    return (st.Ae.cwiseProduct(m)).sum() - st.energy * G.trace();
}

double f_terms_disp(const AnalyticField& f, const Vec2& x, const Vec2& u, const ThetaEval& th) {
    return 2.0 * ((f.grad(x) * th.val).dot(u) + f.value(x).dot(u) * th.grad.trace());
}

double g_terms_disp(const AnalyticField& g, const Vec2& x, const Vec2& u, const Vec2& n,
                    const ThetaEval& th) {
    const double tang_div = th.grad.trace() - n.dot(th.grad * n);
    return 2.0 * ((g.grad(x) * th.val).dot(u) + g.value(x).dot(u) * tang_div);
}

// Paper-form volumetric integrand for the mixed formulations (both symmetry
// conventions); exercised by the strong/weak equivalence lemma.
double mixed_vol_integrand(const Mat2& sigma, const Vec2& u, double eta_w,
                           const MaterialParams& mat, const AnalyticField& f, const Vec2& x,
                           const ThetaEval& th, bool strong_form) {
    const Mat2 N = n_of(th.grad);
    const double lam = mat.lambda, mu = mat.mu;
    const double ctr = lam / (mu * (2.0 * lam + 2.0 * mu));
    const Mat2 Ns = N * sigma;
    double v;
    if (strong_form) {
        v = (Ns.cwiseProduct(sigma)).sum() / mu;
    } else {
        const Mat2 sN = sigma * N;
        v = ((Ns + sN).cwiseProduct(sigma)).sum() / (2.0 * mu);
        Mat2 eta;
        eta << 0.0, eta_w, -eta_w, 0.0;
        v += ((Ns + sN).cwiseProduct(eta)).sum() / (2.0 * mu);
    }
    v -= ctr * Ns.trace() * sigma.trace();
    if (!f.is_zero)
        v += (f.grad(x) * th.val).dot(u) + f.value(x).dot(u) * th.grad.trace() -
             f.value(x).dot(th.grad.transpose() * u);
    return v;
}

// Discrete-exact volumetric integrand for the weak-symmetry solve on a
// moving mesh. Mesh motion transports each BDM stress row by the vector
// Piola map (coefficients frozen), i.e. sigma -> (1/I) sigma D^T; the full
// tensor Piola of the continuous derivation mixes rows across elements and
// leaves the discrete space. Differentiating the compliance along the
// row-wise path gives, with G = grad(theta):
//   (1/2mu)[2 (sigma G^T):sigma - trG sigma:sigma]
//   - lam/(mu(2lam+2mu)) [(sigma:G) tr(sigma) - (trG/2) tr(sigma)^2]
//   + (1/mu) (sigma G^T):eta
//   + 2 [grad(f) theta . u + f.u trG]
// The eta term is the multiplier's contribution; unlike the paper form it
// does not vanish under the weak-symmetry constraint and is required for
// the finite-difference consistency of the pairing.
double mixed_vol_integrand_discrete(const Mat2& sigma, const Vec2& u, double eta_w,
                                    const MaterialParams& mat, const AnalyticField& f,
                                    const Vec2& x, const ThetaEval& th) {
    const Mat2& G = th.grad;
    const double lam = mat.lambda, mu = mat.mu;
    const double trG = G.trace();
    const Mat2 sGt = sigma * G.transpose();
    double v = (2.0 * (sGt.cwiseProduct(sigma)).sum() - trG * (sigma.cwiseProduct(sigma)).sum()) /
               (2.0 * mu);
    const double sG = (sigma.cwiseProduct(G)).sum();
    const double trs = sigma.trace();
    v -= lam / (mu * (2.0 * lam + 2.0 * mu)) * (sG * trs - 0.5 * trG * trs * trs);
    Mat2 eta;
    eta << 0.0, eta_w, -eta_w, 0.0;
    v += (sGt.cwiseProduct(eta)).sum() / mu;
    if (!f.is_zero)
        v += 2.0 * ((f.grad(x) * th.val).dot(u) + f.value(x).dot(u) * trG);
    return v;
}

std::array<double, 3> hat_values(const Vec2& xhat) {
    return {1.0 - xhat.x() - xhat.y(), xhat.x(), xhat.y()};
}

} // namespace

double GradientFunctional::pair(const std::vector<Vec2>& theta) const {
    double acc = 0.0;
    for (int v = 0; v < mesh->n_vertices(); ++v)
        acc += coeff[2 * v] * theta[v].x() + coeff[2 * v + 1] * theta[v].y();
    return acc;
}

GradientFunctional assemble_dV_volumetric(const Mesh& mesh) {
    GradientFunctional out;
    out.mesh = &mesh;
    out.kind = GradientKind::VolumeVolumetric;
    out.coeff = Eigen::VectorXd::Zero(2 * mesh.n_vertices());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto grads = p1_gradients(mesh, t);
        const double area = mesh.triangle_area(t);
        const auto& tri = mesh.triangles[t];
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 2; ++k)
                out.coeff[2 * tri[i] + k] += area * grads[i][k];
    }
    return out;
}

GradientFunctional assemble_dV_surface(const Mesh& mesh) {
    GradientFunctional out;
    out.mesh = &mesh;
    out.kind = GradientKind::VolumeSurface;
    out.coeff = Eigen::VectorXd::Zero(2 * mesh.n_vertices());
    for (const auto& be : mesh.boundary_edges) {
        if (be.label != BoundaryLabel::Free)
            continue;
        const Vec2 n = mesh.outward_normal(be);
        const double len = mesh.edge_length(be.a, be.b);
        for (int k = 0; k < 2; ++k) {
            out.coeff[2 * be.a + k] += 0.5 * len * n[k];
            out.coeff[2 * be.b + k] += 0.5 * len * n[k];
        }
    }
    return out;
}

GradientFunctional assemble_dJ_surface(const Mesh& mesh, const DisplacementSolution& sol,
                                       const MaterialParams& material) {
    GradientFunctional out;
    out.mesh = &mesh;
    out.kind = GradientKind::ComplianceSurface;
    out.coeff = Eigen::VectorXd::Zero(2 * mesh.n_vertices());
    for (int e = 0; e < mesh.n_edges(); ++e) {
        const EdgeRec& rec = mesh.edges[e];
        if (rec.boundary_index < 0)
            continue;
        const BoundaryEdge& be = mesh.boundary_edges[rec.boundary_index];
        if (be.label != BoundaryLabel::Free)
            continue;
        const Mat2 strain = sol.strain(rec.tri_plus);
        const double density =
            (apply_A(strain, material).cwiseProduct(strain)).sum();
        const Vec2 n = mesh.outward_normal(be);
        const double len = mesh.edge_length(be.a, be.b);
        for (int k = 0; k < 2; ++k) {
            out.coeff[2 * be.a + k] -= 0.5 * len * density * n[k];
            out.coeff[2 * be.b + k] -= 0.5 * len * density * n[k];
        }
    }
    return out;
}

GradientFunctional assemble_dJ_vol_disp(const Mesh& mesh, const DisplacementSolution& sol,
                                        const MaterialParams& material, const LoadSpec& loads,
                                        int quad_order) {
    GradientFunctional out;
    out.mesh = &mesh;
    out.kind = GradientKind::ComplianceVolDisp;
    out.coeff = Eigen::VectorXd::Zero(2 * mesh.n_vertices());
    const auto& q = tri_quadrature(quad_order);

    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        const auto grads = p1_gradients(mesh, t);
        const double area = mesh.triangle_area(t);

        DispState st;
        st.gradu = Mat2::Zero();
        for (int i = 0; i < 3; ++i)
            st.gradu += sol.u[tri[i]] * grads[i].transpose();
        const Mat2 e = 0.5 * (st.gradu + st.gradu.transpose());
        st.Ae = apply_A(e, material);
        st.energy = (st.Ae.cwiseProduct(e)).sum();

        // Velocity dof (vertex i, component k): constant grad e_k grad_hat_i^T.
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 2; ++k) {
                ThetaEval th;
                th.grad = Mat2::Zero();
                th.grad.row(k) = grads[i].transpose();
                th.val = Vec2::Zero(); // value-independent terms first
                double acc = area * disp_vol_integrand(st, th);
                if (!loads.f.is_zero) {
                    const ElementMap em = ElementMap::from_triangle(mesh, t);
                    for (size_t qi = 0; qi < q.points.size(); ++qi) {
                        const auto hats = hat_values(q.points[qi]);
                        const Vec2 x = em.to_physical(q.points[qi]);
                        const Vec2 uq = hats[0] * sol.u[tri[0]] + hats[1] * sol.u[tri[1]] +
                                        hats[2] * sol.u[tri[2]];
                        th.val = hats[i] * Vec2::Unit(k);
                        acc += q.weights[qi] * em.detB * f_terms_disp(loads.f, x, uq, th);
                    }
                }
                out.coeff[2 * tri[i] + k] += acc;
            }
    }

    if (!loads.g.is_zero) {
        const auto& eq = edge_quadrature(4);
        for (int e = 0; e < mesh.n_edges(); ++e) {
            const EdgeRec& rec = mesh.edges[e];
            if (rec.boundary_index < 0)
                continue;
            const BoundaryEdge& be = mesh.boundary_edges[rec.boundary_index];
            if (be.label != BoundaryLabel::Neumann)
                continue;
            const int t = rec.tri_plus;
            const auto& tri = mesh.triangles[t];
            const auto grads = p1_gradients(mesh, t);
            const Vec2 n = mesh.outward_normal(be);
            const Vec2& pa = mesh.vertices[be.a];
            const Vec2& pb = mesh.vertices[be.b];
            const double len = (pb - pa).norm();
            // theta's gradient on the edge is the trace of the adjacent
            // element, so all three of its vertices receive contributions.
            for (int i = 0; i < 3; ++i)
                for (int k = 0; k < 2; ++k) {
                    ThetaEval th;
                    th.grad = Mat2::Zero();
                    th.grad.row(k) = grads[i].transpose();
                    double acc = 0.0;
                    for (size_t qi = 0; qi < eq.points.size(); ++qi) {
                        const double s = eq.points[qi];
                        const Vec2 x = pa + s * (pb - pa);
                        const Vec2 uq = (1.0 - s) * sol.u[be.a] + s * sol.u[be.b];
                        double hat_i = 0.0;
                        if (tri[i] == be.a)
                            hat_i = 1.0 - s;
                        else if (tri[i] == be.b)
                            hat_i = s;
                        th.val = hat_i * Vec2::Unit(k);
                        acc += eq.weights[qi] * len * g_terms_disp(loads.g, x, uq, n, th);
                    }
                    out.coeff[2 * tri[i] + k] += acc;
                }
        }
    }
    return out;
}

GradientFunctional assemble_mixed_gradient_core(const Mesh& mesh, const MaterialParams& material,
                                                const LoadSpec& loads,
                                                const ElementTensorFn& sigma,
                                                const std::vector<Vec2>& u,
                                                const std::vector<double>& eta, bool strong_form,
                                                int quad_order) {
    GradientFunctional out;
    out.mesh = &mesh;
    out.kind = strong_form ? GradientKind::ComplianceVolMixedStrong
                           : GradientKind::ComplianceVolMixedWeak;
    out.coeff = Eigen::VectorXd::Zero(2 * mesh.n_vertices());
    const auto& q = tri_quadrature(quad_order);

    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        const auto grads = p1_gradients(mesh, t);
        const ElementMap em = ElementMap::from_triangle(mesh, t);
        const double eta_w = eta.empty() ? 0.0 : eta[t];

        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 2; ++k) {
                ThetaEval th;
                th.grad = Mat2::Zero();
                th.grad.row(k) = grads[i].transpose();
                double acc = 0.0;
                for (size_t qi = 0; qi < q.points.size(); ++qi) {
                    const auto hats = hat_values(q.points[qi]);
                    const Vec2 x = em.to_physical(q.points[qi]);
                    th.val = hats[i] * Vec2::Unit(k);
                    acc += q.weights[qi] * em.detB *
                           mixed_vol_integrand(sigma(t, x), u[t], eta_w, material, loads.f, x,
                                               th, strong_form);
                }
                out.coeff[2 * tri[i] + k] += acc;
            }
    }
    return out;
}

GradientFunctional assemble_dJ_vol_mixed_weak(const Mesh& mesh, const MixedSolution& sol,
                                              const MaterialParams& material,
                                              const LoadSpec& loads, int quad_order) {
    GradientFunctional out;
    out.mesh = &mesh;
    out.kind = GradientKind::ComplianceVolMixedWeak;
    out.coeff = Eigen::VectorXd::Zero(2 * mesh.n_vertices());
    const auto& q = tri_quadrature(quad_order);

    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        const auto grads = p1_gradients(mesh, t);
        const ElementMap em = ElementMap::from_triangle(mesh, t);
        const Bdm1Basis basis = bdm1_basis(mesh, t);

        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 2; ++k) {
                ThetaEval th;
                th.grad = Mat2::Zero();
                th.grad.row(k) = grads[i].transpose();
                double acc = 0.0;
                for (size_t qi = 0; qi < q.points.size(); ++qi) {
                    const auto hats = hat_values(q.points[qi]);
                    const Vec2 x = em.to_physical(q.points[qi]);
                    th.val = hats[i] * Vec2::Unit(k);
                    acc += q.weights[qi] * em.detB *
                           mixed_vol_integrand_discrete(sol.sigma_at(t, x, basis), sol.u[t],
                                                        sol.eta[t], material, loads.f, x, th);
                }
                out.coeff[2 * tri[i] + k] += acc;
            }
    }
    return out;
}

GradientFunctional assemble_dJ_vol_mixed_strong(const Mesh& mesh, const ElementTensorFn& sigma_sym,
                                                const std::vector<Vec2>& u,
                                                const MaterialParams& material,
                                                const LoadSpec& loads, int quad_order) {
    return assemble_mixed_gradient_core(mesh, material, loads, sigma_sym, u, {}, true,
                                        quad_order);
}

GradientFunctional combine_penalized(const GradientFunctional& dJ, const GradientFunctional& dV,
                                     double gamma) {
    if (dJ.mesh != dV.mesh)
        throw ConfigError("combine_penalized: functionals live on different meshes");
    GradientFunctional out;
    out.mesh = dJ.mesh;
    out.kind = GradientKind::PenalizedL;
    out.coeff = dJ.coeff + gamma * dV.coeff;
    return out;
}

DescentField riesz_descent(const Mesh& mesh, const GradientFunctional& dL) {
    if (dL.mesh != &mesh)
        throw ConfigError("riesz_descent: functional mesh mismatch");
    std::vector<bool> constrained(mesh.n_vertices(), false);
    for (const auto& be : mesh.boundary_edges)
        if (be.label != BoundaryLabel::Free) {
            constrained[be.a] = true;
            constrained[be.b] = true;
        }
    std::vector<int> reduced(2 * mesh.n_vertices(), -1);
    int n_free = 0;
    for (int v = 0; v < mesh.n_vertices(); ++v)
        if (!constrained[v]) {
            reduced[2 * v] = n_free++;
            reduced[2 * v + 1] = n_free++;
        }
    if (n_free == 0)
        throw SolverError("riesz_descent: every vertex is constrained");

    std::vector<Eigen::Triplet<double>> trips;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        const auto grads = p1_gradients(mesh, t);
        const double area = mesh.triangle_area(t);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double stiff = area * grads[i].dot(grads[j]);
                const double mass = area * (i == j ? 1.0 / 6.0 : 1.0 / 12.0);
                for (int k = 0; k < 2; ++k) {
                    const int gi = reduced[2 * tri[i] + k];
                    const int gj = reduced[2 * tri[j] + k];
                    if (gi >= 0 && gj >= 0)
                        trips.emplace_back(gi, gj, stiff + mass);
                }
            }
    }
    Eigen::SparseMatrix<double> K(n_free, n_free);
    K.setFromTriplets(trips.begin(), trips.end());
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_free);
    for (int i = 0; i < 2 * mesh.n_vertices(); ++i)
        if (reduced[i] >= 0)
            rhs[reduced[i]] = -dL.coeff[i];

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(K);
    if (solver.info() != Eigen::Success)
        throw SolverError("riesz_descent: factorization failed");
    const Eigen::VectorXd x = solver.solve(rhs);

    DescentField out;
    out.theta.assign(mesh.n_vertices(), Vec2::Zero());
    for (int v = 0; v < mesh.n_vertices(); ++v)
        for (int k = 0; k < 2; ++k)
            if (reduced[2 * v + k] >= 0)
                out.theta[v][k] = x[reduced[2 * v + k]];
    out.pairing = dL.pair(out.theta);
    out.norm_X = std::sqrt(std::max(0.0, -out.pairing));
    return out;
}

double pair_analytic_dJ_surface(const Mesh& mesh, const DisplacementSolution& sol,
                                const MaterialParams& material, const VelocityField& theta) {
    const auto& eq = edge_quadrature(4);
    double acc = 0.0;
    for (int e = 0; e < mesh.n_edges(); ++e) {
        const EdgeRec& rec = mesh.edges[e];
        if (rec.boundary_index < 0)
            continue;
        const BoundaryEdge& be = mesh.boundary_edges[rec.boundary_index];
        if (be.label != BoundaryLabel::Free)
            continue;
        const Mat2 strain = sol.strain(rec.tri_plus);
        const double density = (apply_A(strain, material).cwiseProduct(strain)).sum();
        const Vec2 n = mesh.outward_normal(be);
        const Vec2& pa = mesh.vertices[be.a];
        const Vec2& pb = mesh.vertices[be.b];
        const double len = (pb - pa).norm();
        for (size_t qi = 0; qi < eq.points.size(); ++qi) {
            const Vec2 x = pa + eq.points[qi] * (pb - pa);
            acc -= eq.weights[qi] * len * density * theta.value(x).dot(n);
        }
    }
    return acc;
}

double pair_analytic_dJ_vol_disp(const Mesh& mesh, const DisplacementSolution& sol,
                                 const MaterialParams& material, const LoadSpec& loads,
                                 const VelocityField& theta, int quad_order) {
    const auto& q = tri_quadrature(quad_order);
    double acc = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        const auto grads = p1_gradients(mesh, t);
        const ElementMap em = ElementMap::from_triangle(mesh, t);

        DispState st;
        st.gradu = Mat2::Zero();
        for (int i = 0; i < 3; ++i)
            st.gradu += sol.u[tri[i]] * grads[i].transpose();
        const Mat2 e = 0.5 * (st.gradu + st.gradu.transpose());
        st.Ae = apply_A(e, material);
        st.energy = (st.Ae.cwiseProduct(e)).sum();

        for (size_t qi = 0; qi < q.points.size(); ++qi) {
            const Vec2 x = em.to_physical(q.points[qi]);
            ThetaEval th{theta.value(x), theta.grad(x)};
            double v = disp_vol_integrand(st, th);
            if (!loads.f.is_zero) {
                const auto hats = hat_values(q.points[qi]);
                const Vec2 uq = hats[0] * sol.u[tri[0]] + hats[1] * sol.u[tri[1]] +
                                hats[2] * sol.u[tri[2]];
                v += f_terms_disp(loads.f, x, uq, th);
            }
            acc += q.weights[qi] * em.detB * v;
        }
    }
    if (!loads.g.is_zero) {
        const auto& eq = edge_quadrature(4);
        for (int e = 0; e < mesh.n_edges(); ++e) {
            const EdgeRec& rec = mesh.edges[e];
            if (rec.boundary_index < 0)
                continue;
            const BoundaryEdge& be = mesh.boundary_edges[rec.boundary_index];
            if (be.label != BoundaryLabel::Neumann)
                continue;
            const Vec2 n = mesh.outward_normal(be);
            const Vec2& pa = mesh.vertices[be.a];
            const Vec2& pb = mesh.vertices[be.b];
            const double len = (pb - pa).norm();
            for (size_t qi = 0; qi < eq.points.size(); ++qi) {
                const double s = eq.points[qi];
                const Vec2 x = pa + s * (pb - pa);
                const Vec2 uq = (1.0 - s) * sol.u[be.a] + s * sol.u[be.b];
                ThetaEval th{theta.value(x), theta.grad(x)};
                acc += eq.weights[qi] * len * g_terms_disp(loads.g, x, uq, n, th);
            }
        }
    }
    return acc;
}

double pair_analytic_dJ_vol_mixed_weak(const Mesh& mesh, const MixedSolution& sol,
                                       const MaterialParams& material, const LoadSpec& loads,
                                       const VelocityField& theta, int quad_order) {
    const auto& q = tri_quadrature(quad_order);
    double acc = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const Bdm1Basis basis = bdm1_basis(mesh, t);
        const ElementMap em = ElementMap::from_triangle(mesh, t);
        for (size_t qi = 0; qi < q.points.size(); ++qi) {
            const Vec2 x = em.to_physical(q.points[qi]);
            ThetaEval th{theta.value(x), theta.grad(x)};
            acc += q.weights[qi] * em.detB *
                   mixed_vol_integrand_discrete(sol.sigma_at(t, x, basis), sol.u[t], sol.eta[t],
                                                material, loads.f, x, th);
        }
    }
    return acc;
}

std::vector<Vec2> interpolate_velocity(const Mesh& mesh, const VelocityField& theta) {
    std::vector<Vec2> out(mesh.n_vertices());
    for (int v = 0; v < mesh.n_vertices(); ++v)
        out[v] = theta.value(mesh.vertices[v]);
    return out;
}

} // namespace ef
