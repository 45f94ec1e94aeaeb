#include "elastiform/checks.hpp"

#include "elastiform/fem.hpp"
#include "elastiform/solve_displacement.hpp"
#include "elastiform/solve_mixed.hpp"
#include "elastiform/study.hpp"

#include <cmath>
#include <random>

namespace ef {

double compliance_of(Formulation f, const Mesh& mesh, const MaterialParams& material,
                     const LoadSpec& loads) {
    if (f == Formulation::Displacement)
        return compliance_displacement(solve_displacement(mesh, material, loads)).energy;
    return compliance_mixed(solve_mixed(mesh, material, loads));
}

double fd_compliance(Formulation f, const Mesh& mesh, const MaterialParams& material,
                     const LoadSpec& loads, const std::vector<Vec2>& theta, double t) {
    const double jp = compliance_of(f, deform(mesh, theta, t), material, loads);
    const double jm = compliance_of(f, deform(mesh, theta, -t), material, loads);
    return (jp - jm) / (2.0 * t);
}

FdProbe fd_probe(Formulation f, const Mesh& mesh, const MaterialParams& material,
                 const LoadSpec& loads, const VelocityField& field, double t, int quad_order) {
    const std::vector<Vec2> theta = interpolate_velocity(mesh, field);
    FdProbe probe;
    if (f == Formulation::Displacement) {
        const DisplacementSolution sol = solve_displacement(mesh, material, loads);
        probe.pairing =
            assemble_dJ_vol_disp(mesh, sol, material, loads, quad_order).pair(theta);
    } else {
        const MixedSolution sol = solve_mixed(mesh, material, loads);
        probe.pairing =
            assemble_dJ_vol_mixed_weak(mesh, sol, material, loads, quad_order).pair(theta);
    }
    probe.fd = fd_compliance(f, mesh, material, loads, theta, t);
    probe.fd_half = fd_compliance(f, mesh, material, loads, theta, 0.5 * t);
    probe.rel_err = std::abs(probe.pairing - probe.fd) / std::abs(probe.fd);
    const double defect_half = std::abs(probe.fd_half - probe.pairing);
    probe.defect_ratio = defect_half > 0.0
                             ? std::abs(probe.fd - probe.pairing) / defect_half
                             : std::numeric_limits<double>::infinity();
    return probe;
}

std::vector<CheckResult> check_patch_displacement(double h) {
    GeometryConfig geo;
    geo.width = 2.0;
    geo.height = 1.0;
    geo.h = h;
    const Mesh mesh = build_bulky_cantilever(geo);

    Mat2 G;
    G << 0.1, 0.2, 0.05, -0.1;
    DirichletSpec dirichlet;
    dirichlet.labels = {BoundaryLabel::Dirichlet, BoundaryLabel::Neumann, BoundaryLabel::Free};
    dirichlet.value = [G](const Vec2& x) { return (G * x).eval(); };

    const MaterialParams mat = lame_from_young_poisson(1.0, 0.3);
    const DisplacementSolution sol = solve_displacement(mesh, mat, LoadSpec{}, dirichlet);
    double err = 0.0;
    for (int v = 0; v < mesh.n_vertices(); ++v)
        err = std::max(err, (sol.u[v] - G * mesh.vertices[v]).norm());
    return {{"patch_displacement_affine", err <= 1e-10, err, 1e-10}};
}

std::vector<CheckResult> check_patch_mixed(double h) {
    GeometryConfig geo;
    geo.width = 2.0;
    geo.height = 1.0;
    geo.h = h;
    Mesh mesh = build_bulky_cantilever(geo);
    for (auto& be : mesh.boundary_edges)
        be.label = BoundaryLabel::Neumann;
    mesh.finalize(false);

    Mat2 sigma_star;
    sigma_star << 1.0, 0.0, 0.0, 0.0;
    const double W = geo.width, H = geo.height;
    AnalyticField g;
    g.value = [sigma_star, W, H](const Vec2& x) {
        Vec2 n(0, 0);
        const double tol = 1e-9;
        if (x.x() < tol)
            n = Vec2(-1, 0);
        else if (x.x() > W - tol)
            n = Vec2(1, 0);
        else if (x.y() < tol)
            n = Vec2(0, -1);
        else if (x.y() > H - tol)
            n = Vec2(0, 1);
        return (sigma_star * n).eval();
    };
    g.grad = [](const Vec2&) { return Mat2::Zero().eval(); };

    LoadSpec loads;
    loads.g = g;
    const MaterialParams mat = lame_from_young_poisson(1.0, 0.3);
    const MixedSolution sol = solve_mixed(mesh, mat, loads);

    double sigma_err = 0.0, eta_max = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const Mat2 s = sol.sigma_at(t, mesh.centroid(t));
        sigma_err = std::max(sigma_err, (s - sigma_star).cwiseAbs().maxCoeff());
        eta_max = std::max(eta_max, std::abs(sol.eta[t]));
    }
    const double defect = symmetry_defect(sol);
    return {
        {"patch_mixed_sigma", sigma_err <= 1e-9, sigma_err, 1e-9},
        {"patch_mixed_eta", eta_max <= 1e-9, eta_max, 1e-9},
        {"patch_mixed_symmetry_defect", defect <= 1e-9, defect, 1e-9},
    };
}

std::vector<CheckResult> check_fd_consistency(const Mesh& mesh, const MaterialParams& material,
                                              const LoadSpec& loads, int n_fields, double t,
                                              int quad_order) {
    double width = 0.0, height = 0.0;
    for (const auto& v : mesh.vertices) {
        width = std::max(width, v.x());
        height = std::max(height, v.y());
    }
    const auto catalog = velocity_catalog(width, height);
    std::vector<CheckResult> out;
    for (Formulation f : {Formulation::Displacement, Formulation::Mixed}) {
        double worst = 0.0, worst_ratio = 4.0;
        bool ratio_ok = true;
        for (int k = 0; k < n_fields && k < static_cast<int>(catalog.size()); ++k) {
            const FdProbe probe = fd_probe(f, mesh, material, loads, catalog[k], t, quad_order);
            worst = std::max(worst, probe.rel_err);
            // O(t^2) decay of the FD defect, measured at steps large enough
            // that truncation dominates solver noise.
            const double d1 = std::abs(
                fd_compliance(f, mesh, material, loads, interpolate_velocity(mesh, catalog[k]),
                              4.0 * t) -
                probe.pairing);
            const double d2 = std::abs(
                fd_compliance(f, mesh, material, loads, interpolate_velocity(mesh, catalog[k]),
                              2.0 * t) -
                probe.pairing);
            if (d1 > 1e-8) {
                const double ratio = d1 / std::max(d2, 1e-300);
                if (ratio < 2.0 || ratio > 8.0) {
                    ratio_ok = false;
                    worst_ratio = ratio;
                }
            }
        }
        const std::string tag = f == Formulation::Displacement ? "disp" : "mixed";
        out.push_back({"fd_rel_err_" + tag, worst <= 1e-2, worst, 1e-2});
        out.push_back({"fd_defect_ratio_" + tag, ratio_ok, worst_ratio, 8.0});
    }
    return out;
}

std::vector<CheckResult> check_equivalence(const Mesh& mesh, const MaterialParams& material,
                                           int n_sigma, int n_theta, std::uint64_t seed) {
    double width = 0.0, height = 0.0;
    for (const auto& v : mesh.vertices) {
        width = std::max(width, v.x());
        height = std::max(height, v.y());
    }
    const auto catalog = velocity_catalog(width, height);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);

    LoadSpec loads;
    loads.f = AnalyticField::affine(Vec2(0.3, -0.2), (Mat2() << 0.1, -0.4, 0.2, 0.3).finished());

    std::vector<std::vector<Vec2>> thetas;
    for (int k = 0; k < n_theta && k < static_cast<int>(catalog.size()); ++k)
        thetas.push_back(interpolate_velocity(mesh, catalog[k]));

    double worst = 0.0;
    for (int s = 0; s < n_sigma; ++s) {
        // Random symmetric linear tensor field per element, shared P0 u.
        std::vector<Mat2> c0(mesh.n_triangles()), cx(mesh.n_triangles()), cy(mesh.n_triangles());
        std::vector<Vec2> u(mesh.n_triangles());
        for (int t = 0; t < mesh.n_triangles(); ++t) {
            auto sym = [&]() {
                Mat2 m;
                const double a = uni(rng), b = uni(rng), c = uni(rng);
                m << a, b, b, c;
                return m;
            };
            c0[t] = sym();
            cx[t] = sym();
            cy[t] = sym();
            u[t] = Vec2(uni(rng), uni(rng));
        }
        ElementTensorFn sigma = [&](int t, const Vec2& x) {
            const Vec2 r = x - mesh.centroid(t);
            return (c0[t] + r.x() * cx[t] + r.y() * cy[t]).eval();
        };
        const GradientFunctional strong =
            assemble_dJ_vol_mixed_strong(mesh, sigma, u, material, loads);
        const GradientFunctional weak = assemble_mixed_gradient_core(
            mesh, material, loads, sigma, u, std::vector<double>(mesh.n_triangles(), 0.0), false);
        for (const auto& th : thetas) {
            const double a = strong.pair(th);
            const double b = weak.pair(th);
            const double denom = std::max({std::abs(a), std::abs(b), 1e-30});
            worst = std::max(worst, std::abs(a - b) / denom);
        }
    }
    return {{"strong_weak_equivalence", worst <= 1e-12, worst, 1e-12}};
}

namespace {

// Quadratic test map with closed-form Jacobian; inverse by Newton.
PiolaMap quadratic_test_map() {
    PiolaMap map;
    map.X = [](const Vec2& x) {
        return Vec2(x.x() + 0.08 * x.x() * x.x() + 0.05 * x.x() * x.y(),
                    x.y() + 0.06 * x.y() * x.y() - 0.04 * x.x() * x.y());
    };
    map.jacobian = [](const Vec2& x) {
        Mat2 D;
        D << 1.0 + 0.16 * x.x() + 0.05 * x.y(), 0.05 * x.x(),
            -0.04 * x.y(), 1.0 + 0.12 * x.y() - 0.04 * x.x();
        return D;
    };
    map.Xinv = [map](const Vec2& y) {
        Vec2 x = y;
        for (int it = 0; it < 50; ++it) {
            const Vec2 r = map.X(x) - y;
            if (r.norm() < 1e-15)
                break;
            x -= map.jacobian(x).inverse() * r;
        }
        return x;
    };
    return map;
}

} // namespace

std::vector<CheckResult> check_piola_lemmas() {
    std::vector<CheckResult> out;

    // Transported strain: u quadratic, X affine. Central differences are
    // exact for quadratics, so the identity holds to roundoff.
    {
        Mat2 B;
        B << 1.2, 0.3, -0.1, 0.9;
        const Vec2 shift(0.4, -0.2);
        auto u = [](const Vec2& x) {
            return Vec2(0.3 * x.x() * x.x() - 0.2 * x.x() * x.y() + 0.5 * x.y(),
                        0.1 * x.y() * x.y() + 0.4 * x.x() * x.y() - 0.3 * x.x());
        };
        auto grad_u = [](const Vec2& x) {
            Mat2 g;
            g << 0.6 * x.x() - 0.2 * x.y(), -0.2 * x.x() + 0.5,
                0.4 * x.y() - 0.3, 0.2 * x.y() + 0.4 * x.x();
            return g;
        };
        const Mat2 Binv = B.inverse();
        auto u_theta = [&](const Vec2& y) { return u(Binv * (y - shift)); };

        const double h = 0.05;
        double err = 0.0;
        const Vec2 samples[4] = {{0.2, 0.3}, {0.7, 0.1}, {0.4, 0.8}, {0.1, 0.1}};
        for (const Vec2& x : samples) {
            const Vec2 y = B * x + shift;
            Mat2 grad_fd;
            for (int j = 0; j < 2; ++j) {
                const Vec2 dy = h * Vec2::Unit(j);
                const Vec2 d = (u_theta(y + dy) - u_theta(y - dy)) / (2.0 * h);
                grad_fd.col(j) = d;
            }
            const Mat2 e_fd = 0.5 * (grad_fd + grad_fd.transpose());
            const Mat2 gu = grad_u(x);
            const Mat2 e_formula = 0.5 * (gu * Binv + Binv.transpose() * gu.transpose());
            err = std::max(err, (e_fd - e_formula).cwiseAbs().maxCoeff());
        }
        out.push_back({"lemma_transported_strain", err <= 1e-12, err, 1e-12});
    }

    // Piola divergence identity, divergence on the image probed by central
    // differences with step 1e-5. The identity as printed needs the map's
    // Hessian contracted against tau to vanish: it holds for any tau under an
    // affine map, and for skew tau under a quadratic map (the Hessian is
    // symmetric in the contracted index pair). Both instances are checked;
    // the solvers only ever move meshes by piecewise-affine maps, where the
    // identity is exact elementwise.
    auto probe_divergence = [](const PiolaMap& map, const std::function<Mat2(const Vec2&)>& tau,
                               const std::function<Vec2(const Vec2&)>& div_tau) {
        const double h = 1e-5;
        double err = 0.0;
        const Vec2 samples[4] = {{0.2, 0.3}, {0.6, 0.2}, {0.3, 0.7}, {0.15, 0.15}};
        for (const Vec2& x : samples) {
            const Vec2 y = map.X(x);
            Vec2 div_fd = Vec2::Zero();
            for (int j = 0; j < 2; ++j) {
                const Vec2 dy = h * Vec2::Unit(j);
                const Mat2 pp = piola_contravariant(map, tau, y + dy);
                const Mat2 pm = piola_contravariant(map, tau, y - dy);
                const Mat2 d = (pp - pm) / (2.0 * h);
                div_fd.x() += d(0, j);
                div_fd.y() += d(1, j);
            }
            const Mat2 D = map.jacobian(x);
            const Vec2 rhs = D * div_tau(x) / D.determinant();
            err = std::max(err, (div_fd - rhs).cwiseAbs().maxCoeff());
        }
        return err;
    };

    auto general_tau = [](const Vec2& x) {
        Mat2 m;
        m << 0.5 * x.x() * x.x() + 0.2 * x.y(), 0.3 * x.x() * x.y() - 0.1,
            0.4 * x.y() * x.y() + 0.1 * x.x(), 0.2 * x.x() * x.x() - 0.3 * x.x() * x.y();
        return m;
    };
    auto general_div = [](const Vec2& x) { return Vec2(1.3 * x.x(), 0.1 - 0.3 * x.x()); };

    {
        PiolaMap affine;
        Mat2 B;
        B << 1.15, 0.25, -0.2, 0.85;
        const Vec2 shift(0.1, -0.3);
        affine.X = [B, shift](const Vec2& x) { return (B * x + shift).eval(); };
        affine.Xinv = [B, shift](const Vec2& y) { return (B.inverse() * (y - shift)).eval(); };
        affine.jacobian = [B](const Vec2&) { return B; };
        const double err = probe_divergence(affine, general_tau, general_div);
        out.push_back({"lemma_piola_divergence_affine", err <= 1e-8, err, 1e-8});
    }
    {
        const PiolaMap map = quadratic_test_map();
        auto skew_tau = [](const Vec2& x) {
            const double w = 0.4 * x.x() * x.x() - 0.3 * x.x() * x.y() + 0.2 * x.y();
            Mat2 m;
            m << 0.0, w, -w, 0.0;
            return m;
        };
        auto skew_div = [](const Vec2& x) {
            const double dwdx = 0.8 * x.x() - 0.3 * x.y();
            const double dwdy = -0.3 * x.x() + 0.2;
            return Vec2(dwdy, -dwdx);
        };
        const double err = probe_divergence(map, skew_tau, skew_div);
        out.push_back({"lemma_piola_divergence_quadratic", err <= 1e-8, err, 1e-8});
    }
    return out;
}

std::vector<CheckResult> check_volume_identities(const Mesh& mesh) {
    std::vector<CheckResult> out;
    const GradientFunctional dVv = assemble_dV_volumetric(mesh);
    const GradientFunctional dVs = assemble_dV_surface(mesh);

    std::vector<Vec2> pos(mesh.n_vertices());
    for (int v = 0; v < mesh.n_vertices(); ++v)
        pos[v] = mesh.vertices[v];
    const double vol = volume(mesh);
    const double err_pos = std::abs(dVv.pair(pos) - 2.0 * vol) / (2.0 * vol);
    out.push_back({"dV_volumetric_position", err_pos <= 1e-12, err_pos, 1e-12});

    double width = 0.0, height = 0.0;
    for (const auto& v : mesh.vertices) {
        width = std::max(width, v.x());
        height = std::max(height, v.y());
    }
    double worst = 0.0;
    for (const auto& field : velocity_catalog(width, height)) {
        const auto theta = interpolate_velocity(mesh, field);
        worst = std::max(worst, std::abs(dVv.pair(theta) - dVs.pair(theta)));
    }
    out.push_back({"dV_volumetric_vs_surface", worst <= 1e-10, worst, 1e-10});
    return out;
}

std::vector<CheckResult> run_check_battery(const Setup& setup) {
    std::vector<CheckResult> all;
    auto append = [&all](std::vector<CheckResult> r) {
        for (auto& c : r)
            all.push_back(std::move(c));
    };

    append(check_patch_displacement(0.3));
    append(check_patch_mixed(0.3));
    append(check_piola_lemmas());

    GeometryConfig geo = setup.geo;
    if (setup.geometry_kind != GeometryKind::Holes6)
        geo.holes = six_hole_layout(geo.width, geo.height,
                                    (40.59 / 45.0) * geo.width * geo.height);
    const Mesh mesh = setup.mesh_file.empty() ? build_holed_cantilever(geo) : build_mesh(setup);

    append(check_volume_identities(mesh));
    append(check_fd_consistency(mesh, setup.material, setup.loads, 5, 1e-3,
                                setup.check_quad_order));
    append(check_equivalence(mesh, setup.material, 20, 5, setup.seed));
    return all;
}

} // namespace ef
