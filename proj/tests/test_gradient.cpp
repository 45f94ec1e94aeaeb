#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "elastiform/checks.hpp"
#include "elastiform/study.hpp"

#include <cmath>

using namespace ef;

namespace {

const MaterialParams kMat = lame_from_young_poisson(1.0, 0.3);

Mesh coarse_six_hole() {
    GeometryConfig cfg;
    cfg.width = 10.0;
    cfg.height = 4.5;
    cfg.h = 0.8;
    cfg.holes = six_hole_layout(10.0, 4.5, 40.59);
    return build_holed_cantilever(cfg);
}

Mesh small_cantilever(double h = 0.4) {
    GeometryConfig cfg;
    cfg.width = 2.0;
    cfg.height = 1.0;
    cfg.h = h;
    return build_bulky_cantilever(cfg);
}

LoadSpec tip_load() {
    LoadSpec loads;
    loads.g = AnalyticField::constant(Vec2(0.0, -1.0));
    return loads;
}

} // namespace

TEST_CASE("volume gradient identities") {
    const Mesh mesh = coarse_six_hole();
    for (const auto& r : check_volume_identities(mesh)) {
        INFO(r.name, " value=", r.value);
        CHECK(r.pass);
    }

    const GradientFunctional dVv = assemble_dV_volumetric(mesh);
    std::vector<Vec2> constant(mesh.n_vertices(), Vec2(0.3, -0.8));
    CHECK(std::abs(dVv.pair(constant)) < 1e-12);
    // divergence-free field (x, -y)
    std::vector<Vec2> divfree(mesh.n_vertices());
    for (int v = 0; v < mesh.n_vertices(); ++v)
        divfree[v] = Vec2(mesh.vertices[v].x(), -mesh.vertices[v].y());
    CHECK(std::abs(dVv.pair(divfree)) < 1e-10);
}

TEST_CASE("surface volume gradient on an all-free unit square") {
    Mesh mesh;
    mesh.vertices = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    mesh.triangles = {{0, 1, 2}, {1, 3, 2}};
    mesh.boundary_edges = {{0, 1, BoundaryLabel::Free},
                           {1, 3, BoundaryLabel::Free},
                           {3, 2, BoundaryLabel::Free},
                           {2, 0, BoundaryLabel::Free}};
    mesh.finalize(false);
    const GradientFunctional dVs = assemble_dV_surface(mesh);
    std::vector<Vec2> pos(mesh.n_vertices());
    for (int v = 0; v < mesh.n_vertices(); ++v)
        pos[v] = mesh.vertices[v];
    CHECK(dVs.pair(pos) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("surface compliance gradient basics") {
    const Mesh mesh = small_cantilever();
    SUBCASE("zero displacement gives the zero functional") {
        DisplacementSolution sol;
        sol.mesh = &mesh;
        sol.material = kMat;
        sol.u.assign(mesh.n_vertices(), Vec2::Zero());
        const GradientFunctional dJ = assemble_dJ_surface(mesh, sol, kMat);
        CHECK(dJ.coeff.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    }
    SUBCASE("fields vanishing on Gamma pair to zero, outward fields to < 0") {
        const DisplacementSolution sol = solve_displacement(mesh, kMat, tip_load());
        const GradientFunctional dJ = assemble_dJ_surface(mesh, sol, kMat);

        std::vector<Vec2> interior(mesh.n_vertices(), Vec2::Zero());
        for (int v = 0; v < mesh.n_vertices(); ++v)
            if (!mesh.vertex_on_label(v, BoundaryLabel::Free))
                interior[v] = Vec2(0.5, 0.5);
        CHECK(std::abs(dJ.pair(interior)) < 1e-14);

        // outward normal field on Gamma
        std::vector<Vec2> outward(mesh.n_vertices(), Vec2::Zero());
        for (const auto& be : mesh.boundary_edges) {
            if (be.label != BoundaryLabel::Free)
                continue;
            const Vec2 n = mesh.outward_normal(be);
            outward[be.a] += n;
            outward[be.b] += n;
        }
        CHECK(dJ.pair(outward) < 0.0);
    }
}

TEST_CASE("fd consistency on the coarse six-hole mesh") {
    const Mesh mesh = coarse_six_hole();
    for (const auto& r : check_fd_consistency(mesh, kMat, tip_load(), 5, 1e-3, 4)) {
        INFO(r.name, " value=", r.value, " bound=", r.bound);
        CHECK(r.pass);
    }
}

TEST_CASE("fd consistency with a manufactured volumetric load") {
    const Mesh mesh = small_cantilever(0.3);
    LoadSpec loads;
    loads.f = AnalyticField::affine(Vec2(0.4, -0.6), (Mat2() << 0.2, -0.3, 0.1, 0.5).finished());
    loads.g = AnalyticField::constant(Vec2(0.0, -0.5));
    const auto catalog = velocity_catalog(2.0, 1.0);
    for (Formulation f : {Formulation::Displacement, Formulation::Mixed}) {
        for (int k = 0; k < 3; ++k) {
            const FdProbe probe = fd_probe(f, mesh, kMat, loads, catalog[k], 1e-3);
            INFO("formulation=", f == Formulation::Displacement ? "disp" : "mixed",
                 " field=", k, " pairing=", probe.pairing, " fd=", probe.fd);
            // agreement up to the O(t^2) finite-difference truncation
            CHECK(probe.rel_err < 5e-4);
            CHECK(std::abs(probe.pairing - probe.fd) < 1e-5);
        }
    }
}

TEST_CASE("fd consistency of the traction terms when Gamma_N moves") {
    const Mesh mesh = small_cantilever(0.3);
    LoadSpec loads;
    loads.g = AnalyticField::affine(Vec2(0.3, -0.1),
                                    (Mat2() << 0.1, -0.2, 0.0, 0.4).finished());
    // moves the loaded edge: nonzero on x = W, zero on the clamped x = 0
    VelocityField field;
    field.value = [](const Vec2& p) {
        const double a = p.x() / 2.0;
        return Vec2(0.2 * a * a, 0.3 * a);
    };
    field.grad = [](const Vec2& p) {
        const double a = p.x() / 2.0;
        Mat2 g;
        g << 0.2 * a, 0.0, 0.15, 0.0;
        return g;
    };
    const DisplacementSolution sol = solve_displacement(mesh, kMat, loads);
    const GradientFunctional dJ = assemble_dJ_vol_disp(mesh, sol, kMat, loads);
    const auto theta = interpolate_velocity(mesh, field);
    const double pairing = dJ.pair(theta);
    const double fd = fd_compliance(Formulation::Displacement, mesh, kMat, loads, theta, 1e-3);
    INFO("pairing=", pairing, " fd=", fd);
    CHECK(std::abs(pairing - fd) / std::abs(fd) < 1e-5);
}

TEST_CASE("strong and weak formula evaluators agree on symmetric inputs") {
    const Mesh mesh = small_cantilever(0.35);
    for (const auto& r : check_equivalence(mesh, kMat, 100, 10, 99)) {
        INFO(r.name, " value=", r.value);
        CHECK(r.pass);
    }
}

TEST_CASE("strong-form pairing of a constant stress against theta = x") {
    const Mesh mesh = small_cantilever(0.4);
    ElementTensorFn sigma = [](int, const Vec2&) { return Mat2::Identity().eval(); };
    std::vector<Vec2> u(mesh.n_triangles(), Vec2::Zero());
    const GradientFunctional dJ = assemble_dJ_vol_mixed_strong(mesh, sigma, u, kMat, LoadSpec{});
    std::vector<Vec2> pos(mesh.n_vertices());
    for (int v = 0; v < mesh.n_vertices(); ++v)
        pos[v] = mesh.vertices[v];
    const double lam = kMat.lambda, mu = kMat.mu;
    const double expect =
        volume(mesh) * (2.0 / mu - lam / (mu * (2.0 * lam + 2.0 * mu)) * 4.0);
    CHECK(dJ.pair(pos) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("zero fields give zero functionals") {
    const Mesh mesh = small_cantilever(0.4);
    ElementTensorFn zero_sigma = [](int, const Vec2&) { return Mat2::Zero().eval(); };
    std::vector<Vec2> u(mesh.n_triangles(), Vec2::Zero());
    std::vector<double> eta(mesh.n_triangles(), 0.0);
    const GradientFunctional strong =
        assemble_dJ_vol_mixed_strong(mesh, zero_sigma, u, kMat, LoadSpec{});
    CHECK(strong.coeff.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    const GradientFunctional weak = assemble_mixed_gradient_core(mesh, kMat, LoadSpec{},
                                                                 zero_sigma, u, eta, false);
    CHECK(weak.coeff.cwiseAbs().maxCoeff() == doctest::Approx(0.0));

    // constant theta pairs to zero with f = 0 (translation invariance)
    const MixedSolution sol = solve_mixed(mesh, kMat, tip_load());
    const GradientFunctional dJ = assemble_dJ_vol_mixed_weak(mesh, sol, kMat, tip_load());
    std::vector<Vec2> constant(mesh.n_vertices(), Vec2(0.7, -0.2));
    CHECK(std::abs(dJ.pair(constant)) < 1e-12);
}

TEST_CASE("combine_penalized") {
    const Mesh mesh = small_cantilever();
    const DisplacementSolution sol = solve_displacement(mesh, kMat, tip_load());
    const GradientFunctional dJ = assemble_dJ_vol_disp(mesh, sol, kMat, tip_load());
    const GradientFunctional dV = assemble_dV_volumetric(mesh);

    const GradientFunctional same = combine_penalized(dJ, dV, 0.0);
    CHECK((same.coeff - dJ.coeff).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

    GradientFunctional zero = dJ;
    zero.coeff.setZero();
    const GradientFunctional scaled = combine_penalized(zero, dV, 0.3);
    CHECK((scaled.coeff - 0.3 * dV.coeff).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

    const GradientFunctional dL = combine_penalized(dJ, dV, 0.17);
    const auto catalog = velocity_catalog(2.0, 1.0);
    const auto theta = interpolate_velocity(mesh, catalog[0]);
    CHECK(dL.pair(theta) ==
          doctest::Approx(dJ.pair(theta) + 0.17 * dV.pair(theta)).epsilon(1e-14));

    const Mesh other = small_cantilever(0.5);
    const GradientFunctional dV2 = assemble_dV_volumetric(other);
    CHECK_THROWS_AS(combine_penalized(dJ, dV2, 1.0), ConfigError);
}

TEST_CASE("riesz descent field") {
    const Mesh mesh = small_cantilever(0.3);
    const DisplacementSolution sol = solve_displacement(mesh, kMat, tip_load());
    const GradientFunctional dJ = assemble_dJ_vol_disp(mesh, sol, kMat, tip_load());
    const GradientFunctional dV = assemble_dV_volumetric(mesh);
    const GradientFunctional dL = combine_penalized(dJ, dV, 0.1);

    SUBCASE("zero functional gives the zero field") {
        GradientFunctional zero = dL;
        zero.coeff.setZero();
        const DescentField theta = riesz_descent(mesh, zero);
        for (const auto& v : theta.theta)
            CHECK(v.norm() == doctest::Approx(0.0));
        CHECK(theta.pairing == doctest::Approx(0.0));
    }
    SUBCASE("pairing equals minus the squared X-norm and is negative") {
        const DescentField theta = riesz_descent(mesh, dL);
        CHECK(theta.pairing < 0.0);
        CHECK(theta.pairing == doctest::Approx(-theta.norm_X * theta.norm_X).epsilon(1e-10));
        // boundary constraints: theta = 0 on Gamma_D and Gamma_N
        for (int v = 0; v < mesh.n_vertices(); ++v)
            if (mesh.vertex_on_label(v, BoundaryLabel::Dirichlet) ||
                mesh.vertex_on_label(v, BoundaryLabel::Neumann))
                CHECK(theta.theta[v].norm() == doctest::Approx(0.0));

        // verify the Riesz identity <dL, theta> = -|theta|_X^2 independently
        double h1 = 0.0;
        for (int t = 0; t < mesh.n_triangles(); ++t) {
            const auto grads = p1_gradients(mesh, t);
            const auto& tri = mesh.triangles[t];
            Mat2 G = Mat2::Zero();
            for (int i = 0; i < 3; ++i)
                G += theta.theta[tri[i]] * grads[i].transpose();
            const double area = mesh.triangle_area(t);
            h1 += area * (G.cwiseProduct(G)).sum();
            // consistent P1 mass
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    h1 += area * (i == j ? 1.0 / 6.0 : 1.0 / 12.0) *
                          theta.theta[tri[i]].dot(theta.theta[tri[j]]);
        }
        CHECK(h1 == doctest::Approx(-theta.pairing).epsilon(1e-9));
    }
    SUBCASE("linearity in the functional") {
        const DescentField theta = riesz_descent(mesh, dL);
        GradientFunctional scaled = dL;
        scaled.coeff *= 3.5;
        const DescentField theta2 = riesz_descent(mesh, scaled);
        double worst = 0.0;
        for (int v = 0; v < mesh.n_vertices(); ++v)
            worst = std::max(worst, (theta2.theta[v] - 3.5 * theta.theta[v]).norm());
        CHECK(worst < 1e-11);
    }
}

TEST_CASE("forcing order-1 quadrature degrades the mixed FD check") {
    // The mixed gradient integrands are quadratic; the centroid rule leaves
    // a t-independent quadrature gap, so the pairing error jumps by orders
    // of magnitude and the O(t^2) defect-decay check fails (the defect hits
    // the gap floor). The displacement integrands are element constants and
    // are exact at any order.
    const Mesh mesh = coarse_six_hole();
    const auto low = check_fd_consistency(mesh, kMat, tip_load(), 2, 1e-3, 1);
    const auto ref = check_fd_consistency(mesh, kMat, tip_load(), 2, 1e-3, 4);
    auto value_of = [](const std::vector<CheckResult>& rs, const std::string& name) {
        for (const auto& r : rs)
            if (r.name == name)
                return r;
        return CheckResult{};
    };
    CHECK(value_of(low, "fd_rel_err_disp").pass);
    CHECK(value_of(low, "fd_rel_err_mixed").value >
          100.0 * value_of(ref, "fd_rel_err_mixed").value);
    CHECK_FALSE(value_of(low, "fd_defect_ratio_mixed").pass);
    CHECK(value_of(ref, "fd_defect_ratio_mixed").pass);
}

TEST_CASE("study with reference equal to the level gives zero errors") {
    GeometryConfig cfg;
    cfg.width = 10.0;
    cfg.height = 4.5;
    cfg.h = 1.0;
    cfg.holes = six_hole_layout(10.0, 4.5, 40.59);
    const Mesh base = build_holed_cantilever(cfg);
    const StudyResult r = gradient_error_study(base, 1, 0, kMat, tip_load());
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].err_surface == doctest::Approx(0.0));
    CHECK(r.rows[0].err_vol_disp == doctest::Approx(0.0));
    CHECK(r.rows[0].err_vol_mixed == doctest::Approx(0.0));

    CHECK_THROWS_AS(gradient_error_study(base, 2, 0, kMat, tip_load()), ConfigError);
}
