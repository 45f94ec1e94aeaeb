#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "elastiform/checks.hpp"
#include "elastiform/solve_displacement.hpp"

#include <cmath>

using namespace ef;

namespace {

Mesh small_cantilever(double h = 0.4) {
    GeometryConfig cfg;
    cfg.width = 2.0;
    cfg.height = 1.0;
    cfg.h = h;
    return build_bulky_cantilever(cfg);
}

const MaterialParams kMat = lame_from_young_poisson(1.0, 0.3);

} // namespace

TEST_CASE("zero loads give the zero solution") {
    const Mesh mesh = small_cantilever();
    const DisplacementSolution sol = solve_displacement(mesh, kMat, LoadSpec{});
    for (const auto& u : sol.u)
        CHECK(u.norm() == doctest::Approx(0.0));
    CHECK(compliance_displacement(sol).energy == doctest::Approx(0.0));
    for (double e : energy_density(sol))
        CHECK(e == doctest::Approx(0.0));
}

TEST_CASE("empty Dirichlet boundary is rejected") {
    Mesh mesh = small_cantilever();
    for (auto& be : mesh.boundary_edges)
        be.label = BoundaryLabel::Free;
    mesh.finalize(false);
    CHECK_THROWS_AS(solve_displacement(mesh, kMat, LoadSpec{}), SolverError);
}

TEST_CASE("traction right side is edge-lumped for constant g") {
    const Mesh mesh = small_cantilever(0.25);
    LoadSpec loads;
    loads.g = AnalyticField::constant(Vec2(0.0, -1.0));
    const DisplacementSystem sys = assemble_displacement(mesh, kMat, loads);

    // expected: per Gamma_N vertex, y-load = -(sum of adjacent N edge lengths)/2
    std::vector<double> expect(mesh.n_vertices(), 0.0);
    for (const auto& be : mesh.boundary_edges)
        if (be.label == BoundaryLabel::Neumann) {
            const double l = mesh.edge_length(be.a, be.b);
            expect[be.a] -= 0.5 * l;
            expect[be.b] -= 0.5 * l;
        }
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        const int fy = sys.free_of_full[2 * v + 1];
        if (fy < 0)
            continue;
        CHECK(sys.rhs[fy] == doctest::Approx(expect[v]).epsilon(1e-13));
        const int fx = sys.free_of_full[2 * v];
        if (fx >= 0)
            CHECK(sys.rhs[fx] == doctest::Approx(0.0));
    }
}

TEST_CASE("patch test: affine Dirichlet data reproduced to 1e-10") {
    for (const auto& r : check_patch_displacement(0.3)) {
        INFO(r.name, " value=", r.value);
        CHECK(r.pass);
    }
}

TEST_CASE("all-vertex Dirichlet produces an empty reduced system") {
    Mesh mesh;
    mesh.vertices = {{0, 0}, {1, 0}, {0, 1}};
    mesh.triangles = {{0, 1, 2}};
    mesh.boundary_edges = {{0, 1, BoundaryLabel::Dirichlet},
                           {1, 2, BoundaryLabel::Dirichlet},
                           {2, 0, BoundaryLabel::Dirichlet}};
    mesh.finalize();
    const DisplacementSystem sys = assemble_displacement(mesh, kMat, LoadSpec{});
    CHECK(sys.n_free == 0);
    const DisplacementSolution sol = solve_displacement(mesh, kMat, LoadSpec{});
    for (const auto& u : sol.u)
        CHECK(u.norm() == doctest::Approx(0.0));
}

TEST_CASE("galerkin identity: energy equals work") {
    // u* = G x with G chosen so u* = 0 on the clamped edge x = 0;
    // tractions sigma(u*) n on the rest of the boundary
    Mat2 G;
    G << 0.1, 0.0, 0.05, 0.0;
    Mesh mesh = small_cantilever(0.3);
    for (auto& be : mesh.boundary_edges)
        if (be.label != BoundaryLabel::Dirichlet)
            be.label = BoundaryLabel::Neumann;
    mesh.finalize();

    const Mat2 e_star = 0.5 * (G + G.transpose());
    const Mat2 sigma_star = apply_A(e_star, kMat);
    const double W = 2.0, H = 1.0;
    AnalyticField g;
    g.value = [sigma_star, W, H](const Vec2& x) {
        Vec2 n(0, 0);
        const double tol = 1e-9;
        if (x.x() > W - tol)
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

    const DisplacementSolution sol = solve_displacement(mesh, kMat, loads);
    // affine exact solution reproduced
    double err = 0.0;
    for (int v = 0; v < mesh.n_vertices(); ++v)
        err = std::max(err, (sol.u[v] - G * mesh.vertices[v]).norm());
    CHECK(err < 1e-10);

    const ComplianceValue c = compliance_displacement(sol);
    CHECK(c.energy == doctest::Approx(c.work).epsilon(1e-10));
    CHECK(c.energy > 0.0);
}

TEST_CASE("cantilever tip moves down under a downward load") {
    GeometryConfig cfg;
    cfg.width = 10.0;
    cfg.height = 4.5;
    cfg.h = 0.6;
    const Mesh mesh = build_bulky_cantilever(cfg);
    LoadSpec loads;
    loads.g = AnalyticField::constant(Vec2(0.0, -1.0));
    const DisplacementSolution sol = solve_displacement(mesh, kMat, loads);

    double tip_uy = 0.0;
    for (const auto& be : mesh.boundary_edges)
        if (be.label == BoundaryLabel::Neumann)
            tip_uy = std::min(tip_uy, std::min(sol.u[be.a].y(), sol.u[be.b].y()));
    CHECK(tip_uy < 0.0);

    const ComplianceValue c = compliance_displacement(sol);
    CHECK(c.energy == doctest::Approx(c.work).epsilon(1e-9));

    // quadratic homogeneity in the load
    LoadSpec doubled;
    doubled.g = AnalyticField::constant(Vec2(0.0, -2.0));
    const DisplacementSolution sol2 = solve_displacement(mesh, kMat, doubled);
    CHECK(compliance_displacement(sol2).energy ==
          doctest::Approx(4.0 * c.energy).epsilon(1e-9));
}

TEST_CASE("energy density of a uniform stretch") {
    // u = (x, 0) with lambda = 0: A e : e = 2 mu per element
    const MaterialParams m0 = MaterialParams::from_lame(0.0, 0.5);
    Mesh mesh = small_cantilever(0.4);
    DirichletSpec all;
    all.labels = {BoundaryLabel::Dirichlet, BoundaryLabel::Neumann, BoundaryLabel::Free};
    all.value = [](const Vec2& x) { return Vec2(x.x(), 0.0); };
    const DisplacementSolution sol = solve_displacement(mesh, m0, LoadSpec{}, all);
    for (double e : energy_density(sol))
        CHECK(e == doctest::Approx(2.0 * 0.5).epsilon(1e-10));
}

TEST_CASE("compliance converges under refinement") {
    GeometryConfig cfg;
    cfg.width = 10.0;
    cfg.height = 4.5;
    cfg.h = 1.0;
    Mesh m0 = build_bulky_cantilever(cfg);
    LoadSpec loads;
    loads.g = AnalyticField::constant(Vec2(0.0, -1.0));

    const Mesh m1 = uniform_refine(m0);
    const Mesh m2 = uniform_refine(m1);
    const Mesh m3 = uniform_refine(m2);
    const double j0 = compliance_displacement(solve_displacement(m0, kMat, loads)).energy;
    const double j1 = compliance_displacement(solve_displacement(m1, kMat, loads)).energy;
    const double j2 = compliance_displacement(solve_displacement(m2, kMat, loads)).energy;
    const double j3 = compliance_displacement(solve_displacement(m3, kMat, loads)).energy;
    // successive differences shrink by at least 2x past the second refinement
    const double d1 = std::abs(j1 - j0);
    const double d2 = std::abs(j2 - j1);
    const double d3 = std::abs(j3 - j2);
    CHECK(d2 < d1);
    CHECK(d3 * 2.0 <= d2);
}
