#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "elastiform/bva.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace ef;

namespace {

const MaterialParams kMat = lame_from_young_poisson(1.0, 0.3);

Mesh small_cantilever(double h = 0.3) {
    GeometryConfig cfg;
    cfg.width = 2.0;
    cfg.height = 1.0;
    cfg.h = h;
    cfg.load_fraction = 0.1;
    return build_bulky_cantilever(cfg);
}

LoadSpec tip_load() {
    LoadSpec loads;
    loads.g = AnalyticField::constant(Vec2(0.0, -1.0));
    return loads;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("update_multiplier follows the sign of V - V0") {
    CHECK(update_multiplier(0.1, 50.0, 45.0, 1.1) == doctest::Approx(0.11));
    CHECK(update_multiplier(0.13, 40.0, 40.59, 1.1) == doctest::Approx(0.13 / 1.1));
    CHECK(update_multiplier(0.2, 45.0, 45.0, 1.1) == doctest::Approx(0.2));
}

TEST_CASE("config validation") {
    BvaConfig cfg;
    cfg.iterations = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = BvaConfig{};
    cfg.rho = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = BvaConfig{};
    cfg.mu0 = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = BvaConfig{};
    cfg.formulation = Formulation::Mixed;
    cfg.gradient = GradientExpr::Surface;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("line search") {
    const Mesh mesh = small_cantilever();

    SUBCASE("monotone functional accepts the first step") {
        std::vector<Vec2> theta(mesh.n_vertices(), Vec2::Zero());
        for (int v = 0; v < mesh.n_vertices(); ++v)
            theta[v] = 0.01 * mesh.vertices[v];
        auto L_eval = [](const Mesh& m) { return -volume(m); };
        const LineSearchResult r =
            line_search(mesh, theta, L_eval, -volume(mesh), 0.5, 5, 0.1);
        CHECK(r.found_valid);
        CHECK(r.accepted);
        CHECK(r.step == doctest::Approx(0.5));
    }

    SUBCASE("zero field returns the smallest candidate unaccepted") {
        std::vector<Vec2> zero(mesh.n_vertices(), Vec2::Zero());
        auto L_eval = [](const Mesh& m) { return volume(m); };
        const LineSearchResult r = line_search(mesh, zero, L_eval, volume(mesh), 1.0, 4, 0.1);
        CHECK(r.found_valid);
        CHECK_FALSE(r.accepted);
        CHECK(r.step == doctest::Approx(1.0 / 16.0));
    }

    SUBCASE("collapsing field halves until the mesh is valid") {
        Mesh two;
        two.vertices = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
        two.triangles = {{0, 1, 2}, {1, 3, 2}};
        two.boundary_edges = {{0, 1, BoundaryLabel::Dirichlet},
                              {1, 3, BoundaryLabel::Free},
                              {3, 2, BoundaryLabel::Free},
                              {2, 0, BoundaryLabel::Free}};
        two.finalize();
        std::vector<Vec2> collapse(4, Vec2::Zero());
        collapse[0] = Vec2(2.0, 2.0); // inverts triangle 0 at full step
        auto L_eval = [](const Mesh& m) { return volume(m); }; // shrinks under the move
        const LineSearchResult r =
            line_search(two, collapse, L_eval, volume(two), 1.0, 6, 0.1);
        CHECK(r.found_valid);
        CHECK(r.step <= 0.25);
        CHECK(r.accepted);
    }
}

TEST_CASE("zero-load run keeps J at zero and volume shrinks") {
    const Mesh mesh = small_cantilever();
    BvaConfig cfg;
    cfg.formulation = Formulation::Displacement;
    cfg.gradient = GradientExpr::Volumetric;
    cfg.iterations = 1;
    cfg.gamma0 = 0.1;
    cfg.mu0 = 0.1;
    const BvaResult r = run(cfg, mesh, kMat, LoadSpec{});
    REQUIRE(r.completed);
    REQUIRE(r.history.size() == 1);
    CHECK(r.history[0].J == doctest::Approx(0.0));
    CHECK(r.history[0].pairing <= 0.0);
    CHECK(r.final_J == doctest::Approx(0.0));
}

TEST_CASE("short benchmark run invariants") {
    const Mesh mesh = small_cantilever(0.25);
    BvaConfig cfg;
    cfg.formulation = Formulation::Mixed;
    cfg.gradient = GradientExpr::Volumetric;
    cfg.iterations = 6;
    cfg.gamma0 = 0.15;
    cfg.mu0 = 0.25;
    cfg.max_halvings = 6;
    const BvaResult r = run(cfg, mesh, kMat, tip_load());
    REQUIRE(r.completed);
    REQUIRE(r.history.size() == 6);

    const double V0 = volume(mesh);
    double gamma = cfg.gamma0;
    for (size_t j = 0; j < r.history.size(); ++j) {
        const auto& rec = r.history[j];
        CHECK(rec.pairing <= 1e-15);
        CHECK(rec.gamma == doctest::Approx(gamma).epsilon(1e-12));
        CHECK(rec.L == doctest::Approx(rec.J + rec.gamma * rec.V).epsilon(1e-12));
        if (rec.accepted)
            CHECK(rec.min_jac >= 0.1);
        // replay the multiplier law from the recorded volumes
        if (j + 1 < r.history.size())
            gamma = update_multiplier(gamma, r.history[j + 1].V, V0, cfg.rho);
    }
}

TEST_CASE("surface-gradient run matches volumetric dV on fixed boundaries") {
    const Mesh mesh = small_cantilever(0.25);
    BvaConfig cfg;
    cfg.formulation = Formulation::Displacement;
    cfg.gradient = GradientExpr::Surface;
    cfg.iterations = 3;
    cfg.gamma0 = 0.15;
    cfg.mu0 = 0.25;
    cfg.max_halvings = 6;
    const BvaResult r = run(cfg, mesh, kMat, tip_load());
    CHECK(r.completed);
    CHECK(r.history.size() == 3);
}

TEST_CASE("accepted steps decrease L at the iteration's multiplier") {
    // checkable from the history alone: J_{j+1} + gamma_j V_{j+1} < J_j + gamma_j V_j
    const Mesh mesh = small_cantilever(0.25);
    BvaConfig cfg;
    cfg.formulation = Formulation::Displacement;
    cfg.iterations = 8;
    cfg.gamma0 = 0.15;
    cfg.mu0 = 0.5;
    cfg.max_halvings = 6;
    const BvaResult r = run(cfg, mesh, kMat, tip_load());
    REQUIRE(r.completed);
    for (size_t j = 0; j + 1 < r.history.size(); ++j) {
        const auto& cur = r.history[j];
        const auto& next = r.history[j + 1];
        if (cur.accepted)
            CHECK(next.J + cur.gamma * next.V < cur.J + cur.gamma * cur.V);
    }
}

TEST_CASE("vtk snapshots are written at configured iterations") {
    const Mesh mesh = small_cantilever(0.35);
    BvaConfig cfg;
    cfg.formulation = Formulation::Displacement;
    cfg.iterations = 2;
    cfg.mu0 = 0.2;
    cfg.vtk_every = 1;
    cfg.out_dir = ".";
    cfg.tag = "snaptest";
    const BvaResult r = run(cfg, mesh, kMat, tip_load());
    REQUIRE(r.completed);
    for (int j = 0; j <= 2; ++j) {
        const std::string path = "run_snaptest_iter" + std::to_string(j) + ".vtk";
        std::ifstream in(path);
        INFO(path);
        CHECK(in.good());
        // energy density snapshot: all values finite and nonnegative
        std::string line;
        bool in_celldata = false;
        int count = 0;
        while (std::getline(in, line)) {
            if (line.find("CELL_DATA") == 0) {
                in_celldata = true;
                std::getline(in, line); // SCALARS
                std::getline(in, line); // LOOKUP_TABLE
                continue;
            }
            if (in_celldata) {
                const double v = std::strtod(line.c_str(), nullptr);
                CHECK(v >= 0.0);
                CHECK(std::isfinite(v));
                ++count;
            }
        }
        CHECK(count == mesh.n_triangles());
        std::remove(path.c_str());
    }
}

TEST_CASE("history csv is deterministic and well-formed") {
    const Mesh mesh = small_cantilever(0.3);
    BvaConfig cfg;
    cfg.formulation = Formulation::Mixed;
    cfg.iterations = 4;
    cfg.gamma0 = 0.12;
    cfg.mu0 = 0.25;
    const BvaResult r1 = run(cfg, mesh, kMat, tip_load());
    const BvaResult r2 = run(cfg, mesh, kMat, tip_load());
    write_history_csv(r1, 42, "hist_a.csv");
    write_history_csv(r2, 42, "hist_b.csv");
    const std::string a = slurp("hist_a.csv");
    const std::string b = slurp("hist_b.csv");
    CHECK(a == b);
    CHECK(a.find("# seed=42") == 0);
    CHECK(a.find("iter,J,V,gamma,L,pairing,step,accepted,min_jac,descent_failed") !=
          std::string::npos);
    std::remove("hist_a.csv");
    std::remove("hist_b.csv");
}

TEST_CASE("compare_formulations aligns trajectories") {
    const Mesh mesh = small_cantilever(0.3);
    BvaConfig a;
    a.formulation = Formulation::Mixed;
    a.iterations = 3;
    a.mu0 = 0.25;
    a.tag = "m";
    BvaConfig b = a;
    b.tag = "m2";
    const CompareResult cmp = compare_formulations(a, b, mesh, kMat, tip_load(), "cmp.csv");
    REQUIRE(cmp.first.history.size() == cmp.second.history.size());
    for (size_t i = 0; i < cmp.first.history.size(); ++i) {
        CHECK(cmp.first.history[i].J == doctest::Approx(cmp.second.history[i].J));
        CHECK(cmp.first.history[i].L == doctest::Approx(cmp.second.history[i].L));
    }
    const std::string csv = slurp("cmp.csv");
    CHECK(csv.find("iter,J_m,V_m,L_m,J_m2,V_m2,L_m2") == 0);
    std::remove("cmp.csv");
}
