#include "elastiform/study.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace ef {

namespace {

struct Poly {
    std::vector<double> c; // c[0] + c[1] x + ...
    double eval(double x) const {
        double v = 0.0;
        for (size_t i = c.size(); i-- > 0;)
            v = v * x + c[i];
        return v;
    }
    double deriv(double x) const {
        double v = 0.0;
        for (size_t i = c.size(); i-- > 1;)
            v = v * x + c[i] * static_cast<double>(i);
        return v;
    }
};

// Separable component P(x/W) * Q(y/H).
struct Component {
    Poly P, Q;
    double W = 1.0, H = 1.0;
    double value(const Vec2& p) const { return P.eval(p.x() / W) * Q.eval(p.y() / H); }
    double dx(const Vec2& p) const { return P.deriv(p.x() / W) * Q.eval(p.y() / H) / W; }
    double dy(const Vec2& p) const { return P.eval(p.x() / W) * Q.deriv(p.y() / H) / H; }
};

VelocityField make_field(Component cx, Component cy) {
    VelocityField f;
    f.value = [cx, cy](const Vec2& p) { return Vec2(cx.value(p), cy.value(p)); };
    f.grad = [cx, cy](const Vec2& p) {
        Mat2 g;
        g << cx.dx(p), cx.dy(p), cy.dx(p), cy.dy(p);
        return g;
    };
    return f;
}

} // namespace

// Catalog v2. Every field vanishes identically on the x = 0 and x = width
// lines and carries a dominant vertical component, so the reference pairings
// stay well away from zero and the per-field relative errors are
// well-conditioned.
std::vector<VelocityField> velocity_catalog(double width, double height) {
    const Poly p1{{0.0, 4.0, -4.0}};            // 4a(1-a)
    const Poly m_p1{{0.0, -4.0, 4.0}};
    const Poly p2{{0.0, 0.0, 6.75, -6.75}};     // 6.75 a^2 (1-a)
    const Poly m_p2{{0.0, 0.0, -6.75, 6.75}};
    const Poly one{{1.0}};
    const Poly zero{{0.0}};
    const Poly b{{0.0, 1.0}};
    const Poly omb{{1.0, -1.0}};                // 1-b
    const Poly b2{{0.0, 0.0, 1.0}};
    const Poly omb2{{1.0, -2.0, 1.0}};          // (1-b)^2
    const Poly lin{{-1.0, 2.0}};                // 2b-1
    const Poly tilt{{0.25, 0.75}};              // 0.25 + 0.75 b

    auto C = [&](const Poly& P, const Poly& Q) { return Component{P, Q, width, height}; };
    const Component z = C(zero, one);

    std::vector<VelocityField> cat;
    cat.push_back(make_field(z, C(p1, b)));
    cat.push_back(make_field(C(p1, omb), C(p2, b)));
    cat.push_back(make_field(C(p1, b2), C(p1, omb2)));
    cat.push_back(make_field(z, C(p2, b)));
    cat.push_back(make_field(z, C(p1, b2)));
    cat.push_back(make_field(z, C(m_p1, omb)));
    cat.push_back(make_field(C(p2, b), C(p1, b)));
    cat.push_back(make_field(z, C(p1, tilt)));
    cat.push_back(make_field(C(p1, lin), C(p2, b2)));
    cat.push_back(make_field(z, C(m_p2, omb)));
    return cat;
}

StudyResult gradient_error_study(const Mesh& base, int levels, int extra_refine,
                                 const MaterialParams& material, const LoadSpec& loads) {
    if (levels < 1)
        throw ConfigError("study: need at least one level");
    if (extra_refine < 1 && levels > 1)
        throw ConfigError("study: reference is not finer than all levels");

    double width = 0.0, height = 0.0;
    for (const auto& v : base.vertices) {
        width = std::max(width, v.x());
        height = std::max(height, v.y());
    }
    const auto catalog = velocity_catalog(width, height);
    const int nk = static_cast<int>(catalog.size());

    std::vector<Mesh> meshes;
    meshes.push_back(base);
    for (int i = 1; i < levels; ++i)
        meshes.push_back(uniform_refine(meshes.back()));
    Mesh reference = meshes.back();
    for (int i = 0; i < extra_refine; ++i)
        reference = uniform_refine(reference);

    auto pairings = [&](const Mesh& mesh) {
        std::vector<std::array<double, 3>> p(nk);
        const DisplacementSolution disp = solve_displacement(mesh, material, loads);
        const MixedSolution mixed = solve_mixed(mesh, material, loads);
        for (int k = 0; k < nk; ++k) {
            p[k][0] = pair_analytic_dJ_surface(mesh, disp, material, catalog[k]);
            p[k][1] = pair_analytic_dJ_vol_disp(mesh, disp, material, loads, catalog[k]);
            p[k][2] = pair_analytic_dJ_vol_mixed_weak(mesh, mixed, material, loads, catalog[k]);
        }
        return p;
    };

    const auto ref_p = pairings(reference);

    StudyResult result;
    for (int lvl = 0; lvl < levels; ++lvl) {
        const auto p = pairings(meshes[lvl]);
        StudyRow row;
        row.level = lvl;
        row.ndof = 2 * meshes[lvl].n_vertices();
        for (int k = 0; k < nk; ++k)
            for (int c = 0; c < 3; ++c) {
                const double denom = std::abs(ref_p[k][c]);
                const double err = denom > 0.0 ? std::abs(p[k][c] - ref_p[k][c]) / denom
                                               : std::abs(p[k][c] - ref_p[k][c]);
                double& slot = c == 0 ? row.err_surface : (c == 1 ? row.err_vol_disp
                                                                  : row.err_vol_mixed);
                slot = std::max(slot, err);
            }
        result.rows.push_back(row);
    }

    auto slope = [&](auto get) {
        if (result.rows.size() < 2)
            return 0.0;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (const auto& r : result.rows) {
            const double e = get(r);
            if (!(e > 0.0))
                continue;
            const double x = std::log(static_cast<double>(r.ndof));
            const double y = std::log(e);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
            ++n;
        }
        if (n < 2)
            return 0.0;
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    result.slope_surface = slope([](const StudyRow& r) { return r.err_surface; });
    result.slope_vol_disp = slope([](const StudyRow& r) { return r.err_vol_disp; });
    result.slope_vol_mixed = slope([](const StudyRow& r) { return r.err_vol_mixed; });
    return result;
}

void write_study_csv(const StudyResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("study: cannot open " + path);
    out << "level,ndof,err_surface,err_vol_disp,err_vol_mixed\n";
    char buf[160];
    for (const auto& r : result.rows) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%.17g\n", r.level, r.ndof,
                      r.err_surface, r.err_vol_disp, r.err_vol_mixed);
        out << buf;
    }
    if (!out)
        throw IoError("study: write failed for " + path);
}

} // namespace ef
