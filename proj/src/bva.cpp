#include "elastiform/bva.hpp"

#include "elastiform/solve_displacement.hpp"
#include "elastiform/solve_mixed.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>

namespace ef {

void BvaConfig::validate() const {
    if (iterations < 1)
        throw ConfigError("bva: iterations must be >= 1");
    if (!(rho > 1.0))
        throw ConfigError("bva: rho must be > 1");
    if (!(mu0 > 0.0))
        throw ConfigError("bva: mu0 must be > 0");
    if (max_halvings < 0 || max_halvings > 40)
        throw ConfigError("bva: max_halvings must be in 0..40");
    if (!(gamma0 > 0.0))
        throw ConfigError("bva: gamma0 must be > 0");
    if (formulation == Formulation::Mixed && gradient == GradientExpr::Surface)
        throw ConfigError("bva: the surface expression is displacement-only");
}

double update_multiplier(double gamma, double V, double V0, double rho) {
    if (V > V0)
        return gamma * rho;
    if (V < V0)
        return gamma / rho;
    return gamma;
}

LineSearchResult line_search(const Mesh& mesh, const std::vector<Vec2>& theta,
                             const std::function<double(const Mesh&)>& L_eval, double L_current,
                             double mu0, int max_halvings, double validity_threshold) {
    LineSearchResult res;
    double last_valid_mu = 0.0, last_valid_L = 0.0;
    for (int i = 0; i <= max_halvings; ++i) {
        const double mu = mu0 / static_cast<double>(std::int64_t{1} << i);
        const Mesh candidate = deform(mesh, theta, mu);
        if (min_jacobian(candidate) < validity_threshold)
            continue;
        const double L_new = L_eval(candidate);
        if (L_new < L_current) {
            res.step = mu;
            res.accepted = true;
            res.found_valid = true;
            res.L_new = L_new;
            return res;
        }
        last_valid_mu = mu;
        last_valid_L = L_new;
        res.found_valid = true;
    }
    if (res.found_valid) {
        res.step = last_valid_mu;
        res.L_new = last_valid_L;
    }
    return res;
}

namespace {

struct StateEval {
    double J = 0.0;
    GradientFunctional dJ;
};

StateEval eval_state(const BvaConfig& cfg, const Mesh& mesh, const MaterialParams& material,
                     const LoadSpec& loads) {
    StateEval st;
    if (cfg.formulation == Formulation::Displacement) {
        const DisplacementSolution sol = solve_displacement(mesh, material, loads);
        st.J = compliance_displacement(sol).energy;
        if (cfg.gradient == GradientExpr::Surface)
            st.dJ = assemble_dJ_surface(mesh, sol, material);
        else
            st.dJ = assemble_dJ_vol_disp(mesh, sol, material, loads, cfg.quad_order);
    } else {
        const MixedSolution sol = solve_mixed(mesh, material, loads);
        st.J = compliance_mixed(sol);
        st.dJ = assemble_dJ_vol_mixed_weak(mesh, sol, material, loads, cfg.quad_order);
    }
    return st;
}

double eval_J_only(const BvaConfig& cfg, const Mesh& mesh, const MaterialParams& material,
                   const LoadSpec& loads) {
    if (cfg.formulation == Formulation::Displacement)
        return compliance_displacement(solve_displacement(mesh, material, loads)).energy;
    return compliance_mixed(solve_mixed(mesh, material, loads));
}

void snapshot(const BvaConfig& cfg, const Mesh& mesh, const MaterialParams& material,
              const LoadSpec& loads, int iter) {
    if (cfg.vtk_every <= 0 || iter % cfg.vtk_every != 0)
        return;
    VtkField energy;
    energy.kind = VtkField::Kind::CellScalar;
    energy.name = "energy_density";
    if (cfg.formulation == Formulation::Displacement) {
        energy.data = energy_density(solve_displacement(mesh, material, loads));
    } else {
        const MixedSolution sol = solve_mixed(mesh, material, loads);
        energy.data.resize(mesh.n_triangles());
        for (int t = 0; t < mesh.n_triangles(); ++t) {
            const Mat2 s = sol.sigma_at(t, mesh.centroid(t));
            energy.data[t] = (apply_Ainv(s, material).cwiseProduct(s)).sum();
        }
    }
    const std::string path =
        cfg.out_dir + "/run_" + cfg.tag + "_iter" + std::to_string(iter) + ".vtk";
    write_vtk(mesh, {energy}, path);
}

} // namespace

BvaResult run(const BvaConfig& cfg, const Mesh& initial, const MaterialParams& material,
              const LoadSpec& loads) {
    cfg.validate();
    BvaResult result;
    Mesh mesh = initial;
    double gamma = cfg.gamma0;
    const double V0 = cfg.target_volume > 0.0 ? cfg.target_volume : volume(mesh);

    for (int j = 0; j < cfg.iterations; ++j) {
        IterationRecord rec;
        rec.iter = j;
        try {
            const StateEval st = eval_state(cfg, mesh, material, loads);
            rec.J = st.J;
            rec.V = volume(mesh);
            rec.gamma = gamma;
            rec.L = rec.J + gamma * rec.V;
            if (j == 0)
                result.initial_L = rec.L;

            const GradientFunctional dV = cfg.gradient == GradientExpr::Surface
                                              ? assemble_dV_surface(mesh)
                                              : assemble_dV_volumetric(mesh);
            const GradientFunctional dL = combine_penalized(st.dJ, dV, gamma);
            const DescentField theta = riesz_descent(mesh, dL);
            rec.pairing = theta.pairing;

            const double gamma_j = gamma;
            auto L_eval = [&](const Mesh& m) {
                return eval_J_only(cfg, m, material, loads) + gamma_j * volume(m);
            };
            const LineSearchResult ls = line_search(mesh, theta.theta, L_eval, rec.L, cfg.mu0,
                                                    cfg.max_halvings, cfg.validity_threshold);
            snapshot(cfg, mesh, material, loads, j);
            if (!ls.found_valid) {
                // Direction blocked: every candidate violates the validity
                // threshold. The iteration is abandoned (no move) and the run
                // continues for its fixed iteration count.
                rec.step = 0.0;
                rec.accepted = false;
                rec.descent_failed = rec.pairing < 0.0;
                rec.min_jac = min_jacobian(mesh);
            } else {
                rec.step = ls.step;
                rec.accepted = ls.accepted;
                rec.descent_failed = !ls.accepted && rec.pairing < 0.0;
                if (ls.accepted || !cfg.strict_descent) {
                    Mesh moved = deform(mesh, theta.theta, ls.step);
                    rec.min_jac = min_jacobian(moved);
                    mesh = std::move(moved);
                } else {
                    rec.min_jac = min_jacobian(mesh);
                }
            }
            gamma = update_multiplier(gamma, volume(mesh), V0, cfg.rho);
            result.history.push_back(rec);
        } catch (const SolverError& err) {
            result.history.push_back(rec);
            result.failure = err.what();
            break;
        }
    }

    result.completed = result.failure.empty();
    result.final_mesh = mesh;
    if (result.completed) {
        result.final_J = eval_J_only(cfg, mesh, material, loads);
        result.final_V = volume(mesh);
        result.final_L = result.final_J + gamma * result.final_V;
        if (cfg.vtk_every > 0)
            snapshot(cfg, mesh, material, loads, cfg.iterations);
    }
    return result;
}

void write_history_csv(const BvaResult& result, std::uint64_t seed, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("history: cannot open " + path);
    out << "# seed=" << seed << "\n";
    out << "iter,J,V,gamma,L,pairing,step,accepted,min_jac,descent_failed\n";
    char buf[320];
    for (const auto& r : result.history) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%.17g,%d\n",
                      r.iter, r.J, r.V, r.gamma, r.L, r.pairing, r.step, r.accepted ? 1 : 0,
                      r.min_jac, r.descent_failed ? 1 : 0);
        out << buf;
    }
    if (!result.failure.empty())
        out << "# aborted: " << result.failure << "\n";
    if (!out)
        throw IoError("history: write failed for " + path);
}

CompareResult compare_formulations(const BvaConfig& a, const BvaConfig& b, const Mesh& initial,
                                   const MaterialParams& material, const LoadSpec& loads,
                                   const std::string& csv_path) {
    CompareResult cmp;
    cmp.first = run(a, initial, material, loads);
    cmp.second = run(b, initial, material, loads);
    if (cmp.first.completed)
        cmp.cross_final_J_first = compliance_mixed(solve_mixed(cmp.first.final_mesh, material, loads));
    if (cmp.second.completed)
        cmp.cross_final_J_second =
            compliance_mixed(solve_mixed(cmp.second.final_mesh, material, loads));
    if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        if (!out)
            throw IoError("compare: cannot open " + csv_path);
        out << "iter,J_" << a.tag << ",V_" << a.tag << ",L_" << a.tag << ",J_" << b.tag << ",V_"
            << b.tag << ",L_" << b.tag << "\n";
        const size_t n = std::max(cmp.first.history.size(), cmp.second.history.size());
        char buf[320];
        for (size_t i = 0; i < n; ++i) {
            auto row = [&](const BvaResult& r, int field) {
                if (i >= r.history.size())
                    return std::string("nan");
                const auto& h = r.history[i];
                const double v = field == 0 ? h.J : (field == 1 ? h.V : h.L);
                std::snprintf(buf, sizeof(buf), "%.17g", v);
                return std::string(buf);
            };
            out << i << ',' << row(cmp.first, 0) << ',' << row(cmp.first, 1) << ','
                << row(cmp.first, 2) << ',' << row(cmp.second, 0) << ',' << row(cmp.second, 1)
                << ',' << row(cmp.second, 2) << "\n";
        }
    }
    return cmp;
}

} // namespace ef
