#pragma once

#include "elastiform/loads.hpp"
#include "elastiform/material.hpp"
#include "elastiform/mesh.hpp"
#include "elastiform/shape_gradient.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ef {

enum class Formulation { Displacement, Mixed };
enum class GradientExpr { Surface, Volumetric };

struct BvaConfig {
    Formulation formulation = Formulation::Mixed;
    GradientExpr gradient = GradientExpr::Volumetric;
    int iterations = 30;
    double gamma0 = 0.1;
    double rho = 1.1;        // multiplicative multiplier update, > 1
    double mu0 = 1.0;        // initial line-search step
    int max_halvings = 10;
    double target_volume = -1.0; // < 0: use the initial volume
    bool strict_descent = false; // reject steps that do not decrease L
    double validity_threshold = 0.1; // min area ratio for a valid moved mesh
    int vtk_every = 0;       // 0 disables snapshots
    std::string out_dir = ".";
    std::string tag = "run";
    std::uint64_t seed = 42; // recorded in the history header
    int quad_order = 4;

    void validate() const;
};

struct IterationRecord {
    int iter = 0;
    double J = 0.0;
    double V = 0.0;
    double gamma = 0.0;
    double L = 0.0;
    double pairing = 0.0;
    double step = 0.0;
    bool accepted = false;
    double min_jac = 0.0; // after the step
    bool descent_failed = false; // pairing < 0 but L increased
};

struct BvaResult {
    std::vector<IterationRecord> history;
    Mesh final_mesh;
    bool completed = false;
    std::string failure;
    double initial_L = 0.0;
    double final_L = 0.0;
    double final_J = 0.0;
    double final_V = 0.0;
};

// gamma * rho if V > V0, gamma / rho if V < V0, unchanged if equal.
double update_multiplier(double gamma, double V, double V0, double rho);

struct LineSearchResult {
    double step = 0.0;
    bool accepted = false;   // L decreased at this step
    bool found_valid = false;
    double L_new = 0.0;
};

// Largest step in {mu0, mu0/2, ...} whose moved mesh stays valid and
// decreases L. If none decreases L, the smallest valid candidate is returned
// with accepted = false. found_valid = false means every candidate violated
// the validity threshold; the caller records a zero-step iteration.
LineSearchResult line_search(const Mesh& mesh, const std::vector<Vec2>& theta,
                             const std::function<double(const Mesh&)>& L_eval, double L_current,
                             double mu0, int max_halvings, double validity_threshold);

BvaResult run(const BvaConfig& cfg, const Mesh& initial, const MaterialParams& material,
              const LoadSpec& loads);

void write_history_csv(const BvaResult& result, std::uint64_t seed, const std::string& path);

struct CompareResult {
    BvaResult first;
    BvaResult second;
    // Final compliance of both final shapes measured with one instrument
    // (the dual mixed solve), so the comparison is not skewed by the
    // formulations' opposite discretization biases.
    double cross_final_J_first = 0.0;
    double cross_final_J_second = 0.0;
};

// Runs both configs from the same initial mesh and writes an aligned CSV of
// the J/V/L trajectories.
CompareResult compare_formulations(const BvaConfig& a, const BvaConfig& b, const Mesh& initial,
                                   const MaterialParams& material, const LoadSpec& loads,
                                   const std::string& csv_path = "");

} // namespace ef
