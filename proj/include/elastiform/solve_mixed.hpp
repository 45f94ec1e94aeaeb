#pragma once

#include "elastiform/fem.hpp"
#include "elastiform/loads.hpp"
#include "elastiform/material.hpp"
#include "elastiform/mesh.hpp"

#include <Eigen/Sparse>
#include <map>
#include <vector>

namespace ef {

// BDM1 x BDM1 / P0 / P0 weak-symmetry saddle problem. The stress rows carry
// essential data: edge moments of g on Gamma_N, zero moments on Gamma.
struct MixedSolution {
    const Mesh* mesh = nullptr;
    Eigen::VectorXd sigma;      // 4 * n_edges coefficients (MixedDofMap::stress layout)
    std::vector<Vec2> u;        // P0 displacement per triangle
    std::vector<double> eta;    // P0 rotation multiplier, eta = [[0,w],[-w,0]]
    MaterialParams material;
    LoadSpec loads;
    double residual = 0.0;
    double cond_estimate = 0.0; // crude lower bound, logged for diagnostics

    Mat2 sigma_at(int t, const Vec2& x, const Bdm1Basis& basis) const;
    Mat2 sigma_at(int t, const Vec2& x) const;
};

// Fixed stress DOF assignments: edge moments of g on Gamma_N, zero on Gamma.
// Keys follow MixedDofMap::stress.
std::map<int, double> impose_traction_dofs(const Mesh& mesh, const AnalyticField& g);

struct MixedSystem {
    Eigen::SparseMatrix<double> K; // reduced saddle matrix
    Eigen::VectorXd rhs;
    std::vector<int> free_of_full;
    Eigen::VectorXd full_values;
    int n_free = 0;
};

MixedSystem assemble_mixed(const Mesh& mesh, const MaterialParams& material,
                           const LoadSpec& loads);

MixedSolution solve_mixed(const Mesh& mesh, const MaterialParams& material,
                          const LoadSpec& loads);

// integral A^-1 sigma : sigma (order-2 quadrature, exact for BDM1).
double compliance_mixed(const MixedSolution& sol);

// L2 norm of sigma_12 - sigma_21 over the domain.
double symmetry_defect(const MixedSolution& sol);

// max over elements of | integral (div sigma + f) . e_r |, r = 1,2.
double momentum_residual(const MixedSolution& sol);

// max over elements of | integral sigma : J | with J = [[0,1],[-1,0]].
double weak_symmetry_residual(const MixedSolution& sol);

} // namespace ef
