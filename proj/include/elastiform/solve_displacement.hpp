#pragma once

#include "elastiform/loads.hpp"
#include "elastiform/material.hpp"
#include "elastiform/mesh.hpp"

#include <Eigen/Sparse>
#include <functional>
#include <optional>
#include <set>
#include <vector>

namespace ef {

// Essential boundary data for the P1 solve. Default: homogeneous on Gamma_D.
struct DirichletSpec {
    std::set<BoundaryLabel> labels = {BoundaryLabel::Dirichlet};
    std::function<Vec2(const Vec2&)> value; // null means zero

    Vec2 eval(const Vec2& x) const { return value ? value(x) : Vec2::Zero().eval(); }
};

struct DisplacementSystem {
    Eigen::SparseMatrix<double> K; // reduced, SPD
    Eigen::VectorXd rhs;           // reduced
    std::vector<int> free_of_full; // full dof -> reduced index, -1 if constrained
    Eigen::VectorXd full_values;   // Dirichlet values planted, free entries zero
    int n_free = 0;
};

struct DisplacementSolution {
    const Mesh* mesh = nullptr;
    std::vector<Vec2> u; // nodal values
    MaterialParams material;
    LoadSpec loads;
    double residual = 0.0;

    Mat2 strain(int t) const; // constant per element
};

DisplacementSystem assemble_displacement(const Mesh& mesh, const MaterialParams& material,
                                         const LoadSpec& loads,
                                         const DirichletSpec& dirichlet = {});

DisplacementSolution solve_displacement(const Mesh& mesh, const MaterialParams& material,
                                        const LoadSpec& loads,
                                        const DirichletSpec& dirichlet = {});

struct ComplianceValue {
    double energy = 0.0; // integral A e(u) : e(u)
    double work = 0.0;   // integral f.u + boundary integral g.u
};

ComplianceValue compliance_displacement(const DisplacementSolution& sol);

// A e(u) : e(u) per element.
std::vector<double> energy_density(const DisplacementSolution& sol);

} // namespace ef
