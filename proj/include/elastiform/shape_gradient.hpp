#pragma once

#include "elastiform/loads.hpp"
#include "elastiform/material.hpp"
#include "elastiform/mesh.hpp"
#include "elastiform/solve_displacement.hpp"
#include "elastiform/solve_mixed.hpp"

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace ef {

enum class GradientKind {
    VolumeVolumetric,
    VolumeSurface,
    ComplianceSurface,
    ComplianceVolDisp,
    ComplianceVolMixedStrong,
    ComplianceVolMixedWeak,
    PenalizedL,
};

// A linear functional over the P1 vector velocity space, stored as one
// coefficient per velocity DOF. Pairing with a velocity field is a dot
// product with its vertex values.
struct GradientFunctional {
    const Mesh* mesh = nullptr;
    GradientKind kind = GradientKind::VolumeVolumetric;
    Eigen::VectorXd coeff; // 2 * n_vertices

    double pair(const std::vector<Vec2>& theta) const;
};

// Closed-form velocity field with Jacobian (grad)_ij = d theta_i / d x_j.
struct VelocityField {
    std::function<Vec2(const Vec2&)> value;
    std::function<Mat2(const Vec2&)> grad;
};

// Per-element linear-in-x tensor field, the input shape for the formula-level
// mixed gradient evaluators.
using ElementTensorFn = std::function<Mat2(int t, const Vec2& x)>;

// dV expressions: integral div(theta) over Omega / integral theta.n over Gamma.
GradientFunctional assemble_dV_volumetric(const Mesh& mesh);
GradientFunctional assemble_dV_surface(const Mesh& mesh);

// Surface compliance gradient: -integral_Gamma (2 mu e:e + lambda tr(e)^2) theta.n.
GradientFunctional assemble_dJ_surface(const Mesh& mesh, const DisplacementSolution& sol,
                                       const MaterialParams& material);

// Volumetric compliance gradient, pure displacement form.
GradientFunctional assemble_dJ_vol_disp(const Mesh& mesh, const DisplacementSolution& sol,
                                        const MaterialParams& material, const LoadSpec& loads,
                                        int quad_order = 4);

// Volumetric compliance gradient of the weak-symmetry mixed solve,
// differentiated along the row-wise Piola transport that matches how the
// BDM1 x BDM1 / P0 / P0 spaces actually move with the mesh. The pairing is
// finite-difference consistent with the discrete compliance; the multiplier
// eta contributes a non-vanishing term (see the integrand notes in the
// source and the README).
GradientFunctional assemble_dJ_vol_mixed_weak(const Mesh& mesh, const MixedSolution& sol,
                                              const MaterialParams& material,
                                              const LoadSpec& loads, int quad_order = 4);

// Formula-level evaluators on arbitrary fields (P0 u / P0 skew eta).
// strong_form = true evaluates the strong-symmetry expression
// (1/mu) N sigma : sigma and expects a symmetric sigma input.
GradientFunctional assemble_mixed_gradient_core(const Mesh& mesh, const MaterialParams& material,
                                                const LoadSpec& loads,
                                                const ElementTensorFn& sigma,
                                                const std::vector<Vec2>& u,
                                                const std::vector<double>& eta, bool strong_form,
                                                int quad_order = 4);

// Strong-symmetry expression on an elementwise-symmetrized stress.
GradientFunctional assemble_dJ_vol_mixed_strong(const Mesh& mesh, const ElementTensorFn& sigma_sym,
                                                const std::vector<Vec2>& u,
                                                const MaterialParams& material,
                                                const LoadSpec& loads, int quad_order = 4);

// dJ + gamma dV, coefficientwise. Meshes must match.
GradientFunctional combine_penalized(const GradientFunctional& dJ, const GradientFunctional& dV,
                                     double gamma);

struct DescentField {
    std::vector<Vec2> theta;
    double pairing = 0.0; // <dL, theta> = -|theta|_X^2
    double norm_X = 0.0;
};

// Full-H1 Riesz problem (grad theta : grad dtheta + theta . dtheta) = -<dL, .>
// with theta = 0 on Gamma_D and Gamma_N.
DescentField riesz_descent(const Mesh& mesh, const GradientFunctional& dL);

// Analytic pairings (no velocity interpolation); used by the convergence study.
double pair_analytic_dJ_surface(const Mesh& mesh, const DisplacementSolution& sol,
                                const MaterialParams& material, const VelocityField& theta);
double pair_analytic_dJ_vol_disp(const Mesh& mesh, const DisplacementSolution& sol,
                                 const MaterialParams& material, const LoadSpec& loads,
                                 const VelocityField& theta, int quad_order = 4);
double pair_analytic_dJ_vol_mixed_weak(const Mesh& mesh, const MixedSolution& sol,
                                       const MaterialParams& material, const LoadSpec& loads,
                                       const VelocityField& theta, int quad_order = 4);

// P1 interpolation of a closed-form velocity field at the mesh vertices.
std::vector<Vec2> interpolate_velocity(const Mesh& mesh, const VelocityField& theta);

} // namespace ef
