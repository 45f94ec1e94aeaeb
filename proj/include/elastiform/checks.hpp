#pragma once

#include "elastiform/config.hpp"
#include "elastiform/shape_gradient.hpp"

#include <string>
#include <vector>

namespace ef {

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0; // measured quantity
    double bound = 0.0; // acceptance bound
};

// Compliance of the given formulation on a mesh (fresh solve).
double compliance_of(Formulation f, const Mesh& mesh, const MaterialParams& material,
                     const LoadSpec& loads);

// Central finite difference of the discrete compliance along theta.
double fd_compliance(Formulation f, const Mesh& mesh, const MaterialParams& material,
                     const LoadSpec& loads, const std::vector<Vec2>& theta, double t);

struct FdProbe {
    double pairing = 0.0;
    double fd = 0.0;       // at step t
    double fd_half = 0.0;  // at step t/2
    double rel_err = 0.0;  // |pairing - fd| / |fd|
    double defect_ratio = 0.0; // |fd - pairing| / |fd_half - pairing|
};

// Assembled volumetric pairing vs FD of the discrete compliance for one field.
FdProbe fd_probe(Formulation f, const Mesh& mesh, const MaterialParams& material,
                 const LoadSpec& loads, const VelocityField& field, double t,
                 int quad_order = 4);

// Individual checks. Each returns one or more named results.
std::vector<CheckResult> check_patch_displacement(double h);
std::vector<CheckResult> check_patch_mixed(double h);
std::vector<CheckResult> check_fd_consistency(const Mesh& mesh, const MaterialParams& material,
                                              const LoadSpec& loads, int n_fields, double t,
                                              int quad_order);
std::vector<CheckResult> check_equivalence(const Mesh& mesh, const MaterialParams& material,
                                           int n_sigma, int n_theta, std::uint64_t seed);
std::vector<CheckResult> check_piola_lemmas();
std::vector<CheckResult> check_volume_identities(const Mesh& mesh);

// Full battery driven by a Setup (used by the CLI check subcommand).
std::vector<CheckResult> run_check_battery(const Setup& setup);

} // namespace ef
