#pragma once

#include "elastiform/shape_gradient.hpp"

#include <string>
#include <vector>

namespace ef {

struct StudyRow {
    int level = 0;
    int ndof = 0; // velocity-space dimension, 2 * vertices
    double err_surface = 0.0;
    double err_vol_disp = 0.0;
    double err_vol_mixed = 0.0;
};

struct StudyResult {
    std::vector<StudyRow> rows;
    // least-squares slopes of log(err) vs log(ndof)
    double slope_surface = 0.0;
    double slope_vol_disp = 0.0;
    double slope_vol_mixed = 0.0;
};

// Fixed catalog (v1) of smooth polynomial velocity fields vanishing on the
// x = 0 and x = width lines, hence admissible for the cantilever labeling.
std::vector<VelocityField> velocity_catalog(double width, double height);

// Uniform-refinement convergence study of the three compliance-gradient
// expressions. Level i is refine^i(base); the reference is extra_refine
// further refinements past the finest level. Each column is measured against
// its own formulation's reference pairing, sup over the catalog fields.
StudyResult gradient_error_study(const Mesh& base, int levels, int extra_refine,
                                 const MaterialParams& material, const LoadSpec& loads);

void write_study_csv(const StudyResult& result, const std::string& path);

} // namespace ef
