#pragma once

#include "elastiform/types.hpp"

#include <functional>
#include <utility>

namespace ef {

// Closed-form vector field with an evaluable Jacobian, (grad)_ij = d f_i / d x_j.
// The volumetric gradient expressions need grad f and grad g pointwise.
struct AnalyticField {
    std::function<Vec2(const Vec2&)> value;
    std::function<Mat2(const Vec2&)> grad;

    bool is_zero = false;

    static AnalyticField zero() {
        AnalyticField f;
        f.value = [](const Vec2&) { return Vec2::Zero().eval(); };
        f.grad = [](const Vec2&) { return Mat2::Zero().eval(); };
        f.is_zero = true;
        return f;
    }
    static AnalyticField constant(const Vec2& v) {
        if (v.isZero())
            return zero();
        AnalyticField f;
        f.value = [v](const Vec2&) { return v; };
        f.grad = [](const Vec2&) { return Mat2::Zero().eval(); };
        return f;
    }
    static AnalyticField affine(const Vec2& v0, const Mat2& G) {
        AnalyticField f;
        f.value = [v0, G](const Vec2& x) { return (v0 + G * x).eval(); };
        f.grad = [G](const Vec2&) { return G; };
        return f;
    }
};

struct LoadSpec {
    AnalyticField f = AnalyticField::zero(); // volumetric force
    AnalyticField g = AnalyticField::zero(); // traction on Gamma_N
};

} // namespace ef
