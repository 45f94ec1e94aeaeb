#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "elastiform/material.hpp"

#include <random>

using namespace ef;

TEST_CASE("plane strain conversion") {
    SUBCASE("nu = 0 forces lambda = 0") {
        const MaterialParams m = lame_from_young_poisson(1.0, 0.0);
        CHECK(m.lambda == doctest::Approx(0.0));
        CHECK(m.mu == doctest::Approx(0.5));
    }
    SUBCASE("E=1, nu=0.3") {
        const MaterialParams m = lame_from_young_poisson(1.0, 0.3);
        CHECK(m.lambda == doctest::Approx(0.576923).epsilon(1e-5));
        CHECK(m.mu == doctest::Approx(0.384615).epsilon(1e-5));
    }
    SUBCASE("linearity in E") {
        const MaterialParams m1 = lame_from_young_poisson(1.0, 0.3);
        const MaterialParams m2 = lame_from_young_poisson(2.0, 0.3);
        CHECK(m2.lambda == doctest::Approx(2.0 * m1.lambda).epsilon(1e-14));
        CHECK(m2.mu == doctest::Approx(2.0 * m1.mu).epsilon(1e-14));
    }
    SUBCASE("incompressible rejected") {
        CHECK_THROWS_AS(lame_from_young_poisson(1.0, 0.5), ConfigError);
        CHECK_THROWS_AS(lame_from_young_poisson(-1.0, 0.3), ConfigError);
        CHECK_THROWS_AS(lame_from_young_poisson(1.0, -1.0), ConfigError);
    }
}

TEST_CASE("elasticity tensor") {
    const MaterialParams m = lame_from_young_poisson(1.0, 0.3);
    SUBCASE("identity strain") {
        const Mat2 s = apply_A(Mat2::Identity(), m);
        CHECK(s(0, 0) == doctest::Approx(2.0 * m.mu + 2.0 * m.lambda));
        CHECK(s(1, 1) == doctest::Approx(2.0 * m.mu + 2.0 * m.lambda));
        CHECK(s(0, 1) == doctest::Approx(0.0));
    }
    SUBCASE("zero maps to zero") {
        CHECK(apply_A(Mat2::Zero(), m).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
        CHECK(apply_Ainv(Mat2::Zero(), m).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    }
    SUBCASE("traceless strain sees only 2 mu") {
        Mat2 e;
        e << 1, 0, 0, -1;
        const Mat2 s = apply_A(e, m);
        CHECK((s - 2.0 * m.mu * e).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    }
    SUBCASE("lambda = 0 compliance is a scaling") {
        const MaterialParams m0 = MaterialParams::from_lame(0.0, 0.7);
        const Mat2 e = apply_Ainv(Mat2::Identity(), m0);
        CHECK((e - Mat2::Identity() / (2.0 * 0.7)).cwiseAbs().maxCoeff() ==
              doctest::Approx(0.0));
    }
}

TEST_CASE("A and A^-1 are inverse on random materials and tensors") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double mu = 0.05 + std::abs(uni(rng)) * 2.0;
        double lambda = uni(rng) * 3.0;
        if (2.0 * lambda + 2.0 * mu <= 0.05)
            lambda = -mu + 0.1;
        const MaterialParams m = MaterialParams::from_lame(lambda, mu);
        Mat2 e;
        const double a = uni(rng), b = uni(rng), c = uni(rng);
        e << a, b, b, c;
        const Mat2 roundtrip = apply_Ainv(apply_A(e, m), m);
        const double scale = std::max(1.0, e.cwiseAbs().maxCoeff());
        CHECK((roundtrip - e).cwiseAbs().maxCoeff() / scale < 1e-13);

        // coercivity: A e : e >= 2 mu |e|^2 for lambda >= 0, and
        // >= (2 mu + 2 lambda) |e|^2 on the rest of the admissible range
        const double quad = (apply_A(e, m).cwiseProduct(e)).sum();
        const double norm2 = (e.cwiseProduct(e)).sum();
        const double coercive = lambda >= 0.0 ? 2.0 * mu : 2.0 * mu + 2.0 * lambda;
        CHECK(quad >= coercive * norm2 - 1e-12);
    }
}
