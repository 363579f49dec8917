#include <doctest.h>

#include <random>

#include "equisphere/errors.hpp"
#include "equisphere/sphere_geom.hpp"
#include "support.hpp"

using namespace eqs;
namespace tst = eqs::testing;

TEST_CASE("stereographic projection of marked points") {
    CHECK(std::abs(stereographic_project(Vec3(0, 0, -1)) - Complex(0, 0)) <= 1e-15);
    CHECK(std::abs(stereographic_project(Vec3(1, 0, 0)) - Complex(1, 0)) <= 1e-15);
    CHECK(std::abs(stereographic_project(Vec3(0, 0.6, 0.8)) - Complex(0, 3)) <= 1e-14);
    CHECK_THROWS_AS(stereographic_project(Vec3(0, 0, 1)), PoleError);
}

TEST_CASE("inverse stereographic projection of marked points") {
    CHECK((inverse_stereographic(Complex(0, 0)) - Vec3(0, 0, -1)).norm() <= 1e-15);
    CHECK((inverse_stereographic(Complex(1, 0)) - Vec3(1, 0, 0)).norm() <= 1e-15);
    CHECK((inverse_stereographic(Complex(0, 3)) - Vec3(0, 0.6, 0.8)).norm() <= 1e-15);
}

TEST_CASE("plane inversion of marked points") {
    CHECK(std::abs(invert_plane(Complex(2, 0)) - Complex(0.5, 0)) <= 1e-15);
    CHECK(std::abs(invert_plane(Complex(1, 1)) - Complex(0.5, 0.5)) <= 1e-15);
    const Complex on_circle = std::polar(1.0, 0.7);
    CHECK(std::abs(std::abs(invert_plane(on_circle)) - 1.0) <= 1e-15);
    CHECK_THROWS_AS(invert_plane(Complex(0, 0)), OriginError);
}

TEST_CASE("projection round trip on random unit vectors") {
    std::mt19937_64 rng(7);
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) {
        Vec3 p = tst::random_unit_vector(rng);
        if ((p - Vec3(0, 0, 1)).norm() < 1e-6) continue;
        const Vec3 back = inverse_stereographic(stereographic_project(p));
        worst = std::max(worst, (back - p).norm());
        CHECK(std::abs(back.norm() - 1.0) <= 1e-14);
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("inversion is an involution with reciprocal modulus") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> mag(1e-6, 1e6);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
    double worst_inv = 0.0, worst_mod = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const Complex z = std::polar(mag(rng), ang(rng));
        const Complex zz = invert_plane(invert_plane(z));
        worst_inv = std::max(worst_inv, std::abs(zz - z) / std::abs(z));
        worst_mod = std::max(worst_mod, std::abs(std::abs(invert_plane(z)) - 1.0 / std::abs(z)) * std::abs(z));
    }
    CHECK(worst_inv <= 1e-13);
    CHECK(worst_mod <= 1e-13);
}

TEST_CASE("inversion corresponds to the sphere z-flip") {
    std::mt19937_64 rng(9);
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) {
        Vec3 p = tst::random_unit_vector(rng);
        if (std::abs(std::abs(p.z()) - 1.0) < 1e-6) continue;  // both poles excluded
        const Vec3 flipped = inverse_stereographic(invert_plane(stereographic_project(p)));
        worst = std::max(worst, (flipped - Vec3(p.x(), p.y(), -p.z())).norm());
    }
    CHECK(worst <= 1e-12);
}
