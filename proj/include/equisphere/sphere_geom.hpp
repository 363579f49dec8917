#pragma once

#include <Eigen/Core>
#include <cmath>
#include <complex>

#include "equisphere/errors.hpp"

namespace eqs {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;

/// Plane coordinates of all mesh vertices in one chart, one complex number
/// per vertex.
using PlanarCoords = Eigen::VectorXcd;

inline constexpr double kPoleTol = 1e-12;
inline constexpr double kOriginTol = 1e-14;

/// Projection from the unit sphere minus the north pole onto the plane,
/// (x1, x2, x3) -> (x1, x2) / (1 - x3).
inline Complex stereographic_project(const Vec3& p) {
    const double dx = p.x();
    const double dy = p.y();
    const double dz = p.z() - 1.0;
    if (std::sqrt(dx * dx + dy * dy + dz * dz) < kPoleTol) {
        throw PoleError("stereographic_project: point at the north pole");
    }
    const double denom = 1.0 - p.z();
    return Complex(p.x() / denom, p.y() / denom);
}

/// Inverse projection; any finite plane point maps to the unit sphere.
inline Vec3 inverse_stereographic(const Complex& z) {
    const double s = std::norm(z);
    return Vec3(2.0 * z.real(), 2.0 * z.imag(), s - 1.0) / (s + 1.0);
}

/// Plane inversion z -> z / |z|^2, swapping the roles of the two charts.
inline Complex invert_plane(const Complex& z) {
    const double s = std::norm(z);
    if (std::sqrt(s) < kOriginTol) {
        throw OriginError("invert_plane: point at the chart origin");
    }
    return Complex(z.real() / s, z.imag() / s);
}

/// Entrywise inversion of a full chart vector.
inline PlanarCoords invert_plane(const PlanarCoords& h) {
    PlanarCoords out(h.size());
    for (Eigen::Index i = 0; i < h.size(); ++i) {
        out[i] = invert_plane(h[i]);
    }
    return out;
}

/// Lift a full chart vector to sphere positions, one row per vertex.
inline Eigen::Matrix<double, Eigen::Dynamic, 3> lift_to_sphere(const PlanarCoords& h) {
    Eigen::Matrix<double, Eigen::Dynamic, 3> f(h.size(), 3);
    for (Eigen::Index i = 0; i < h.size(); ++i) {
        f.row(i) = inverse_stereographic(h[i]).transpose();
    }
    return f;
}

/// Project all rows of a sphere-position matrix.
inline PlanarCoords project_to_plane(const Eigen::Matrix<double, Eigen::Dynamic, 3>& f) {
    PlanarCoords h(f.rows());
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
        h[i] = stereographic_project(Vec3(f.row(i)));
    }
    return h;
}

}  // namespace eqs
