#pragma once

#include <cstdint>

#include "equisphere/mesh.hpp"

namespace eqs {

/// Regular tetrahedron with the given edge length, centered at the origin.
TriMesh make_tetrahedron(double edge = 1.0);

/// Icosahedron subdivided `level` times with vertices pushed to the unit
/// sphere: 10 * 4^level + 2 vertices, 20 * 4^level faces.
TriMesh make_icosphere(int level);

/// Icosphere scaled anisotropically by (ax, ay, az).
TriMesh make_ellipsoid(double ax, double ay, double az, int level);

/// Unit sphere with seeded Gaussian radial bumps; deterministic for a fixed
/// seed.
TriMesh make_gaussian_bump_sphere(int level, std::uint64_t seed, int bumps = 6,
                                  double amplitude = 0.12, double width = 0.45);

}  // namespace eqs
