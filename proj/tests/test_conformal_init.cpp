#include <doctest.h>

#include "equisphere/conformal_init.hpp"
#include "equisphere/stretch_laplacian.hpp"
#include "equisphere/synth.hpp"

using namespace eqs;

TEST_CASE("classical cot Laplacian equals the stretch assembly at identity") {
    const TriMesh mesh = normalize_area(make_ellipsoid(1.0, 1.2, 0.8, 2));
    const SparseMat L = cot_laplacian(mesh);
    const Positions identity = mesh.positions();
    // With f = domain positions every stretch factor is 1, so the modified
    // weights reduce to the classical ones.
    double worst = 0.0;
    for (int e = 0; e < mesh.edge_count(); ++e) {
        const Edge& edge = mesh.edges[e];
        const double w = edge_weight_dot(mesh, e, identity);
        worst = std::max(worst, std::abs(L.coeff(edge.a, edge.b) - w) / std::max(1.0, std::abs(w)));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("initializer output is a centered unit-sphere map") {
    const TriMesh mesh = normalize_area(make_icosphere(3));
    const ConformalMap map = conformal_initialize(mesh);
    for (int i = 0; i < mesh.vertex_count(); ++i) {
        CHECK(std::abs(map.f0.row(i).norm() - 1.0) <= 1e-12);
    }
    CHECK(map.centered);
    CHECK(mass_center(mesh, map.f0).norm() <= 1e-6);
    CHECK(map.quality < 1e-2);  // near-uniform sphere: tiny angle distortion
}

TEST_CASE("tetrahedron initializer centers by symmetry") {
    const TriMesh tet = normalize_area(make_tetrahedron(1.0));
    const ConformalMap map = conformal_initialize(tet);
    CHECK(map.centered);
    CHECK(mass_center(tet, map.f0).norm() <= 1e-6);
}

TEST_CASE("ellipsoid initializer is fold-free") {
    const TriMesh mesh = normalize_area(make_ellipsoid(1.0, 1.0, 1.5, 3));
    const ConformalMap map = conformal_initialize(mesh);
    CHECK(map.centered);
    const StretchStats stats = stretch_stats(mesh, map.f0);
    CHECK(stats.folded_faces == 0);
}

TEST_CASE("moebius shift keeps points on the sphere and recenters") {
    const TriMesh mesh = normalize_area(make_icosphere(2));
    ConformalMap map = conformal_initialize(mesh);
    Positions f = map.f0;
    moebius_shift(f, Vec3(0.2, -0.1, 0.3));
    for (int i = 0; i < mesh.vertex_count(); ++i) {
        CHECK(std::abs(f.row(i).norm() - 1.0) <= 1e-12);
    }
    // The zero shift is the identity.
    Positions g = map.f0;
    moebius_shift(g, Vec3::Zero());
    CHECK((g - map.f0).lpNorm<Eigen::Infinity>() <= 1e-12);
}
