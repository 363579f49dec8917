#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "equisphere/mesh.hpp"
#include "equisphere/synth.hpp"

namespace eqs::testing {

inline std::string tmp_path(const std::string& name) {
    return "eqs_test_" + name;
}

/// Parametric torus (genus 1) for topology-gate tests.
inline TriMesh make_torus_raw(int nu = 12, int nv = 8, double R = 2.0, double r = 0.7) {
    std::vector<Vec3> v;
    std::vector<std::array<int, 3>> f;
    for (int i = 0; i < nu; ++i) {
        const double u = 2.0 * M_PI * i / nu;
        for (int j = 0; j < nv; ++j) {
            const double w = 2.0 * M_PI * j / nv;
            v.emplace_back((R + r * std::cos(w)) * std::cos(u), (R + r * std::cos(w)) * std::sin(u),
                           r * std::sin(w));
        }
    }
    auto idx = [nu, nv](int i, int j) { return (i % nu) * nv + (j % nv); };
    for (int i = 0; i < nu; ++i) {
        for (int j = 0; j < nv; ++j) {
            f.push_back({idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)});
            f.push_back({idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)});
        }
    }
    return {std::move(v), std::move(f), {}, {}, {}, {}, {}, 0.0};  // raw, unvalidated
}

/// Write a torus OFF file without going through build_mesh.
inline void write_torus_off(const std::string& path) {
    const TriMesh t = make_torus_raw();
    std::FILE* out = std::fopen(path.c_str(), "w");
    std::fprintf(out, "OFF\n%zu %zu 0\n", t.vertices.size(), t.faces.size());
    for (const auto& p : t.vertices) std::fprintf(out, "%.17g %.17g %.17g\n", p.x(), p.y(), p.z());
    for (const auto& tri : t.faces) std::fprintf(out, "3 %d %d %d\n", tri[0], tri[1], tri[2]);
    std::fclose(out);
}

/// Tetrahedron with one face removed (open disk) written straight to OFF.
inline void write_open_disk_off(const std::string& path) {
    const TriMesh tet = make_tetrahedron(1.0);
    std::FILE* out = std::fopen(path.c_str(), "w");
    std::fprintf(out, "OFF\n%zu 3 0\n", tet.vertices.size());
    for (const auto& p : tet.vertices) std::fprintf(out, "%.17g %.17g %.17g\n", p.x(), p.y(), p.z());
    for (int t = 0; t < 3; ++t) {
        std::fprintf(out, "3 %d %d %d\n", tet.faces[t][0], tet.faces[t][1], tet.faces[t][2]);
    }
    std::fclose(out);
}

inline Vec3 random_unit_vector(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec3 v;
    do {
        v = Vec3(gauss(rng), gauss(rng), gauss(rng));
    } while (v.norm() < 1e-8);
    return v.normalized();
}

/// Random closed stencil host: an octahedron with jittered vertices. Every
/// edge has two adjacent faces whose domain areas are random but valid.
inline TriMesh random_octahedron(std::mt19937_64& rng, double jitter = 0.25) {
    std::uniform_real_distribution<double> u(-jitter, jitter);
    std::vector<Vec3> v = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    for (auto& p : v) p += Vec3(u(rng), u(rng), u(rng));
    std::vector<std::array<int, 3>> f = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
                                         {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
    return build_mesh(std::move(v), std::move(f));
}

/// Random non-degenerate image positions for a mesh.
inline Positions random_positions(const TriMesh& mesh, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, scale);
    Positions f(mesh.vertex_count(), 3);
    for (int i = 0; i < mesh.vertex_count(); ++i) {
        f.row(i) = Vec3(gauss(rng), gauss(rng), gauss(rng)).transpose();
    }
    return f;
}

}  // namespace eqs::testing
