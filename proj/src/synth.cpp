#include "equisphere/synth.hpp"

#include <cmath>
#include <map>
#include <random>
#include <utility>

namespace eqs {

namespace {

struct IcoData {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
};

IcoData icosahedron() {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    IcoData d;
    d.vertices = {
        {-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1},
    };
    d.faces = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
    };
    for (auto& v : d.vertices) v.normalize();
    return d;
}

IcoData subdivided_sphere(int level) {
    IcoData d = icosahedron();
    for (int step = 0; step < level; ++step) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            const int idx = static_cast<int>(d.vertices.size());
            d.vertices.push_back(((d.vertices[a] + d.vertices[b]) * 0.5).normalized());
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(d.faces.size() * 4);
        for (const auto& f : d.faces) {
            const int ab = mid(f[0], f[1]);
            const int bc = mid(f[1], f[2]);
            const int ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        d.faces = std::move(next);
    }
    return d;
}

}  // namespace

TriMesh make_tetrahedron(double edge) {
    const double s = edge / std::sqrt(2.0);
    std::vector<Vec3> v = {
        Vec3(s / 2, s / 2, s / 2),
        Vec3(s / 2, -s / 2, -s / 2),
        Vec3(-s / 2, s / 2, -s / 2),
        Vec3(-s / 2, -s / 2, s / 2),
    };
    std::vector<std::array<int, 3>> f = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
    return build_mesh(std::move(v), std::move(f));
}

TriMesh make_icosphere(int level) {
    IcoData d = subdivided_sphere(level);
    return build_mesh(std::move(d.vertices), std::move(d.faces));
}

TriMesh make_ellipsoid(double ax, double ay, double az, int level) {
    IcoData d = subdivided_sphere(level);
    for (auto& v : d.vertices) {
        v.x() *= ax;
        v.y() *= ay;
        v.z() *= az;
    }
    return build_mesh(std::move(d.vertices), std::move(d.faces));
}

TriMesh make_gaussian_bump_sphere(int level, std::uint64_t seed, int bumps,
                                  double amplitude, double width) {
    IcoData d = subdivided_sphere(level);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<Vec3> centers;
    std::vector<double> amps;
    centers.reserve(bumps);
    for (int i = 0; i < bumps; ++i) {
        Vec3 c;
        do {
            c = Vec3(unit(rng), unit(rng), unit(rng));
        } while (c.norm() < 1e-3 || c.norm() > 1.0);
        centers.push_back(c.normalized());
        amps.push_back(amplitude * (0.5 + 0.5 * std::abs(unit(rng))));
    }
    for (auto& v : d.vertices) {
        double r = 1.0;
        for (int i = 0; i < bumps; ++i) {
            const double dist2 = (v - centers[i]).squaredNorm();
            r += amps[i] * std::exp(-dist2 / (2.0 * width * width));
        }
        v *= r;
    }
    return build_mesh(std::move(d.vertices), std::move(d.faces));
}

}  // namespace eqs
