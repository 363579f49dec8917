#include "equisphere/conformal_init.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include "equisphere/errors.hpp"
#include "equisphere/sphere_geom.hpp"

namespace eqs {

SparseMat cot_laplacian(const TriMesh& mesh) {
    const int n = mesh.vertex_count();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(n) * 7);
    std::vector<double> diag(n, 0.0);
    for (int t = 0; t < mesh.face_count(); ++t) {
        const auto& tri = mesh.faces[t];
        for (int c = 0; c < 3; ++c) {
            const int u = tri[c];
            const int v = tri[(c + 1) % 3];
            const int o = tri[(c + 2) % 3];
            const Vec3 e1 = mesh.vertices[u] - mesh.vertices[o];
            const Vec3 e2 = mesh.vertices[v] - mesh.vertices[o];
            const double cot = e1.dot(e2) / (2.0 * mesh.face_areas[t]);
            const double w = -0.5 * cot;
            trips.emplace_back(u, v, w);
            trips.emplace_back(v, u, w);
            diag[u] -= w;
            diag[v] -= w;
        }
    }
    for (int i = 0; i < n; ++i) trips.emplace_back(i, i, diag[i]);
    SparseMat L(n, n);
    L.setFromTriplets(trips.begin(), trips.end());
    L.makeCompressed();
    return L;
}

Vec3 mass_center(const TriMesh& mesh, const Positions& f) {
    Vec3 num = Vec3::Zero();
    double den = 0.0;
    for (int t = 0; t < mesh.face_count(); ++t) {
        const double third = mesh.face_areas[t] / 3.0;
        for (int c = 0; c < 3; ++c) {
            num += third * Vec3(f.row(mesh.faces[t][c]));
            den += third;
        }
    }
    return num / den;
}

void moebius_shift(Positions& f, const Vec3& c) {
    const double c2 = c.squaredNorm();
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
        const Vec3 p(f.row(i));
        const Vec3 d = p - c;
        const Vec3 q = (1.0 - c2) * d / d.squaredNorm() - c;
        f.row(i) = q.normalized().transpose();
    }
}

namespace {

// Regularity score in (0, 1]; 1 for equilateral.
double face_quality(const TriMesh& mesh, int t) {
    const auto& tri = mesh.faces[t];
    const double l0 = (mesh.vertices[tri[1]] - mesh.vertices[tri[0]]).squaredNorm();
    const double l1 = (mesh.vertices[tri[2]] - mesh.vertices[tri[1]]).squaredNorm();
    const double l2 = (mesh.vertices[tri[0]] - mesh.vertices[tri[2]]).squaredNorm();
    return 4.0 * std::sqrt(3.0) * mesh.face_areas[t] / (l0 + l1 + l2);
}

double angle_distortion(const TriMesh& mesh, const Positions& f) {
    double sum = 0.0;
    long corners = 0;
    for (int t = 0; t < mesh.face_count(); ++t) {
        const auto& tri = mesh.faces[t];
        for (int c = 0; c < 3; ++c) {
            const int o = tri[c];
            const int u = tri[(c + 1) % 3];
            const int v = tri[(c + 2) % 3];
            const Vec3 d1 = mesh.vertices[u] - mesh.vertices[o];
            const Vec3 d2 = mesh.vertices[v] - mesh.vertices[o];
            const Vec3 i1 = Vec3(f.row(u)) - Vec3(f.row(o));
            const Vec3 i2 = Vec3(f.row(v)) - Vec3(f.row(o));
            const double cd = d1.dot(d2) / (d1.norm() * d2.norm());
            const double ci = i1.dot(i2) / (i1.norm() * i2.norm());
            sum += std::abs(ci - cd);
            ++corners;
        }
    }
    return sum / static_cast<double>(corners);
}

}  // namespace

ConformalMap conformal_initialize(const TriMesh& mesh, const ConformalInitOptions& options) {
    const int n = mesh.vertex_count();

    int pin_face = 0;
    double best = -1.0;
    for (int t = 0; t < mesh.face_count(); ++t) {
        const double q = face_quality(mesh, t);
        if (q > best) {
            best = q;
            pin_face = t;
        }
    }
    const auto& pins = mesh.faces[pin_face];

    // Positively oriented equilateral pins leave the remaining faces laid
    // out with the chart-1 orientation after lifting.
    Eigen::VectorXcd h = Eigen::VectorXcd::Zero(n);
    std::vector<char> pinned(n, 0);
    for (int t = 0; t < 3; ++t) {
        const double angle = M_PI / 2.0 + 2.0 * M_PI * t / 3.0;
        h[pins[t]] = options.pin_circumradius * Complex(std::cos(angle), std::sin(angle));
        pinned[pins[t]] = 1;
    }

    std::vector<int> interior;
    interior.reserve(n - 3);
    std::vector<int> local(n, -1);
    for (int v = 0; v < n; ++v) {
        if (!pinned[v]) {
            local[v] = static_cast<int>(interior.size());
            interior.push_back(v);
        }
    }

    const SparseMat L = cot_laplacian(mesh);
    std::vector<Eigen::Triplet<double>> t_ii, t_ib;
    for (int k = 0; k < L.outerSize(); ++k) {
        for (SparseMat::InnerIterator it(L, k); it; ++it) {
            const int r = static_cast<int>(it.row());
            const int c = static_cast<int>(it.col());
            if (pinned[r]) continue;
            if (pinned[c]) {
                const int bc = c == pins[0] ? 0 : (c == pins[1] ? 1 : 2);
                t_ib.emplace_back(local[r], bc, it.value());
            } else {
                t_ii.emplace_back(local[r], local[c], it.value());
            }
        }
    }
    PartitionedSystem sys;
    sys.L_II.resize(n - 3, n - 3);
    sys.L_II.setFromTriplets(t_ii.begin(), t_ii.end());
    sys.L_IB.resize(n - 3, 3);
    sys.L_IB.setFromTriplets(t_ib.begin(), t_ib.end());

    Eigen::Vector3cd h_pins;
    for (int t = 0; t < 3; ++t) h_pins[t] = h[pins[t]];
    InteriorSolver solver(std::move(sys));
    const Eigen::VectorXcd h_int = solver.solve_interior(h_pins);
    for (int v : interior) h[v] = h_int[local[v]];

    ConformalMap map;
    map.f0 = lift_to_sphere(h);

    for (int iter = 0; iter < options.max_center_iters; ++iter) {
        const Vec3 c = mass_center(mesh, map.f0);
        if (c.norm() <= options.center_tol) {
            map.centered = true;
            break;
        }
        moebius_shift(map.f0, options.damping * c);
    }
    if (!map.centered) {
        map.centered = mass_center(mesh, map.f0).norm() <= options.center_tol;
    }
    map.quality = angle_distortion(mesh, map.f0);
    return map;
}

}  // namespace eqs
