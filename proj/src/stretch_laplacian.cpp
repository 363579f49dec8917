#include "equisphere/stretch_laplacian.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include "equisphere/errors.hpp"

namespace eqs {

namespace {

constexpr double kDegenerateImageTol = 1e-15;

inline Vec3 row(const Positions& f, int v) { return Vec3(f.row(v)); }

// One adjacent face's share of the dot-form edge weight:
// (f_opp - f_u) . (f_opp - f_v) / (4 |triangle|), with the domain area.
inline double dot_side(const TriMesh& mesh, int face, int opp, int u, int v, const Positions& f) {
    const Vec3 fo = row(f, opp);
    return (fo - row(f, u)).dot(fo - row(f, v)) / (4.0 * mesh.face_areas[face]);
}

inline double image_area(const TriMesh& mesh, int face, const Positions& f) {
    const auto& tri = mesh.faces[face];
    return face_area(row(f, tri[0]), row(f, tri[1]), row(f, tri[2]));
}

// cot of the image angle at `opp` between the edges to u and v.
inline double image_cot(int face, int opp, int u, int v, const Positions& f) {
    const Vec3 fo = row(f, opp);
    const Vec3 e1 = row(f, u) - fo;
    const Vec3 e2 = row(f, v) - fo;
    const double cross_norm = e1.cross(e2).norm();
    if (cross_norm < 2.0 * kDegenerateImageTol) {
        throw DegenerateImageError("image angle degenerate on face " + std::to_string(face));
    }
    return e1.dot(e2) / cross_norm;
}

}  // namespace

double stretch_factor(const TriMesh& mesh, int face, const Positions& f) {
    const double img = image_area(mesh, face, f);
    if (img < kDegenerateImageTol) {
        throw DegenerateImageError("image of face " + std::to_string(face) + " has zero area");
    }
    return mesh.face_areas[face] / img;
}

double edge_weight_cot(const TriMesh& mesh, int edge, const Positions& f,
                       bool use_ab, bool use_ba) {
    const Edge& e = mesh.edges[edge];
    double w = 0.0;
    if (use_ab) {
        w -= 0.5 * image_cot(e.face_ab, e.opp_ab, e.a, e.b, f) /
             stretch_factor(mesh, e.face_ab, f);
    }
    if (use_ba) {
        w -= 0.5 * image_cot(e.face_ba, e.opp_ba, e.a, e.b, f) /
             stretch_factor(mesh, e.face_ba, f);
    }
    return w;
}

double edge_weight_dot(const TriMesh& mesh, int edge, const Positions& f,
                       bool use_ab, bool use_ba) {
    const Edge& e = mesh.edges[edge];
    double w = 0.0;
    if (use_ab) w -= dot_side(mesh, e.face_ab, e.opp_ab, e.a, e.b, f);
    if (use_ba) w -= dot_side(mesh, e.face_ba, e.opp_ba, e.a, e.b, f);
    return w;
}

StretchLaplacian assemble_laplacian(const TriMesh& mesh, const Positions& f, int region,
                                    const IndexPartition& partition) {
    const auto& in_I = partition.interior_mask(region);
    const auto& loc = partition.local(region);
    const int n_s = static_cast<int>(partition.interior(region).size());
    const int m_s = static_cast<int>(partition.boundary(region).size());
    const int dim = n_s + m_s;

    StretchLaplacian L;
    L.region = region;
    L.n_interior = n_s;
    L.m_boundary = m_s;
    L.global_ids.reserve(dim);
    for (int v : partition.interior(region)) L.global_ids.push_back(v);
    for (int v : partition.boundary(region)) L.global_ids.push_back(v);

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(dim) * 7);
    std::vector<double> diag(dim, 0.0);

    for (int t = 0; t < mesh.face_count(); ++t) {
        const auto& tri = mesh.faces[t];
        if (!(in_I[tri[0]] || in_I[tri[1]] || in_I[tri[2]])) continue;
        const double inv4a = 1.0 / (4.0 * mesh.face_areas[t]);
        for (int c = 0; c < 3; ++c) {
            const int u = tri[c];
            const int v = tri[(c + 1) % 3];
            const int o = tri[(c + 2) % 3];
            const Vec3 fo = row(f, o);
            const double w = -((fo - row(f, u)).dot(fo - row(f, v)) * inv4a);
            const int lu = loc[u];
            const int lv = loc[v];
            if (lu < 0 || lv < 0) {
                throw TopologyError("assemble_laplacian: face vertex escapes the region index set");
            }
            trips.emplace_back(lu, lv, w);
            trips.emplace_back(lv, lu, w);
            diag[lu] -= w;
            diag[lv] -= w;
        }
    }
    for (int i = 0; i < dim; ++i) trips.emplace_back(i, i, diag[i]);

    L.matrix.resize(dim, dim);
    L.matrix.setFromTriplets(trips.begin(), trips.end());
    L.matrix.makeCompressed();
    return L;
}

namespace {

SparseMat sparse_block(const SparseMat& M, int row0, int rows, int col0, int cols) {
    std::vector<Eigen::Triplet<double>> trips;
    for (int k = 0; k < M.outerSize(); ++k) {
        for (SparseMat::InnerIterator it(M, k); it; ++it) {
            if (it.row() >= row0 && it.row() < row0 + rows && it.col() >= col0 && it.col() < col0 + cols) {
                trips.emplace_back(it.row() - row0, it.col() - col0, it.value());
            }
        }
    }
    SparseMat out(rows, cols);
    out.setFromTriplets(trips.begin(), trips.end());
    out.makeCompressed();
    return out;
}

}  // namespace

SparseMat StretchLaplacian::interior() const {
    return sparse_block(matrix, 0, n_interior, 0, n_interior);
}

SparseMat StretchLaplacian::interior_boundary() const {
    return sparse_block(matrix, 0, n_interior, n_interior, m_boundary);
}

double stretch_energy(const Eigen::VectorXcd& h1, const Eigen::VectorXcd& h2,
                      const SparseMat& L1, const SparseMat& L2) {
    if (h1.size() != L1.rows() || L1.rows() != L1.cols()) {
        throw RegionMismatchError("stretch_energy: region-1 dimensions disagree");
    }
    if (h2.size() != L2.rows() || L2.rows() != L2.cols()) {
        throw RegionMismatchError("stretch_energy: region-2 dimensions disagree");
    }
    const std::complex<double> q1 = h1.dot(L1 * h1);
    const std::complex<double> q2 = h2.dot(L2 * h2);
    const double energy = 0.5 * (q1.real() + q2.real());
    const double imag = 0.5 * std::abs(q1.imag() + q2.imag());
    if (imag > 1e-10 * std::max(1.0, std::abs(energy))) {
        throw RegionMismatchError("stretch_energy: quadratic form is not real");
    }
    return energy;
}

std::vector<std::int8_t> chart_ownership(const TriMesh& mesh, const Positions& f) {
    std::vector<std::int8_t> owner(mesh.face_count(), 2);
    for (int t = 0; t < mesh.face_count(); ++t) {
        const auto& tri = mesh.faces[t];
        int lower = 0;
        for (int c = 0; c < 3; ++c) {
            if (f(tri[c], 2) <= 0.0) ++lower;
        }
        owner[t] = lower >= 2 ? 1 : 2;
    }
    return owner;
}

SparseMat assemble_energy_laplacian(const TriMesh& mesh, const Positions& f,
                                    const std::vector<std::int8_t>& owner, int chart) {
    const int n = mesh.vertex_count();
    std::vector<Eigen::Triplet<double>> trips;
    std::vector<double> diag(n, 0.0);
    for (int t = 0; t < mesh.face_count(); ++t) {
        if (owner[t] != chart) continue;
        const auto& tri = mesh.faces[t];
        // Twice the per-side solve weight: the half-per-face cotangent
        // convention halves the Dirichlet integrand, and the energy form
        // must measure the full map energy so the two charts sum to the
        // sphere area at the optimum.
        const double inv2a = 1.0 / (2.0 * mesh.face_areas[t]);
        for (int c = 0; c < 3; ++c) {
            const int u = tri[c];
            const int v = tri[(c + 1) % 3];
            const int o = tri[(c + 2) % 3];
            const Vec3 fo = row(f, o);
            const double w = -((fo - row(f, u)).dot(fo - row(f, v)) * inv2a);
            trips.emplace_back(u, v, w);
            trips.emplace_back(v, u, w);
            diag[u] -= w;
            diag[v] -= w;
        }
    }
    for (int i = 0; i < n; ++i) {
        if (diag[i] != 0.0) trips.emplace_back(i, i, diag[i]);
    }
    SparseMat L(n, n);
    L.setFromTriplets(trips.begin(), trips.end());
    L.makeCompressed();
    return L;
}

double sphere_stretch_energy(const TriMesh& mesh, const Positions& f,
                             const Eigen::VectorXcd& h1, const Eigen::VectorXcd& h2) {
    return sphere_stretch_energy(mesh, f, h1, h2, chart_ownership(mesh, f));
}

double sphere_stretch_energy(const TriMesh& mesh, const Positions& f,
                             const Eigen::VectorXcd& h1, const Eigen::VectorXcd& h2,
                             const std::vector<std::int8_t>& owner) {
    const SparseMat L1 = assemble_energy_laplacian(mesh, f, owner, 1);
    const SparseMat L2 = assemble_energy_laplacian(mesh, f, owner, 2);
    // Far-chart entries at an exact pole are non-finite; ownership keeps
    // their matrix rows/columns empty, so zeroing them is exact.
    auto sanitized = [](const Eigen::VectorXcd& h) {
        Eigen::VectorXcd out = h;
        for (Eigen::Index i = 0; i < out.size(); ++i) {
            if (!std::isfinite(out[i].real()) || !std::isfinite(out[i].imag())) out[i] = Complex(0, 0);
        }
        return out;
    };
    return stretch_energy(sanitized(h1), sanitized(h2), L1, L2);
}

void charts_from_positions(const Positions& f, Eigen::VectorXcd& h1, Eigen::VectorXcd& h2) {
    const Eigen::Index n = f.rows();
    const Complex far_pole(std::numeric_limits<double>::infinity(), 0.0);
    h1.resize(n);
    h2.resize(n);
    for (Eigen::Index v = 0; v < n; ++v) {
        const Vec3 p(f.row(v));
        // Use the chart that keeps the vertex near its origin; the value in
        // the far chart at an exact pole is infinite and must never be
        // consumed through owned-face weights.
        if (p.z() <= 0.0) {
            h1[v] = stereographic_project(p);
            h2[v] = std::abs(h1[v]) < kOriginTol ? far_pole : invert_plane(h1[v]);
        } else {
            h2[v] = stereographic_project(Vec3(p.x(), p.y(), -p.z()));
            h1[v] = std::abs(h2[v]) < kOriginTol ? far_pole : invert_plane(h2[v]);
        }
    }
}

StretchStats stretch_stats(const TriMesh& mesh, const Positions& f) {
    StretchStats stats;
    const int nf = mesh.face_count();
    stats.sigma.resize(nf);
    for (int t = 0; t < nf; ++t) stats.sigma[t] = stretch_factor(mesh, t, f);
    stats.mean = stats.sigma.mean();
    stats.stddev = nf > 1 ? std::sqrt((stats.sigma.array() - stats.mean).square().sum() / (nf - 1)) : 0.0;

    Eigen::VectorXcd h1, h2;
    charts_from_positions(f, h1, h2);
    stats.energy = sphere_stretch_energy(mesh, f, h1, h2);

    // Chart-1 images of an outward-oriented sphere have negative signed
    // area; chart-2 images positive (the inversion reverses orientation).
    const auto owner = chart_ownership(mesh, f);
    for (int t = 0; t < nf; ++t) {
        const auto& tri = mesh.faces[t];
        const Eigen::VectorXcd& h = owner[t] == 1 ? h1 : h2;
        const Complex e1 = h[tri[1]] - h[tri[0]];
        const Complex e2 = h[tri[2]] - h[tri[0]];
        const double signed_area = 0.5 * (e1.real() * e2.imag() - e1.imag() * e2.real());
        const bool healthy = owner[t] == 1 ? signed_area < 0.0 : signed_area > 0.0;
        if (!healthy) ++stats.folded_faces;
    }
    return stats;
}

}  // namespace eqs
