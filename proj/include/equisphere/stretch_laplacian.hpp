#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cstdint>
#include <vector>

#include "equisphere/mesh.hpp"
#include "equisphere/partition.hpp"

namespace eqs {

using SparseMat = Eigen::SparseMatrix<double>;

/// Modified stretch Laplacian of one region: cotangent weights divided by
/// the per-face stretch factor, assembled once per undirected edge over the
/// region's vertex set (interior first, then boundary ring).
struct StretchLaplacian {
    int region = 1;  // {south = 1, north = 2}
    SparseMat matrix;
    int n_interior = 0;
    int m_boundary = 0;
    std::vector<int> global_ids;  // local -> global vertex index

    /// L restricted to interior rows/columns.
    SparseMat interior() const;
    /// Interior rows, boundary-ring columns.
    SparseMat interior_boundary() const;
};

/// Local area ratio |triangle| / |image triangle| through the three image
/// points. Throws DegenerateImageError when the image collapses.
double stretch_factor(const TriMesh& mesh, int face, const Positions& f);

/// Edge weight of the modified Laplacian in cotangent form:
/// -(cot(theta_l)/sigma_l + cot(theta_r)/sigma_r)/2 over the image angles
/// opposite the edge. Kept for cross-checking the production form.
/// `use_ab`/`use_ba` drop one adjacent face's term (region-boundary rule).
double edge_weight_cot(const TriMesh& mesh, int edge, const Positions& f,
                       bool use_ab = true, bool use_ba = true);

/// Same weight via image dot products over domain areas; algebraically
/// identical and robust near degenerate image angles. Production path.
double edge_weight_dot(const TriMesh& mesh, int edge, const Positions& f,
                       bool use_ab = true, bool use_ba = true);

/// Assemble the region's stretch Laplacian at sphere positions f. A face
/// contributes iff it has a vertex in the region's interior set, which
/// zeroes the far-side term of ring edges and keeps every interior row a
/// full 1-ring row.
StretchLaplacian assemble_laplacian(const TriMesh& mesh, const Positions& f, int region,
                                    const IndexPartition& partition);

/// Quadratic-form stretch energy Re(h1^H L1 h1 + h2^H L2 h2) / 2 for any
/// consistent matrix/vector pairs. The imaginary part must vanish and is
/// checked.
double stretch_energy(const Eigen::VectorXcd& h1, const Eigen::VectorXcd& h2,
                      const SparseMat& L1, const SparseMat& L2);

/// Face chart ownership for energy accounting and fold detection: a face
/// belongs to chart 1 when at least two of its image vertices lie in the
/// closed lower hemisphere (the chart-1 unit disk), else chart 2.
std::vector<std::int8_t> chart_ownership(const TriMesh& mesh, const Positions& f);

/// Energy form of one chart over all n vertices, restricted to the faces
/// that chart owns.
SparseMat assemble_energy_laplacian(const TriMesh& mesh, const Positions& f,
                                    const std::vector<std::int8_t>& owner, int chart);

/// E_S(f) with the disjoint chart split; h1/h2 are full chart vectors.
double sphere_stretch_energy(const TriMesh& mesh, const Positions& f,
                             const Eigen::VectorXcd& h1, const Eigen::VectorXcd& h2);

/// Same with a caller-fixed face split (the driver freezes the split with
/// the index sets so the energy is comparable across sweeps).
double sphere_stretch_energy(const TriMesh& mesh, const Positions& f,
                             const Eigen::VectorXcd& h1, const Eigen::VectorXcd& h2,
                             const std::vector<std::int8_t>& owner);

/// Consistent chart pair from sphere positions, choosing the well-scaled
/// chart per vertex (no vertex may sit exactly at a pole).
void charts_from_positions(const Positions& f, Eigen::VectorXcd& h1, Eigen::VectorXcd& h2);

/// Per-face stretch factors with summary statistics and fold count.
struct StretchStats {
    Eigen::VectorXd sigma;
    double mean = 0.0;
    double stddev = 0.0;
    double energy = 0.0;
    int folded_faces = 0;
};

StretchStats stretch_stats(const TriMesh& mesh, const Positions& f);

}  // namespace eqs
