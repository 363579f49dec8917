#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <array>
#include <string>
#include <vector>

#include "equisphere/sphere_geom.hpp"

namespace eqs {

/// Per-vertex 3D positions, one row per vertex (mesh vertices or their
/// spherical images).
using Positions = Eigen::Matrix<double, Eigen::Dynamic, 3>;

/// One undirected edge [a, b] (a < b) of a closed oriented triangle mesh
/// together with the two adjacent faces. With faces oriented
/// counterclockwise, face_ab contains the directed edge a->b and face_ba
/// contains b->a; opp_ab / opp_ba are the respective opposite vertices.
struct Edge {
    int a = -1;
    int b = -1;
    int face_ab = -1;
    int face_ba = -1;
    int opp_ab = -1;
    int opp_ba = -1;
};

/// Validated genus-zero closed triangle mesh with precomputed areas and
/// adjacency. Immutable after construction; safe to share across threads.
struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
    std::vector<double> face_areas;
    std::vector<Edge> edges;

    /// Neighbor vertex indices, ascending, per vertex.
    std::vector<std::vector<int>> vertex_neighbors;
    /// Incident face indices per vertex.
    std::vector<std::vector<int>> vertex_faces;
    /// Edge index per (face, corner): edge opposite corner c of face t.
    std::vector<std::array<int, 3>> face_edges;

    double total_area = 0.0;

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int face_count() const { return static_cast<int>(faces.size()); }
    int edge_count() const { return static_cast<int>(edges.size()); }

    /// Index into edges for the undirected pair {u, v}; -1 if absent.
    int edge_between(int u, int v) const;

    /// Vertex positions as a row-per-vertex matrix.
    Positions positions() const;
};

/// Area of the flat triangle through three points (half cross-product norm).
double face_area(const Vec3& p0, const Vec3& p1, const Vec3& p2);

/// Validate raw vertex/face lists and build the full adjacency. Orientation
/// is made globally consistent by breadth-first flipping and normalized so
/// the enclosed signed volume is positive (outward-facing triangles).
TriMesh build_mesh(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> faces);

/// Load an ASCII OFF or OBJ file (chosen by extension, with content
/// fallback) and build the mesh.
TriMesh load_mesh(const std::string& path);

/// Uniform rescale so the total surface area is 4*pi.
TriMesh normalize_area(const TriMesh& mesh);

void save_off(const TriMesh& mesh, const std::string& path);
void save_obj(const TriMesh& mesh, const std::string& path);

/// Write faces of `mesh` with replacement vertex positions (used to emit
/// spherical parameterizations over the input connectivity).
void save_obj(const TriMesh& mesh, const Positions& positions, const std::string& path);

}  // namespace eqs
