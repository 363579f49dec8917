#include "equisphere/mesh.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "equisphere/errors.hpp"

namespace eqs {

namespace {

// Key for an undirected vertex pair.
inline std::uint64_t pair_key(int u, int v) {
    const std::uint64_t lo = static_cast<std::uint32_t>(std::min(u, v));
    const std::uint64_t hi = static_cast<std::uint32_t>(std::max(u, v));
    return (hi << 32) | lo;
}

std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Next content line, skipping blanks and '#' comments.
bool next_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        line = trimmed(line);
        if (!line.empty() && line[0] != '#') return true;
    }
    return false;
}

void ensure_ascii(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    char buf[512];
    in.read(buf, sizeof(buf));
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
        const unsigned char c = static_cast<unsigned char>(buf[i]);
        if (c == 0 || (c < 0x09 && c != 0)) {
            throw ParseError("binary content rejected (ASCII OFF/OBJ only): " + path);
        }
    }
}

TriMesh load_off(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    std::string line;
    if (!next_line(in, line)) throw ParseError("empty OFF file: " + path);
    if (line != "OFF") throw ParseError("missing OFF header in " + path);
    if (!next_line(in, line)) throw ParseError("missing OFF counts line in " + path);
    std::istringstream counts(line);
    long nv = -1, nf = -1, ne = 0;
    if (!(counts >> nv >> nf >> ne) || nv < 0 || nf < 0) {
        throw ParseError("bad OFF counts line: \"" + line + "\"");
    }
    std::vector<Vec3> vertices;
    vertices.reserve(nv);
    for (long i = 0; i < nv; ++i) {
        if (!next_line(in, line)) throw ParseError("truncated OFF vertex list");
        std::istringstream ls(line);
        double x, y, z;
        if (!(ls >> x >> y >> z)) throw ParseError("bad OFF vertex line: \"" + line + "\"");
        vertices.emplace_back(x, y, z);
    }
    std::vector<std::array<int, 3>> faces;
    faces.reserve(nf);
    for (long i = 0; i < nf; ++i) {
        if (!next_line(in, line)) throw ParseError("truncated OFF face list");
        std::istringstream ls(line);
        int cnt;
        if (!(ls >> cnt)) throw ParseError("bad OFF face line: \"" + line + "\"");
        if (cnt != 3) throw ParseError("only triangular faces are supported (got a face of size " + std::to_string(cnt) + ")");
        int a, b, c;
        if (!(ls >> a >> b >> c)) throw ParseError("bad OFF face line: \"" + line + "\"");
        faces.push_back({a, b, c});
    }
    return build_mesh(std::move(vertices), std::move(faces));
}

int parse_obj_index(const std::string& token, std::size_t vertex_count) {
    // Face tokens may be "i", "i/t", "i//n" or "i/t/n"; only the vertex
    // index is used.
    std::size_t slash = token.find('/');
    const std::string head = slash == std::string::npos ? token : token.substr(0, slash);
    long idx = 0;
    try {
        std::size_t pos = 0;
        idx = std::stol(head, &pos);
        if (pos != head.size()) throw ParseError("bad OBJ face index: \"" + token + "\"");
    } catch (const std::exception&) {
        throw ParseError("bad OBJ face index: \"" + token + "\"");
    }
    if (idx < 0) idx = static_cast<long>(vertex_count) + idx + 1;
    if (idx < 1 || idx > static_cast<long>(vertex_count)) {
        throw ParseError("OBJ face index out of range: \"" + token + "\"");
    }
    return static_cast<int>(idx - 1);
}

TriMesh load_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
    std::string line;
    while (next_line(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z)) throw ParseError("bad OBJ vertex line: \"" + line + "\"");
            vertices.emplace_back(x, y, z);
        } else if (tag == "f") {
            std::vector<std::string> toks;
            std::string t;
            while (ls >> t) toks.push_back(t);
            if (toks.size() != 3) {
                throw ParseError("only triangular faces are supported (got a face of size " + std::to_string(toks.size()) + ")");
            }
            faces.push_back({parse_obj_index(toks[0], vertices.size()),
                             parse_obj_index(toks[1], vertices.size()),
                             parse_obj_index(toks[2], vertices.size())});
        }
        // vt/vn/usemtl/o/g/s lines are ignored.
    }
    if (vertices.empty() || faces.empty()) {
        throw ParseError("OBJ file has no triangles: " + path);
    }
    return build_mesh(std::move(vertices), std::move(faces));
}

}  // namespace

double face_area(const Vec3& p0, const Vec3& p1, const Vec3& p2) {
    return 0.5 * (p1 - p0).cross(p2 - p0).norm();
}

int TriMesh::edge_between(int u, int v) const {
    // Incident lists are small; linear scan over the edges of u's faces.
    for (int t : vertex_faces[u]) {
        for (int c = 0; c < 3; ++c) {
            const Edge& e = edges[face_edges[t][c]];
            if ((e.a == u && e.b == v) || (e.a == v && e.b == u)) {
                return face_edges[t][c];
            }
        }
    }
    return -1;
}

Positions TriMesh::positions() const {
    Positions p(vertex_count(), 3);
    for (int i = 0; i < vertex_count(); ++i) p.row(i) = vertices[i].transpose();
    return p;
}

TriMesh build_mesh(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> faces) {
    const int nv = static_cast<int>(vertices.size());
    const int nf = static_cast<int>(faces.size());
    if (nv < 4 || nf < 4) throw TopologyError("mesh too small to be a closed surface");

    for (const auto& f : faces) {
        for (int c = 0; c < 3; ++c) {
            if (f[c] < 0 || f[c] >= nv) throw ParseError("face index out of range");
        }
        if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) {
            throw TopologyError("face repeats a vertex");
        }
    }

    // Undirected edge census. Every edge of a closed 2-manifold has exactly
    // two incident faces.
    std::unordered_map<std::uint64_t, std::array<int, 2>> edge_faces;
    edge_faces.reserve(faces.size() * 2);
    for (int t = 0; t < nf; ++t) {
        for (int c = 0; c < 3; ++c) {
            const std::uint64_t key = pair_key(faces[t][c], faces[t][(c + 1) % 3]);
            auto [it, inserted] = edge_faces.try_emplace(key, std::array<int, 2>{t, -1});
            if (!inserted) {
                if (it->second[1] != -1) throw TopologyError("non-manifold edge (more than 2 incident faces)");
                it->second[1] = t;
            }
        }
    }
    for (const auto& [key, fs] : edge_faces) {
        (void)key;
        if (fs[1] == -1) throw TopologyError("boundary edge found; the mesh is not closed");
    }
    const long euler = static_cast<long>(nv) - static_cast<long>(edge_faces.size()) + nf;
    if (euler != 2) {
        throw TopologyError("Euler characteristic " + std::to_string(euler) + " != 2; the mesh is not genus zero");
    }

    // Breadth-first orientation repair: neighbors must traverse the shared
    // edge in opposite directions.
    std::vector<char> visited(nf, 0);
    std::deque<int> queue;
    queue.push_back(0);
    visited[0] = 1;
    auto has_directed = [&](int t, int u, int v) {
        for (int c = 0; c < 3; ++c) {
            if (faces[t][c] == u && faces[t][(c + 1) % 3] == v) return true;
        }
        return false;
    };
    while (!queue.empty()) {
        const int t = queue.front();
        queue.pop_front();
        for (int c = 0; c < 3; ++c) {
            const int u = faces[t][c];
            const int v = faces[t][(c + 1) % 3];
            const auto& fs = edge_faces.at(pair_key(u, v));
            const int other = fs[0] == t ? fs[1] : fs[0];
            const bool same_direction = has_directed(other, u, v);
            if (!visited[other]) {
                if (same_direction) std::swap(faces[other][1], faces[other][2]);
                visited[other] = 1;
                queue.push_back(other);
            } else if (same_direction) {
                throw TopologyError("mesh is not orientable");
            }
        }
    }
    for (int t = 0; t < nf; ++t) {
        if (!visited[t]) throw TopologyError("mesh has more than one connected component");
    }

    // Outward-facing convention: positive enclosed volume.
    double volume6 = 0.0;
    for (const auto& f : faces) {
        volume6 += vertices[f[0]].cross(vertices[f[1]]).dot(vertices[f[2]]);
    }
    if (volume6 < 0.0) {
        for (auto& f : faces) std::swap(f[1], f[2]);
    }

    TriMesh mesh;
    mesh.vertices = std::move(vertices);
    mesh.faces = std::move(faces);

    mesh.face_areas.resize(nf);
    double max_area = 0.0;
    for (int t = 0; t < nf; ++t) {
        const auto& f = mesh.faces[t];
        mesh.face_areas[t] = face_area(mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]);
        max_area = std::max(max_area, mesh.face_areas[t]);
        mesh.total_area += mesh.face_areas[t];
    }
    for (int t = 0; t < nf; ++t) {
        if (mesh.face_areas[t] < 1e-14 * max_area) {
            throw DegenerateFaceError("face " + std::to_string(t) + " has (numerically) zero area");
        }
    }

    // Edge records with directed-edge opposite vertices.
    std::unordered_map<std::uint64_t, int> edge_index;
    edge_index.reserve(edge_faces.size());
    mesh.edges.reserve(edge_faces.size());
    mesh.face_edges.assign(nf, {-1, -1, -1});
    for (int t = 0; t < nf; ++t) {
        for (int c = 0; c < 3; ++c) {
            const int u = mesh.faces[t][c];
            const int v = mesh.faces[t][(c + 1) % 3];
            const int w = mesh.faces[t][(c + 2) % 3];
            const std::uint64_t key = pair_key(u, v);
            auto it = edge_index.find(key);
            int ei;
            if (it == edge_index.end()) {
                ei = static_cast<int>(mesh.edges.size());
                edge_index.emplace(key, ei);
                Edge e;
                e.a = std::min(u, v);
                e.b = std::max(u, v);
                mesh.edges.push_back(e);
            } else {
                ei = it->second;
            }
            Edge& e = mesh.edges[ei];
            if (u == e.a) {
                e.face_ab = t;
                e.opp_ab = w;
            } else {
                e.face_ba = t;
                e.opp_ba = w;
            }
            // face_edges[t][corner of w] = edge opposite w.
            mesh.face_edges[t][(c + 2) % 3] = ei;
        }
    }
    for (const Edge& e : mesh.edges) {
        if (e.face_ab < 0 || e.face_ba < 0) {
            throw TopologyError("orientation repair failed to produce opposite traversals");
        }
    }

    mesh.vertex_neighbors.assign(nv, {});
    mesh.vertex_faces.assign(nv, {});
    for (const Edge& e : mesh.edges) {
        mesh.vertex_neighbors[e.a].push_back(e.b);
        mesh.vertex_neighbors[e.b].push_back(e.a);
    }
    for (auto& nbrs : mesh.vertex_neighbors) std::sort(nbrs.begin(), nbrs.end());
    for (int t = 0; t < nf; ++t) {
        for (int c = 0; c < 3; ++c) mesh.vertex_faces[mesh.faces[t][c]].push_back(t);
    }
    return mesh;
}

TriMesh load_mesh(const std::string& path) {
    ensure_ascii(path);
    auto lower = path;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower.size() >= 4 && lower.compare(lower.size() - 4, 4, ".obj") == 0) {
        return load_obj(path);
    }
    if (lower.size() >= 4 && lower.compare(lower.size() - 4, 4, ".off") == 0) {
        return load_off(path);
    }
    // Fall back on the header.
    std::ifstream in(path);
    std::string line;
    if (next_line(in, line) && line == "OFF") return load_off(path);
    return load_obj(path);
}

TriMesh normalize_area(const TriMesh& mesh) {
    const double scale = std::sqrt(4.0 * M_PI / mesh.total_area);
    std::vector<Vec3> scaled(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) scaled[i] = mesh.vertices[i] * scale;
    return build_mesh(std::move(scaled), mesh.faces);
}

void save_off(const TriMesh& mesh, const std::string& path) {
    std::FILE* out = std::fopen(path.c_str(), "w");
    if (!out) throw ParseError("cannot open file for writing: " + path);
    std::fprintf(out, "OFF\n%d %d %d\n", mesh.vertex_count(), mesh.face_count(), mesh.edge_count());
    for (const Vec3& v : mesh.vertices) {
        std::fprintf(out, "%.17g %.17g %.17g\n", v.x(), v.y(), v.z());
    }
    for (const auto& f : mesh.faces) {
        std::fprintf(out, "3 %d %d %d\n", f[0], f[1], f[2]);
    }
    std::fclose(out);
}

void save_obj(const TriMesh& mesh, const std::string& path) {
    save_obj(mesh, mesh.positions(), path);
}

void save_obj(const TriMesh& mesh, const Positions& positions, const std::string& path) {
    if (positions.rows() != mesh.vertex_count()) {
        throw RegionMismatchError("save_obj: position count does not match the mesh");
    }
    std::FILE* out = std::fopen(path.c_str(), "w");
    if (!out) throw ParseError("cannot open file for writing: " + path);
    for (Eigen::Index i = 0; i < positions.rows(); ++i) {
        std::fprintf(out, "v %.17g %.17g %.17g\n", positions(i, 0), positions(i, 1), positions(i, 2));
    }
    for (const auto& f : mesh.faces) {
        std::fprintf(out, "f %d %d %d\n", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    std::fclose(out);
}

}  // namespace eqs
