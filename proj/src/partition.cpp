#include "equisphere/partition.hpp"

#include <cmath>

#include "equisphere/errors.hpp"

namespace eqs {

std::uint64_t IndexPartition::hash() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const std::vector<int>& v) {
        for (int x : v) {
            h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(x));
            h *= 1099511628211ull;
        }
        h ^= 0xabcdefull;
        h *= 1099511628211ull;
    };
    mix(I1);
    mix(B1);
    mix(I2);
    mix(B2);
    return h;
}

IndexPartition build_partition(const TriMesh& mesh, const PlanarCoords& h1,
                               const PlanarCoords& h2, double radius) {
    const int n = mesh.vertex_count();
    if (h1.size() != n || h2.size() != n) {
        throw RegionMismatchError("build_partition: chart vectors do not match the mesh");
    }
    IndexPartition p;
    p.radius = radius;
    p.in_I1.assign(n, 0);
    p.in_I2.assign(n, 0);
    for (int v = 0; v < n; ++v) {
        if (std::abs(h1[v]) < radius) {
            p.in_I1[v] = 1;
            p.I1.push_back(v);
        }
        if (std::abs(h2[v]) < radius) {
            p.in_I2[v] = 1;
            p.I2.push_back(v);
        }
    }
    auto build_ring = [&mesh, n](const std::vector<char>& in_I, std::vector<int>& B) {
        std::vector<char> in_B(n, 0);
        for (int v = 0; v < n; ++v) {
            if (in_I[v]) continue;
            for (int u : mesh.vertex_neighbors[v]) {
                if (in_I[u]) {
                    in_B[v] = 1;
                    break;
                }
            }
        }
        for (int v = 0; v < n; ++v) {
            if (in_B[v]) B.push_back(v);
        }
    };
    build_ring(p.in_I1, p.B1);
    build_ring(p.in_I2, p.B2);

    if (p.I1.empty() || p.I2.empty()) {
        throw EmptyInteriorError("a chart interior is empty; the initial map is not centered");
    }
    if (p.B1.empty() || p.B2.empty()) {
        throw EmptyBoundaryError("a chart boundary ring is empty; the whole mesh fell inside one chart disk");
    }

    auto build_local = [n](const std::vector<int>& I, const std::vector<int>& B, std::vector<int>& loc) {
        loc.assign(n, -1);
        int idx = 0;
        for (int v : I) loc[v] = idx++;
        for (int v : B) loc[v] = idx++;
    };
    build_local(p.I1, p.B1, p.loc1);
    build_local(p.I2, p.B2, p.loc2);

    validate_partition(p, mesh);
    return p;
}

void validate_partition(const IndexPartition& p, const TriMesh& mesh) {
    for (int region : {1, 2}) {
        const auto& in_I = p.interior_mask(region);
        const auto& loc = p.local(region);
        for (int v : p.interior(region)) {
            for (int u : mesh.vertex_neighbors[v]) {
                if (loc[u] < 0) {
                    throw TopologyError("partition invariant broken: interior vertex has a neighbor outside I and B");
                }
            }
        }
        for (int v : p.boundary(region)) {
            if (in_I[v]) throw TopologyError("partition invariant broken: I and B overlap");
        }
    }
    // The transfer selections require each ring to live inside the other
    // chart's interior.
    for (int v : p.B1) {
        if (!p.in_I2[v]) throw TopologyError("partition invariant broken: B1 not contained in I2");
    }
    for (int v : p.B2) {
        if (!p.in_I1[v]) throw TopologyError("partition invariant broken: B2 not contained in I1");
    }
}

}  // namespace eqs
