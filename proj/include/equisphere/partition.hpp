#pragma once

#include <cstdint>
#include <vector>

#include "equisphere/mesh.hpp"

namespace eqs {

/// Frozen interior/boundary index sets of the two hemispherical charts.
/// For chart s, I_s = {i : |h_i| < r} and B_s is the ring of exterior
/// vertices with a neighbor in I_s. Region 1 is the chart of the canonical
/// frame (lower hemisphere as the unit disk), region 2 its inversion.
struct IndexPartition {
    std::vector<int> I1, B1, I2, B2;  // ascending global vertex ids
    double radius = 1.1;

    // loc1[v]: local index of v in the region-1 ordering (I1 first, then
    // B1), or -1. Same for loc2.
    std::vector<int> loc1, loc2;
    std::vector<char> in_I1, in_I2;

    int n1() const { return static_cast<int>(I1.size()); }
    int m1() const { return static_cast<int>(B1.size()); }
    int n2() const { return static_cast<int>(I2.size()); }
    int m2() const { return static_cast<int>(B2.size()); }

    const std::vector<int>& interior(int region) const { return region == 1 ? I1 : I2; }
    const std::vector<int>& boundary(int region) const { return region == 1 ? B1 : B2; }
    const std::vector<int>& local(int region) const { return region == 1 ? loc1 : loc2; }
    const std::vector<char>& interior_mask(int region) const { return region == 1 ? in_I1 : in_I2; }

    /// FNV-1a over all four index sets; used to assert immutability.
    std::uint64_t hash() const;
};

/// Build both regions' sets from one consistent pair of chart vectors
/// (h2 = invert(h1)), so the containments B1 within I2 and B2 within I1
/// hold exactly.
IndexPartition build_partition(const TriMesh& mesh, const PlanarCoords& h1,
                               const PlanarCoords& h2, double radius);

/// Check the partition set invariants; throws on violation.
void validate_partition(const IndexPartition& p, const TriMesh& mesh);

}  // namespace eqs
