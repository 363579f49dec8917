#pragma once

#include "equisphere/linear_solver.hpp"
#include "equisphere/mesh.hpp"

namespace eqs {

/// Spherical conformal-quality initial map required by the SEM driver.
struct ConformalMap {
    Positions f0;           // unit sphere positions, one row per vertex
    double quality = 0.0;   // mean |cos(image angle) - cos(domain angle)|
    bool centered = false;  // area-weighted mass centering converged
};

/// Classical cotangent Laplacian of the mesh itself (no stretch weights):
/// off-diagonal -(cot a + cot b)/2, diagonal the negative row sum.
SparseMat cot_laplacian(const TriMesh& mesh);

struct ConformalInitOptions {
    double pin_circumradius = 10.0;
    double center_tol = 1e-6;
    int max_center_iters = 100;
    double damping = 0.5;
};

/// Punctured harmonic layout plus Moebius mass centering: the most regular
/// face is pinned to a plane equilateral triangle, every other vertex is
/// solved harmonically, and the lifted sphere map is re-balanced until the
/// area-weighted mass center (nearly) vanishes.
ConformalMap conformal_initialize(const TriMesh& mesh, const ConformalInitOptions& options = {});

/// One Moebius rebalancing step: the sphere automorphism with parameter c
/// (|c| < 1) applied to all rows of f.
void moebius_shift(Positions& f, const Vec3& c);

/// Area-weighted mass center sum(a_l f_l) / sum(a_l) with lumped vertex
/// areas from the domain mesh.
Vec3 mass_center(const TriMesh& mesh, const Positions& f);

}  // namespace eqs
