#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "equisphere/conformal_init.hpp"
#include "equisphere/linear_solver.hpp"
#include "equisphere/mesh.hpp"
#include "equisphere/partition.hpp"
#include "equisphere/stretch_laplacian.hpp"

namespace eqs {

struct SemConfig {
    double tol = 1e-6;
    double radius = 1.1;
    int max_iter = 500;
    int warmup = 3;
    bool record_snapshots = false;  // keep full chart vectors per iteration
    bool track_rates = true;        // keep region-2 block history for rate plots
    bool iterative_solver = false;
    int quasi_window = 50;          // sign-flip run length for the quasi-periodic flag
    // Assemble each region's weights right before its solve instead of at
    // the previous half-step's positions (the half-lag written in the
    // iteration equations). The lagged form is what the error-transfer
    // diagnostics validate.
    bool fresh_laplacian = false;

    /// Observer called after each full sweep (not serialized).
    std::function<void(const struct ParamState&)> on_sweep;
};

/// The iterate: full chart vectors (h2 = invert(h1)), canonical sphere
/// positions f = lift(h1), the frozen index partition, and the two region
/// Laplacians with their factorizations (each assembled at its own latest
/// half-step positions).
struct ParamState {
    PlanarCoords h1, h2;
    Positions f;
    IndexPartition partition;
    std::uint64_t partition_hash = 0;
    // Face split for the energy form, frozen with the index sets so the
    // per-sweep energies are comparable.
    std::vector<std::int8_t> face_owner;
    int k = 0;
    double energy = 0.0;

    StretchLaplacian L1, L2;
    std::unique_ptr<InteriorSolver> solver1, solver2;
};

/// Post-half-step chart vectors of one iteration, for diagnostics.
struct Snapshot {
    PlanarCoords h1;  // after the region-1 half-step
    PlanarCoords h2;  // after the region-2 half-step
    double energy = 0.0;
};

enum class Termination { tolerance, max_iter, stagnation, quasi_periodic_suspected };

std::string to_string(Termination t);

struct ConvergenceReport {
    std::vector<double> energy_history;  // E per full sweep, k = 1..iterations
    std::vector<double> delta_history;
    std::vector<double> sigma_history;   // ||sigma_k - sigma_{k-1}||_2
    double initial_energy = 0.0;
    StretchStats final_stats;
    int iterations = 0;
    Termination termination_reason = Termination::max_iter;
};

struct SemResult {
    ParamState state;
    ConvergenceReport report;
    std::vector<Snapshot> snapshots;           // when record_snapshots
    std::vector<Eigen::VectorXcd> h_B2_history;  // when track_rates
    std::vector<Eigen::VectorXcd> h_I2_history;
    int history_start_k = 1;  // iteration number of h_*_history[0]
};

/// Warm-up passes of the driver: three alternating solve/invert rounds that
/// settle the chart split, after which the index sets are frozen and both
/// region Laplacians are assembled at the settled positions.
ParamState fix_indices(const TriMesh& mesh, const Positions& f0, const SemConfig& config);

/// One region-1 half-step: transfer boundary values from the other chart by
/// inversion, solve the interior system with the held Laplacian, lift, and
/// reassemble this region's Laplacian at the new positions.
void south_step(const TriMesh& mesh, ParamState& state);

/// Mirror half-step for region 2.
void north_step(const TriMesh& mesh, ParamState& state);

/// Full driver: initialize (or take a precomputed spherical map), warm up,
/// then alternate half-steps until the energy delta passes the tolerance.
SemResult run_sem(const TriMesh& mesh, const SemConfig& config,
                  const std::optional<Positions>& initial_map = std::nullopt);

}  // namespace eqs
