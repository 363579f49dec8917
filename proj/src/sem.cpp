#include "equisphere/sem.hpp"

#include <cmath>
#include <iostream>
#include <limits>

#include "equisphere/errors.hpp"

namespace eqs {

namespace {

// Rate histories are only needed over the trailing estimation window.
constexpr std::size_t kRateWindow = 150;

Eigen::VectorXcd gather(const PlanarCoords& h, const std::vector<int>& ids) {
    Eigen::VectorXcd out(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) out[i] = h[ids[i]];
    return out;
}

void rebuild_region(const TriMesh& mesh, ParamState& state, int region, const SemConfig& config) {
    StretchLaplacian L = assemble_laplacian(mesh, state.f, region, state.partition);
    InteriorSolver::Options opts;
    opts.iterative = config.iterative_solver;
    auto solver = std::make_unique<InteriorSolver>(PartitionedSystem::from_laplacian(L), opts);
    if (region == 1) {
        state.L1 = std::move(L);
        state.solver1 = std::move(solver);
    } else {
        state.L2 = std::move(L);
        state.solver2 = std::move(solver);
    }
}

// Shared body of the two half-steps. Region 1 reads chart 2 and vice versa.
void half_step(const TriMesh& mesh, ParamState& state, int region, const SemConfig& config) {
    const PlanarCoords& other = region == 1 ? state.h2 : state.h1;
    PlanarCoords w = invert_plane(other);

    if (config.fresh_laplacian) {
        // Evaluate the weights at the pre-solve positions (fresh ring data)
        // instead of the previous half-step's positions.
        state.f = lift_to_sphere(region == 1 ? w : invert_plane(w));
        rebuild_region(mesh, state, region, config);
    }

    const auto& interior = state.partition.interior(region);
    const auto& boundary = state.partition.boundary(region);
    const InteriorSolver& solver = region == 1 ? *state.solver1 : *state.solver2;
    const Eigen::VectorXcd h_int = solver.solve_interior(gather(w, boundary));
    for (std::size_t i = 0; i < interior.size(); ++i) w[interior[i]] = h_int[i];

    if (region == 1) {
        state.h1 = std::move(w);
        state.h2 = invert_plane(state.h1);
    } else {
        state.h2 = std::move(w);
        state.h1 = invert_plane(state.h2);
    }
    state.f = lift_to_sphere(state.h1);
    if (!config.fresh_laplacian) rebuild_region(mesh, state, region, config);
}

double evaluate_energy(const TriMesh& mesh, const ParamState& state) {
    return sphere_stretch_energy(mesh, state.f, state.h1, state.h2, state.face_owner);
}

}  // namespace

std::string to_string(Termination t) {
    switch (t) {
        case Termination::tolerance: return "tolerance";
        case Termination::max_iter: return "max_iter";
        case Termination::stagnation: return "stagnation";
        case Termination::quasi_periodic_suspected: return "quasi_periodic_suspected";
    }
    return "unknown";
}

ParamState fix_indices(const TriMesh& mesh, const Positions& f0, const SemConfig& config) {
    if (config.radius <= 1.0) {
        throw Error("fix_indices: the partition radius must exceed 1");
    }
    ParamState state;
    state.f = f0;

    // Working vector in chart-2 parity so the first inversion lands in
    // chart 1 (the chart of f0 itself).
    PlanarCoords w = invert_plane(project_to_plane(f0));
    for (int pass = 0; pass < config.warmup; ++pass) {
        for (int region : {1, 2}) {
            w = invert_plane(w);
            const PlanarCoords& h1c = region == 1 ? w : invert_plane(w);
            const PlanarCoords h2c = invert_plane(h1c);
            IndexPartition part = build_partition(mesh, h1c, h2c, config.radius);

            StretchLaplacian L = assemble_laplacian(mesh, state.f, region, part);
            InteriorSolver::Options opts;
            opts.iterative = config.iterative_solver;
            InteriorSolver solver(PartitionedSystem::from_laplacian(L), opts);
            const Eigen::VectorXcd h_int = solver.solve_interior(gather(w, part.boundary(region)));
            const auto& interior = part.interior(region);
            for (std::size_t i = 0; i < interior.size(); ++i) w[interior[i]] = h_int[i];

            state.h1 = region == 1 ? w : invert_plane(w);
            state.h2 = invert_plane(state.h1);
            state.f = lift_to_sphere(state.h1);
        }
    }

    state.partition = build_partition(mesh, state.h1, state.h2, config.radius);
    state.partition_hash = state.partition.hash();
    state.face_owner = chart_ownership(mesh, state.f);
    state.k = 0;
    rebuild_region(mesh, state, 1, config);
    rebuild_region(mesh, state, 2, config);
    state.energy = evaluate_energy(mesh, state);
    return state;
}

void south_step(const TriMesh& mesh, ParamState& state) {
    half_step(mesh, state, 1, SemConfig{});
}

void north_step(const TriMesh& mesh, ParamState& state) {
    half_step(mesh, state, 2, SemConfig{});
}

SemResult run_sem(const TriMesh& mesh, const SemConfig& config,
                  const std::optional<Positions>& initial_map) {
    Positions f0;
    if (initial_map.has_value()) {
        f0 = *initial_map;
        if (f0.rows() != mesh.vertex_count()) {
            throw RegionMismatchError("initial map has the wrong number of vertices");
        }
        for (Eigen::Index i = 0; i < f0.rows(); ++i) f0.row(i).normalize();
    } else {
        ConformalMap init = conformal_initialize(mesh);
        if (!init.centered) {
            std::cerr << "[equisphere] warning: Moebius centering did not reach tolerance; "
                         "the chart split may be unbalanced\n";
        }
        f0 = std::move(init.f0);
    }

    SemResult result;
    result.state = fix_indices(mesh, f0, config);
    ParamState& state = result.state;
    ConvergenceReport& report = result.report;
    report.initial_energy = state.energy;
    if (config.record_snapshots) {
        // Snapshot index equals the iteration number; index 0 is the
        // warmed-up initial state.
        result.snapshots.push_back({state.h1, state.h2, state.energy});
    }

    Eigen::VectorXd sigma_prev(mesh.face_count());
    for (int t = 0; t < mesh.face_count(); ++t) sigma_prev[t] = stretch_factor(mesh, t, state.f);

    double delta = std::numeric_limits<double>::infinity();
    double delta_prev = 0.0;
    int oscillations = 0;
    int stalled = 0;
    report.termination_reason = Termination::max_iter;

    while (state.k < config.max_iter) {
        const PlanarCoords h1_before = state.h1;
        state.k += 1;

        half_step(mesh, state, 1, config);
        const PlanarCoords h1_post_south = state.h1;
        half_step(mesh, state, 2, config);

        if (state.partition.hash() != state.partition_hash) {
            throw Error("index partition changed after freezing");
        }

        const double energy = evaluate_energy(mesh, state);
        if (!std::isfinite(energy)) {
            throw NonFiniteEnergyError("stretch energy became non-finite at iteration " +
                                       std::to_string(state.k));
        }
        delta = energy - state.energy;
        state.energy = energy;

        report.energy_history.push_back(energy);
        report.delta_history.push_back(delta);

        Eigen::VectorXd sigma(mesh.face_count());
        for (int t = 0; t < mesh.face_count(); ++t) sigma[t] = stretch_factor(mesh, t, state.f);
        report.sigma_history.push_back((sigma - sigma_prev).norm());
        sigma_prev.swap(sigma);

        if (state.k > 3 && delta < -1e-9) {
            std::cerr << "[equisphere] note: energy decreased by " << -delta
                      << " at iteration " << state.k << "\n";
        }

        if (config.record_snapshots) {
            result.snapshots.push_back({h1_post_south, state.h2, energy});
        }
        if (config.track_rates) {
            result.h_B2_history.push_back(gather(state.h2, state.partition.B2));
            result.h_I2_history.push_back(gather(state.h2, state.partition.I2));
            if (!config.record_snapshots && result.h_B2_history.size() > kRateWindow) {
                result.h_B2_history.erase(result.h_B2_history.begin());
                result.h_I2_history.erase(result.h_I2_history.begin());
                result.history_start_k += 1;
            }
        }

        if (config.on_sweep) config.on_sweep(state);

        if (std::abs(delta) <= config.tol) {
            report.termination_reason = Termination::tolerance;
            break;
        }

        // Quasi-periodic heuristic: a long run of sign-alternating deltas
        // whose magnitude stays above tolerance.
        if (state.k >= 2 && delta * delta_prev < 0.0 && std::abs(delta) > config.tol) {
            if (++oscillations >= config.quasi_window) {
                report.termination_reason = Termination::quasi_periodic_suspected;
                break;
            }
        } else {
            oscillations = 0;
        }
        delta_prev = delta;

        if ((state.h1 - h1_before).lpNorm<Eigen::Infinity>() < 1e-14) {
            if (++stalled >= 3) {
                report.termination_reason = Termination::stagnation;
                break;
            }
        } else {
            stalled = 0;
        }
    }

    report.iterations = state.k;
    report.final_stats = stretch_stats(mesh, state.f);
    return result;
}

}  // namespace eqs
