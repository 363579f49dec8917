#include <doctest.h>

#include "equisphere/errors.hpp"
#include "equisphere/sem.hpp"
#include "equisphere/synth.hpp"
#include "support.hpp"

using namespace eqs;

TEST_CASE("partition build: thin ring radius still yields valid sets") {
    const TriMesh mesh = normalize_area(make_icosphere(2));
    PlanarCoords h1, h2;
    charts_from_positions(mesh.positions(), h1, h2);
    const IndexPartition part = build_partition(mesh, h1, h2, 1.0 + 1e-9);
    validate_partition(part, mesh);
    CHECK(part.n1() > 0);
    CHECK(part.m1() > 0);
    // Interior sets cover roughly half the sphere each.
    CHECK(std::abs(part.n1() - part.n2()) < mesh.vertex_count() / 4);
}

TEST_CASE("partition build: all moduli inside the band leaves no ring") {
    const TriMesh mesh = make_icosphere(0);
    PlanarCoords h1(mesh.vertex_count());
    for (int i = 0; i < mesh.vertex_count(); ++i) {
        h1[i] = std::polar(0.95 + 0.1 * i / mesh.vertex_count(), 0.37 * i);
    }
    CHECK_THROWS_AS(build_partition(mesh, h1, invert_plane(h1), 1.1), EmptyBoundaryError);
}

TEST_CASE("fix_indices freezes a balanced partition on the icosphere") {
    const TriMesh mesh = normalize_area(make_icosphere(3));
    SemConfig config;
    ParamState state = fix_indices(mesh, conformal_initialize(mesh).f0, config);
    const int n = mesh.vertex_count();
    CHECK(state.partition.n1() > n / 3);
    CHECK(state.partition.n2() > n / 3);
    CHECK(state.partition.m1() < state.partition.n1() / 2);
    CHECK(state.partition.m2() < state.partition.n2() / 2);
    CHECK(state.partition_hash == state.partition.hash());
    // Cross-chart consistency of the state.
    for (int v = 0; v < n; ++v) {
        CHECK(std::abs(state.h2[v] * std::conj(state.h1[v]) - Complex(1, 0)) <= 1e-12);
    }
}

TEST_CASE("max_iter = 0 returns the warmed-up initial state") {
    const TriMesh mesh = normalize_area(make_icosphere(2));
    SemConfig config;
    config.max_iter = 0;
    const SemResult result = run_sem(mesh, config);
    CHECK(result.report.iterations == 0);
    CHECK(result.report.termination_reason == Termination::max_iter);
    CHECK(result.report.energy_history.empty());
}

TEST_CASE("icosphere run converges quickly to the round map") {
    const TriMesh mesh = normalize_area(make_icosphere(4));
    SemConfig config;
    const SemResult result = run_sem(mesh, config);
    CHECK(result.report.termination_reason == Termination::tolerance);
    CHECK(result.report.iterations <= 10);
    CHECK(std::abs(result.report.final_stats.mean - 1.0) <= 1e-3);
    CHECK(result.report.final_stats.folded_faces == 0);
    // Histories stay aligned.
    CHECK(result.report.energy_history.size() == static_cast<std::size_t>(result.report.iterations));
    CHECK(result.report.delta_history.size() == result.report.energy_history.size());
    CHECK(result.report.sigma_history.size() == result.report.energy_history.size());
}

TEST_CASE("ellipsoid run: energy climbs to 4*pi, stays below it, no folds") {
    const TriMesh mesh = normalize_area(make_ellipsoid(1.0, 1.0, 1.5, 3));
    SemConfig config;
    config.record_snapshots = true;
    const SemResult result = run_sem(mesh, config);
    CHECK(result.report.termination_reason == Termination::tolerance);

    const double four_pi = 4.0 * M_PI;
    double prev = result.report.initial_energy;
    int violations = 0;
    for (std::size_t i = 0; i < result.report.energy_history.size(); ++i) {
        const double e = result.report.energy_history[i];
        CHECK(e <= four_pi + 1e-3);
        if (i > 3 && e < prev - 1e-9) ++violations;
        prev = e;
    }
    CHECK(violations == 0);
    CHECK(four_pi - result.state.energy < 0.2);
    CHECK(result.report.final_stats.folded_faces == 0);
    CHECK(std::abs(result.report.final_stats.mean - 1.0) <= 1e-2);

    // Transfer consistency: ring values are the inverted previous-chart
    // interior values, so the moduli are reciprocal.
    const auto& snaps = result.snapshots;
    REQUIRE(snaps.size() >= 2);
    const std::size_t k = snaps.size() / 2;
    double worst = 0.0;
    for (int v : result.state.partition.B1) {
        worst = std::max(worst, std::abs(std::abs(snaps[k].h1[v]) * std::abs(snaps[k - 1].h2[v]) - 1.0));
    }
    CHECK(worst <= 1e-13);
}

TEST_CASE("converged state is a numerical fixed point of both half-steps") {
    const TriMesh mesh = normalize_area(make_icosphere(3));
    SemConfig config;
    config.tol = 1e-13;
    config.max_iter = 3000;
    SemResult result = run_sem(mesh, config);
    ParamState& state = result.state;
    const PlanarCoords h1_before = state.h1;
    south_step(mesh, state);
    north_step(mesh, state);
    CHECK((state.h1 - h1_before).lpNorm<Eigen::Infinity>() <= 1e-10);
}
