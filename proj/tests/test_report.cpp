#include <doctest.h>

#include <cstdio>

#include "equisphere/report.hpp"
#include "equisphere/synth.hpp"
#include "support.hpp"

using namespace eqs;
namespace tst = eqs::testing;

TEST_CASE("report JSON round-trips through its schema") {
    const TriMesh mesh = normalize_area(make_icosphere(2));
    SemConfig config;
    config.max_iter = 5;
    config.tol = 1e-16;
    const SemResult result = run_sem(mesh, config);
    const RunReport report = make_report(mesh, config, result);

    const std::string path = tst::tmp_path("report.json");
    write_report(report, path);
    const RunReport back = read_report(path);
    std::remove(path.c_str());

    CHECK(back.vertex_count == report.vertex_count);
    CHECK(back.face_count == report.face_count);
    CHECK(back.n1 == report.n1);
    CHECK(back.m2 == report.m2);
    CHECK(back.config.tol == report.config.tol);
    CHECK(back.config.radius == report.config.radius);
    CHECK(back.convergence.iterations == report.convergence.iterations);
    CHECK(back.convergence.termination_reason == report.convergence.termination_reason);
    CHECK(back.convergence.initial_energy == report.convergence.initial_energy);
    REQUIRE(back.convergence.energy_history.size() == report.convergence.energy_history.size());
    for (std::size_t i = 0; i < report.convergence.energy_history.size(); ++i) {
        CHECK(back.convergence.energy_history[i] == report.convergence.energy_history[i]);
        CHECK(back.convergence.delta_history[i] == report.convergence.delta_history[i]);
        CHECK(back.convergence.sigma_history[i] == report.convergence.sigma_history[i]);
    }
    CHECK(back.convergence.final_stats.mean == report.convergence.final_stats.mean);
    CHECK(back.convergence.final_stats.energy == report.convergence.final_stats.energy);
    CHECK(back.convergence.final_stats.folded_faces == report.convergence.final_stats.folded_faces);
}
