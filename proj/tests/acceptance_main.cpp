// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion prints its measured quantity next to the bound.
#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <random>

#include "equisphere/diagnostics.hpp"
#include "equisphere/report.hpp"
#include "equisphere/synth.hpp"
#include "../tests/support.hpp"

using namespace eqs;
namespace tst = eqs::testing;

namespace {

int g_failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void report(int id, const char* name, bool pass, const std::string& detail, double seconds) {
    std::printf("[%s] criterion %d: %s (%s, %.1fs)\n", pass ? "PASS" : "FAIL", id, name,
                detail.c_str(), seconds);
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[256];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

// --- 1: weight-form equivalence -----------------------------------------
void criterion_weight_forms() {
    Timer timer;
    std::mt19937_64 rng(101);
    int done = 0;
    double worst = 0.0;
    while (done < 1000) {
        const TriMesh mesh = tst::random_octahedron(rng);
        const Positions img = tst::random_positions(mesh, rng);
        bool degenerate = false;
        for (int t = 0; t < mesh.face_count(); ++t) {
            const auto& tri = mesh.faces[t];
            if (face_area(Vec3(img.row(tri[0])), Vec3(img.row(tri[1])), Vec3(img.row(tri[2]))) < 1e-3) {
                degenerate = true;
            }
        }
        if (degenerate) continue;
        const int e = static_cast<int>(rng() % mesh.edge_count());
        const double wc = edge_weight_cot(mesh, e, img);
        const double wd = edge_weight_dot(mesh, e, img);
        worst = std::max(worst, std::abs(wc - wd) / std::max(1.0, std::abs(wd)));
        ++done;
    }
    report(1, "weight-form equivalence over 1000 random stencils", worst <= 1e-12,
           fmt("max |cot-dot| = %.3e, bound 1e-12", worst), timer.seconds());
}

// --- 2: projection algebra ----------------------------------------------
void criterion_projection_algebra() {
    Timer timer;
    std::mt19937_64 rng(102);
    double worst_rt = 0.0, worst_inv = 0.0, worst_flip = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const Vec3 p = tst::random_unit_vector(rng);
        if (std::abs(std::abs(p.z()) - 1.0) < 1e-6) continue;
        const Complex z = stereographic_project(p);
        worst_rt = std::max(worst_rt, (inverse_stereographic(z) - p).norm());
        worst_inv = std::max(worst_inv, std::abs(invert_plane(invert_plane(z)) - z) / std::max(1.0, std::abs(z)));
        worst_flip = std::max(worst_flip,
                              (inverse_stereographic(invert_plane(z)) - Vec3(p.x(), p.y(), -p.z())).norm());
    }
    const bool pass = worst_rt <= 1e-12 && worst_inv <= 1e-13 && worst_flip <= 1e-12;
    report(2, "projection round-trip / involution / z-flip", pass,
           fmt("rt %.2e<=1e-12, inv %.2e<=1e-13, flip %.2e<=1e-12", worst_rt, worst_inv, worst_flip),
           timer.seconds());
}

// --- 3: weight-delta decomposition identity ------------------------------
void criterion_weight_delta() {
    Timer timer;
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> mag(0.2, 3.0);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
    std::normal_distribution<double> gauss(0.0, 1e-2);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const TriMesh mesh = tst::random_octahedron(rng);
        PlanarCoords h_old(mesh.vertex_count());
        for (int i = 0; i < mesh.vertex_count(); ++i) h_old[i] = std::polar(mag(rng), ang(rng));
        PlanarCoords h_new = h_old;
        for (int i = 0; i < mesh.vertex_count(); ++i) {
            h_new[i] += Complex(gauss(rng), gauss(rng)) * (1.0 + std::abs(h_old[i]));
        }
        const int e = static_cast<int>(rng() % mesh.edge_count());
        worst = std::max(worst, weight_delta(mesh, e, h_new, h_old).residual());
    }
    report(3, "weight-delta decomposition identity", worst <= 1e-10,
           fmt("max residual %.3e, bound 1e-10", worst), timer.seconds());
}

// --- 4 & 5: diagnostic run identities ------------------------------------
void criterion_diagnostic_run() {
    Timer timer4;
    const TriMesh mesh = normalize_area(make_ellipsoid(1.0, 1.0, 1.5, 3));
    SemConfig config;
    config.tol = 1e-16;   // run a fixed window of iterations
    config.max_iter = 24;
    config.record_snapshots = true;
    const SemResult result = run_sem(mesh, config);
    const auto& snaps = result.snapshots;
    const IndexPartition& part = result.state.partition;

    double worst_h = 0.0;
    for (std::size_t k = 1; k < snaps.size(); ++k) {
        worst_h = std::max(worst_h,
                           assemble_H(mesh, part, 1, snaps[k].h1, snaps[k - 1].h1).identity_residual);
        worst_h = std::max(worst_h,
                           assemble_H(mesh, part, 2, snaps[k].h2, snaps[k - 1].h2).identity_residual);
    }
    report(4, "H-assembly identity on the diagnostic run",
           snaps.size() >= 20 && worst_h <= 1e-9,
           fmt("%zu iterations, max relative residual %.3e, bound 1e-9", snaps.size(), worst_h),
           timer4.seconds());

    // Criterion 5 reuses a smaller run so the dense products stay cheap.
    Timer timer5;
    const TriMesh small = normalize_area(make_ellipsoid(1.0, 1.0, 1.5, 2));
    SemConfig config5;
    config5.tol = 1e-16;
    config5.max_iter = 14;
    config5.record_snapshots = true;
    const SemResult run5 = run_sem(small, config5);
    const auto& s5 = run5.snapshots;
    const IndexPartition& part5 = run5.state.partition;

    double worst_rec = 0.0;
    SpectralTracker tracker;
    for (int k = 2; k <= 10; ++k) {
        const ErrorTransferBundle bundle =
            build_transfer(small, part5, s5[k - 2], s5[k - 1], s5[k], s5[k + 1], k);
        worst_rec = std::max(worst_rec, bundle.recursion_residual);
        tracker.push(bundle);
    }
    const auto& radius = tracker.series().spectral_radius;
    bool bounded = true, tail_monotone = true;
    for (double r : radius) bounded &= r <= 1.5;
    for (std::size_t i = radius.size() / 2; i + 1 < radius.size(); ++i) {
        tail_monotone &= radius[i + 1] <= radius[i] + 1e-9;
    }
    report(5, "error-transfer recursion and spectral-radius trend",
           worst_rec <= 1e-8 && bounded && tail_monotone,
           fmt("max recursion residual %.3e<=1e-8, radius max %.3f<=1.5, tail non-increasing=%d",
               worst_rec, *std::max_element(radius.begin(), radius.end()), int(tail_monotone)),
           timer5.seconds());
}

// --- 6: equiareal quality across refinement ------------------------------
void criterion_equiareal_quality() {
    Timer timer;
    double prev_mean_gap = 1e9, prev_energy_gap = 1e9;
    bool decreasing = true, final_ok = false;
    std::string detail;
    for (int level : {3, 4, 5}) {
        const TriMesh mesh = normalize_area(make_ellipsoid(1.0, 1.0, 1.5, level));
        SemConfig config;
        const SemResult result = run_sem(mesh, config);
        const StretchStats& st = result.report.final_stats;
        const double mean_gap = std::abs(st.mean - 1.0);
        const double energy_gap = 4.0 * M_PI - st.energy;
        decreasing &= mean_gap < prev_mean_gap && energy_gap < prev_energy_gap;
        prev_mean_gap = mean_gap;
        prev_energy_gap = energy_gap;
        if (level == 5) {
            final_ok = mean_gap <= 1e-2 && st.stddev <= 5e-2 && energy_gap <= 5e-2 &&
                       energy_gap > 0.0 && st.folded_faces == 0;
            detail = fmt("finest: mean-1 %.2e<=1e-2, std %.2e<=5e-2, 4pi-E %.2e<=5e-2, folds %d",
                         mean_gap, st.stddev, energy_gap, st.folded_faces);
        }
    }
    report(6, "equiareal quality improves with refinement", decreasing && final_ok,
           detail + (decreasing ? ", strictly decreasing" : ", NOT decreasing"), timer.seconds());
}

// --- 7: R-linear trend ----------------------------------------------------
void criterion_r_linear() {
    Timer timer;
    const TriMesh mesh = normalize_area(make_ellipsoid(1.0, 1.0, 1.5, 3));
    SemConfig config;
    const SemResult result = run_sem(mesh, config);
    const RateSeries series = r_linear_estimate(result.h_B2_history, result.h_B2_history.back(),
                                                result.history_start_k, 40);
    bool tail_ok = series.rate.size() >= 30;
    int checked = 0;
    for (std::size_t i = series.rate.size() >= 30 ? series.rate.size() - 30 : 0; i < series.rate.size(); ++i) {
        tail_ok &= series.rate[i] < 1.0;
        ++checked;
    }

    // Synthetic geometric sequence with ratio 0.9.
    Eigen::VectorXcd u = Eigen::VectorXcd::Ones(4);
    std::vector<Eigen::VectorXcd> history;
    for (int k = 1; k <= 210; ++k) history.push_back(std::pow(0.9, k) * u);
    const RateSeries synth = r_linear_estimate(history, Eigen::VectorXcd::Zero(4), 1, 60);
    bool synth_ok = false;
    double synth_rate = 0.0;
    for (std::size_t i = 0; i < synth.k.size(); ++i) {
        if (synth.k[i] == 200) {
            synth_rate = synth.rate[i];
            synth_ok = std::abs(synth.rate[i] - 0.9) <= 1e-3;
        }
    }
    report(7, "R-linear rate estimates", tail_ok && synth_ok,
           fmt("run tail: %d values < 1; synthetic rate %.5f = 0.9 +- 1e-3", checked, synth_rate),
           timer.seconds());
}

// --- 8: fixed-point and harmonic sanities ---------------------------------
void criterion_fixed_point() {
    Timer timer;
    const TriMesh mesh = normalize_area(make_icosphere(3));
    SemConfig config;
    config.tol = 1e-13;
    config.max_iter = 3000;
    SemResult result = run_sem(mesh, config);
    const PlanarCoords h1_before = result.state.h1;
    south_step(mesh, result.state);
    north_step(mesh, result.state);
    const double move = (result.state.h1 - h1_before).lpNorm<Eigen::Infinity>();

    // Constant boundary data and transfer-of-constants on a real system.
    const StretchLaplacian& L1 = result.state.L1;
    InteriorSolver solver(PartitionedSystem::from_laplacian(L1));
    const Complex c(0.4, -1.1);
    const Eigen::VectorXcd interior =
        solver.solve_interior(Eigen::VectorXcd::Constant(L1.m_boundary, c));
    double worst_const = 0.0;
    for (Eigen::Index i = 0; i < interior.size(); ++i) {
        worst_const = std::max(worst_const, std::abs(interior[i] - c));
    }
    const Eigen::VectorXd ones_out = solver.apply_transfer() * Eigen::VectorXd::Ones(L1.m_boundary);
    const double worst_ones = (ones_out - Eigen::VectorXd::Ones(L1.n_interior)).lpNorm<Eigen::Infinity>();

    const bool pass = move <= 1e-10 && worst_const <= 1e-10 && worst_ones <= 1e-10;
    report(8, "fixed-point and harmonic sanities", pass,
           fmt("restep move %.2e, const-interior %.2e, A*1-1 %.2e, bounds 1e-10", move, worst_const,
               worst_ones),
           timer.seconds());
}

// --- 9: topology gate -------------------------------------------------------
void criterion_topology_gate() {
    Timer timer;
    bool torus_rejected = false, disk_rejected = false;
    const std::string torus_path = tst::tmp_path("acc_torus.off");
    tst::write_torus_off(torus_path);
    try {
        load_mesh(torus_path);
    } catch (const TopologyError&) {
        torus_rejected = true;
    }
    std::remove(torus_path.c_str());

    const std::string disk_path = tst::tmp_path("acc_disk.off");
    tst::write_open_disk_off(disk_path);
    try {
        load_mesh(disk_path);
    } catch (const TopologyError&) {
        disk_rejected = true;
    }
    std::remove(disk_path.c_str());

    bool shapes_ok = true;
    try {
        normalize_area(make_tetrahedron(1.0));
        normalize_area(make_icosphere(3));
        normalize_area(make_ellipsoid(1.0, 1.0, 1.5, 3));
        normalize_area(make_gaussian_bump_sphere(3, 7));
    } catch (const Error&) {
        shapes_ok = false;
    }
    report(9, "topology gate", torus_rejected && disk_rejected && shapes_ok,
           fmt("torus rejected=%d, open disk rejected=%d, four synthetic shapes accepted=%d",
               int(torus_rejected), int(disk_rejected), int(shapes_ok)),
           timer.seconds());
}

}  // namespace

int main() {
    criterion_weight_forms();
    criterion_projection_algebra();
    criterion_weight_delta();
    criterion_diagnostic_run();
    criterion_equiareal_quality();
    criterion_r_linear();
    criterion_fixed_point();
    criterion_topology_gate();
    if (g_failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criteria FAILED\n", g_failures);
    return 1;
}
