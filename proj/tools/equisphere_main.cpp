#include <CLI11.hpp>
#include <Eigen/Core>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "equisphere/diagnostics.hpp"
#include "equisphere/report.hpp"
#include "equisphere/synth.hpp"

namespace {

using namespace eqs;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitMaxIter = 2;
constexpr int kExitQuasiPeriodic = 3;

void apply_thread_cap() {
    if (const char* env = std::getenv("SEM_THREADS")) {
        const int threads = std::atoi(env);
        if (threads > 0) Eigen::setNbThreads(threads);
    }
}

struct ParamArgs {
    std::string input;
    std::string output = "out.obj";
    std::string report_path;
    std::string init_path;
    std::string config_path;
    int snapshot_every = 0;
    SemConfig config;
};

// Plain key=value configuration file; command-line flags override it.
void load_config_file(const std::string& path, ParamArgs& args) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (key.empty()) continue;
        if (key == "tol") args.config.tol = std::stod(value);
        else if (key == "radius") args.config.radius = std::stod(value);
        else if (key == "max_iter") args.config.max_iter = std::stoi(value);
        else if (key == "warmup") args.config.warmup = std::stoi(value);
        else if (key == "init_bypass_path") args.init_path = value;
        else if (key == "report_path") args.report_path = value;
        else if (key == "snapshot_every") args.snapshot_every = std::stoi(value);
        else throw ParseError("unknown config key: " + key);
    }
}

int run_param(const ParamArgs& args) {
    TriMesh mesh = normalize_area(load_mesh(args.input));

    std::optional<Positions> init;
    if (!args.init_path.empty()) {
        TriMesh init_mesh = load_mesh(args.init_path);
        if (init_mesh.vertex_count() != mesh.vertex_count()) {
            throw RegionMismatchError("initial map vertex count does not match the input mesh");
        }
        init = init_mesh.positions();
    }

    SemConfig config = args.config;
    int sweep = 0;
    if (args.snapshot_every > 0) {
        config.on_sweep = [&](const ParamState& state) {
            ++sweep;
            if (sweep % args.snapshot_every == 0) {
                char name[64];
                std::snprintf(name, sizeof(name), "_k%04d.obj", sweep);
                save_obj(mesh, state.f, args.output + name);
            }
        };
    }

    const SemResult result = run_sem(mesh, config, init);
    save_obj(mesh, result.state.f, args.output);
    if (!args.report_path.empty()) {
        write_report(make_report(mesh, config, result), args.report_path);
    }

    const StretchStats& stats = result.report.final_stats;
    std::fprintf(stderr,
                 "iterations=%d reason=%s energy=%.10g mean_sigma=%.6g std_sigma=%.6g folded=%d\n",
                 result.report.iterations, to_string(result.report.termination_reason).c_str(),
                 stats.energy, stats.mean, stats.stddev, stats.folded_faces);

    switch (result.report.termination_reason) {
        case Termination::tolerance:
        case Termination::stagnation:
            return kExitOk;
        case Termination::max_iter:
            return kExitMaxIter;
        case Termination::quasi_periodic_suspected:
            return kExitQuasiPeriodic;
    }
    return kExitError;
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& columns) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open CSV for writing: " + path);
    out << header << "\n";
    const std::size_t rows = columns.empty() ? 0 : columns[0].size();
    out.precision(17);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) out << ",";
            out << columns[c][r];
        }
        out << "\n";
    }
}

struct DiagnoseArgs {
    std::string input;
    std::string out_dir = ".";
    int window = 60;
    int max_transfer = 10;
    bool force = false;
    SemConfig config;
};

int run_diagnose(const DiagnoseArgs& args) {
    TriMesh mesh = normalize_area(load_mesh(args.input));
    if (mesh.vertex_count() > 5000 && !args.force) {
        std::fprintf(stderr,
                     "mesh has %d vertices; dense error-transfer diagnostics are cubic in size.\n"
                     "Rerun with --force to proceed anyway.\n",
                     mesh.vertex_count());
        return kExitError;
    }

    SemConfig config = args.config;
    config.record_snapshots = true;
    config.track_rates = true;
    const SemResult result = run_sem(mesh, config);
    const auto& snaps = result.snapshots;
    const int m = static_cast<int>(snaps.size());
    if (m < 5) {
        std::fprintf(stderr, "run terminated after %d iterations; need at least 5 for diagnostics\n", m);
        return kExitError;
    }
    const IndexPartition& part = result.state.partition;

    // Lemma decomposition residuals per iteration (max over edges, both charts).
    std::vector<double> ks, lemma_res, h_res;
    for (int k = 1; k < m; ++k) {
        double worst_lemma = 0.0;
        for (int e = 0; e < mesh.edge_count(); ++e) {
            worst_lemma = std::max(worst_lemma,
                                   weight_delta(mesh, e, snaps[k].h1, snaps[k - 1].h1).residual());
            worst_lemma = std::max(worst_lemma,
                                   weight_delta(mesh, e, snaps[k].h2, snaps[k - 1].h2).residual());
        }
        const double res1 = assemble_H(mesh, part, 1, snaps[k].h1, snaps[k - 1].h1).identity_residual;
        const double res2 = assemble_H(mesh, part, 2, snaps[k].h2, snaps[k - 1].h2).identity_residual;
        ks.push_back(k);
        lemma_res.push_back(worst_lemma);
        h_res.push_back(std::max(res1, res2));
    }

    // Error-transfer recursion over the early window, with the running
    // spectral product.
    SpectralTracker tracker;
    std::vector<double> tks, rec_res;
    const int k_last = std::min(args.max_transfer, m - 2);
    for (int k = 2; k <= k_last; ++k) {
        const ErrorTransferBundle bundle =
            build_transfer(mesh, part, snaps[k - 2], snaps[k - 1], snaps[k], snaps[k + 1], k);
        tracker.push(bundle);
        tks.push_back(k);
        rec_res.push_back(bundle.recursion_residual);
    }

    // R-linear rate series over the tail window.
    const RateSeries rate_B2 = r_linear_estimate(result.h_B2_history, result.h_B2_history.back(),
                                                 result.history_start_k, args.window);
    const RateSeries rate_I2 = r_linear_estimate(result.h_I2_history, result.h_I2_history.back(),
                                                 result.history_start_k, args.window);

    write_csv(args.out_dir + "/series_residuals.csv", "k,residual_lemma,residual_H",
              {ks, lemma_res, h_res});
    write_csv(args.out_dir + "/series_recursion.csv", "k,residual_recursion", {tks, rec_res});
    {
        std::vector<double> c0(tracker.series().k.begin(), tracker.series().k.end());
        write_csv(args.out_dir + "/series_transfer.csv", "k,max_abs,spectral_radius",
                  {c0, tracker.series().max_abs, tracker.series().spectral_radius});
    }
    {
        std::vector<double> rk(rate_B2.k.begin(), rate_B2.k.end());
        write_csv(args.out_dir + "/series_rate.csv", "k,rate_B2,rate_I2",
                  {rk, rate_B2.rate, rate_I2.rate});
    }

    const double worst_lemma = *std::max_element(lemma_res.begin(), lemma_res.end());
    const double worst_h = *std::max_element(h_res.begin(), h_res.end());
    const double worst_rec = *std::max_element(rec_res.begin(), rec_res.end());
    const bool pass_lemma = worst_lemma <= 1e-10;
    const bool pass_h = worst_h <= 1e-9;
    const bool pass_rec = worst_rec <= 1e-8;
    std::printf("%s weight-delta decomposition identity (max residual %.3e, bound 1e-10)\n",
                pass_lemma ? "[PASS]" : "[FAIL]", worst_lemma);
    std::printf("%s H-assembly identity (max relative residual %.3e, bound 1e-9)\n",
                pass_h ? "[PASS]" : "[FAIL]", worst_h);
    std::printf("%s error-transfer recursion (max relative residual %.3e, bound 1e-8)\n",
                pass_rec ? "[PASS]" : "[FAIL]", worst_rec);
    return pass_lemma && pass_h && pass_rec ? kExitOk : kExitError;
}

struct SynthArgs {
    std::string shape;
    std::string output = "synth.off";
    int level = 4;
    std::vector<double> axes = {1.0, 1.0, 1.5};
    std::uint64_t seed = 1;
    int bumps = 6;
    double amplitude = 0.12;
    double edge = 1.0;
};

int run_synth(const SynthArgs& args) {
    TriMesh mesh;
    if (args.shape == "icosphere") {
        mesh = make_icosphere(args.level);
    } else if (args.shape == "ellipsoid") {
        if (args.axes.size() != 3) throw ParseError("--axes needs three values");
        mesh = make_ellipsoid(args.axes[0], args.axes[1], args.axes[2], args.level);
    } else if (args.shape == "gaussian-bump-sphere") {
        mesh = make_gaussian_bump_sphere(args.level, args.seed, args.bumps, args.amplitude);
    } else if (args.shape == "tetrahedron") {
        mesh = make_tetrahedron(args.edge);
    } else {
        throw ParseError("unknown shape: " + args.shape +
                         " (expected icosphere, ellipsoid, gaussian-bump-sphere, or tetrahedron)");
    }
    save_off(mesh, args.output);
    std::fprintf(stderr, "wrote %s: %d vertices, %d faces\n", args.output.c_str(),
                 mesh.vertex_count(), mesh.face_count());
    return kExitOk;
}

struct StatsArgs {
    std::string domain;
    std::string mapped;
    std::string output;
};

int run_stats(const StatsArgs& args) {
    TriMesh mesh = normalize_area(load_mesh(args.domain));
    TriMesh mapped = load_mesh(args.mapped);
    if (mapped.vertex_count() != mesh.vertex_count()) {
        throw RegionMismatchError("mapped mesh vertex count does not match the domain mesh");
    }
    Positions f = mapped.positions();
    for (Eigen::Index i = 0; i < f.rows(); ++i) f.row(i).normalize();
    const StretchStats stats = stretch_stats(mesh, f);
    std::ostringstream json;
    json.precision(17);
    json << "{\n  \"sigma_mean\": " << stats.mean << ",\n  \"sigma_std\": " << stats.stddev
         << ",\n  \"energy\": " << stats.energy << ",\n  \"four_pi_gap\": " << 4.0 * M_PI - stats.energy
         << ",\n  \"folded_faces\": " << stats.folded_faces << "\n}\n";
    if (args.output.empty()) {
        std::printf("%s", json.str().c_str());
    } else {
        std::ofstream out(args.output);
        out << json.str();
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    apply_thread_cap();

    CLI::App app{"Area-preserving spherical parameterization of genus-zero meshes"};
    app.require_subcommand(1);

    ParamArgs param;
    // The config file provides defaults, so scan for it before CLI parsing.
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                load_config_file(argv[i + 1], param);
            } catch (const std::exception& e) {
                std::fprintf(stderr, "error: %s\n", e.what());
                return kExitError;
            }
        }
    }
    auto* cmd_param = app.add_subcommand("param", "Compute the spherical equiareal parameterization");
    cmd_param->add_option("input", param.input, "Input mesh (ASCII OFF/OBJ)")->required();
    cmd_param->add_option("-o,--output", param.output, "Output OBJ of unit-sphere positions");
    cmd_param->add_option("--report", param.report_path, "JSON convergence report path");
    cmd_param->add_option("--config", param.config_path, "key=value configuration file");
    cmd_param->add_option("--tol", param.config.tol, "Energy-delta stopping tolerance");
    cmd_param->add_option("--radius", param.config.radius, "Chart partition radius (> 1)");
    cmd_param->add_option("--max-iter", param.config.max_iter, "Iteration cap");
    cmd_param->add_option("--warmup", param.config.warmup, "Index-fixing warm-up passes");
    cmd_param->add_option("--init", param.init_path, "Precomputed spherical map (OBJ), bypassing the initializer");
    cmd_param->add_option("--snapshot-every", param.snapshot_every, "Write the map every N sweeps");

    DiagnoseArgs diag;
    auto* cmd_diagnose = app.add_subcommand("diagnose", "Run convergence-analysis validation on a small mesh");
    cmd_diagnose->add_option("input", diag.input, "Input mesh (ASCII OFF/OBJ)")->required();
    cmd_diagnose->add_option("--out-dir", diag.out_dir, "Directory for CSV series");
    cmd_diagnose->add_option("--window", diag.window, "R-linear estimation window (iterations)");
    cmd_diagnose->add_option("--max-transfer", diag.max_transfer, "Last k of the dense transfer check");
    cmd_diagnose->add_option("--tol", diag.config.tol, "Energy-delta stopping tolerance");
    cmd_diagnose->add_option("--radius", diag.config.radius, "Chart partition radius (> 1)");
    cmd_diagnose->add_option("--max-iter", diag.config.max_iter, "Iteration cap");
    cmd_diagnose->add_flag("--force", diag.force, "Run the dense diagnostics despite the size gate");

    SynthArgs synth;
    auto* cmd_synth = app.add_subcommand("synth", "Generate a synthetic benchmark mesh");
    cmd_synth->add_option("shape", synth.shape,
                          "icosphere | ellipsoid | gaussian-bump-sphere | tetrahedron")->required();
    cmd_synth->add_option("-o,--output", synth.output, "Output OFF path");
    cmd_synth->add_option("--level", synth.level, "Icosphere subdivision level");
    cmd_synth->add_option("--axes", synth.axes, "Ellipsoid axes a,b,c")->delimiter(',');
    cmd_synth->add_option("--seed", synth.seed, "Bump placement seed");
    cmd_synth->add_option("--bumps", synth.bumps, "Number of Gaussian bumps");
    cmd_synth->add_option("--amplitude", synth.amplitude, "Bump amplitude");
    cmd_synth->add_option("--edge", synth.edge, "Tetrahedron edge length");

    StatsArgs stats;
    auto* cmd_stats = app.add_subcommand("stats", "Recompute stretch statistics for an existing map");
    cmd_stats->add_option("domain", stats.domain, "Domain mesh (OFF/OBJ)")->required();
    cmd_stats->add_option("mapped", stats.mapped, "Parameterized mesh (OBJ, unit vertices)")->required();
    cmd_stats->add_option("-o,--output", stats.output, "Write JSON here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_param->parsed()) return run_param(param);
        if (cmd_diagnose->parsed()) return run_diagnose(diag);
        if (cmd_synth->parsed()) return run_synth(synth);
        if (cmd_stats->parsed()) return run_stats(stats);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return kExitError;
    }
    return kExitError;
}
