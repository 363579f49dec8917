#include "equisphere/report.hpp"

#include <fstream>
#include <json.hpp>

#include "equisphere/errors.hpp"

namespace eqs {

namespace {

using nlohmann::json;

Termination termination_from_string(const std::string& s) {
    if (s == "tolerance") return Termination::tolerance;
    if (s == "max_iter") return Termination::max_iter;
    if (s == "stagnation") return Termination::stagnation;
    if (s == "quasi_periodic_suspected") return Termination::quasi_periodic_suspected;
    throw ParseError("unknown termination reason: " + s);
}

}  // namespace

RunReport make_report(const TriMesh& mesh, const SemConfig& config, const SemResult& result) {
    RunReport report;
    report.config = config;
    report.vertex_count = mesh.vertex_count();
    report.face_count = mesh.face_count();
    report.n1 = result.state.partition.n1();
    report.m1 = result.state.partition.m1();
    report.n2 = result.state.partition.n2();
    report.m2 = result.state.partition.m2();
    report.convergence = result.report;
    return report;
}

std::string report_to_json(const RunReport& r) {
    json j;
    j["config"] = {{"tol", r.config.tol},
                   {"radius", r.config.radius},
                   {"max_iter", r.config.max_iter},
                   {"warmup", r.config.warmup}};
    j["mesh"] = {{"vertices", r.vertex_count}, {"faces", r.face_count}};
    j["partition"] = {{"n1", r.n1}, {"m1", r.m1}, {"n2", r.n2}, {"m2", r.m2}};
    const ConvergenceReport& c = r.convergence;
    j["iterations"] = c.iterations;
    j["termination_reason"] = to_string(c.termination_reason);
    j["initial_energy"] = c.initial_energy;
    j["energy_history"] = c.energy_history;
    j["delta_history"] = c.delta_history;
    j["sigma_history"] = c.sigma_history;
    j["final"] = {{"sigma_mean", c.final_stats.mean},
                  {"sigma_std", c.final_stats.stddev},
                  {"energy", c.final_stats.energy},
                  {"four_pi_gap", 4.0 * M_PI - c.final_stats.energy},
                  {"folded_faces", c.final_stats.folded_faces}};
    return j.dump(2);
}

RunReport report_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("report JSON parse failure: ") + e.what());
    }
    RunReport r;
    r.config.tol = j.at("config").at("tol").get<double>();
    r.config.radius = j.at("config").at("radius").get<double>();
    r.config.max_iter = j.at("config").at("max_iter").get<int>();
    r.config.warmup = j.at("config").at("warmup").get<int>();
    r.vertex_count = j.at("mesh").at("vertices").get<int>();
    r.face_count = j.at("mesh").at("faces").get<int>();
    r.n1 = j.at("partition").at("n1").get<int>();
    r.m1 = j.at("partition").at("m1").get<int>();
    r.n2 = j.at("partition").at("n2").get<int>();
    r.m2 = j.at("partition").at("m2").get<int>();
    ConvergenceReport& c = r.convergence;
    c.iterations = j.at("iterations").get<int>();
    c.termination_reason = termination_from_string(j.at("termination_reason").get<std::string>());
    c.initial_energy = j.at("initial_energy").get<double>();
    c.energy_history = j.at("energy_history").get<std::vector<double>>();
    c.delta_history = j.at("delta_history").get<std::vector<double>>();
    c.sigma_history = j.at("sigma_history").get<std::vector<double>>();
    c.final_stats.mean = j.at("final").at("sigma_mean").get<double>();
    c.final_stats.stddev = j.at("final").at("sigma_std").get<double>();
    c.final_stats.energy = j.at("final").at("energy").get<double>();
    c.final_stats.folded_faces = j.at("final").at("folded_faces").get<int>();
    return r;
}

void write_report(const RunReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open report for writing: " + path);
    out << report_to_json(report) << "\n";
}

RunReport read_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open report: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return report_from_json(text);
}

}  // namespace eqs
