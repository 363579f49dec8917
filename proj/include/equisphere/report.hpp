#pragma once

#include <string>

#include "equisphere/sem.hpp"

namespace eqs {

/// Serialized run summary: configuration, histories, partition sizes, and
/// the final stretch statistics.
struct RunReport {
    SemConfig config;
    int vertex_count = 0;
    int face_count = 0;
    int n1 = 0, m1 = 0, n2 = 0, m2 = 0;
    ConvergenceReport convergence;
};

RunReport make_report(const TriMesh& mesh, const SemConfig& config, const SemResult& result);

std::string report_to_json(const RunReport& report);
RunReport report_from_json(const std::string& json_text);

void write_report(const RunReport& report, const std::string& path);
RunReport read_report(const std::string& path);

}  // namespace eqs
