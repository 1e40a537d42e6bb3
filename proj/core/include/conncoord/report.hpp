#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "conncoord/potential.hpp"
#include "conncoord/scenario.hpp"
#include "conncoord/simulator.hpp"

namespace conncoord {

/// Row-major numeric table with named columns.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Index of a named column; throws std::out_of_range if absent.
    std::size_t column(const std::string& name) const;
    std::vector<double> series(const std::string& name) const;
};

/// time, x[i][k], u[i][k] or qdot[i][k], V, spread, margin, then d[i][j] for
/// every initial edge. Indices are 0-based.
CsvTable trajectory_table(const TrajectoryRecord& record);

/// Numbers are written with 15 significant digits.
void write_csv(std::ostream& out, const CsvTable& table);
CsvTable read_csv(std::istream& in);

struct ArtifactPaths {
    std::string csv;
    std::string report;
    std::vector<std::string> svg;
};

/// Everything needed to reproduce and judge one CLI invocation.
struct RunReport {
    std::string command;
    ScenarioConfig config;
    std::vector<std::string> defaults_applied;
    std::vector<std::string> overrides;

    std::optional<CommGraph> graph;
    std::optional<MonitorVerdicts> verdicts;
    std::optional<TrajectoryRecord> record;  // only the summary fields are written
    std::optional<ScenarioCertificate> certificate;
    std::optional<FeasibilityReport> feasibility;
    std::optional<FeasibilityReport> feasibility_search;
    std::optional<SuiteResult> lemma1;
    std::optional<SuiteResult> prop2;
    std::optional<std::uint64_t> suite_seed;
    std::optional<bool> passed;
    ArtifactPaths artifacts;
};

std::string report_json(const RunReport& report);

}  // namespace conncoord
