#include "conncoord/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "conncoord/config.hpp"

namespace conncoord {
namespace {

using nlohmann::json;

std::string index_name(const char* base, std::size_t i, std::size_t k) {
    return std::string(base) + "[" + std::to_string(i) + "][" + std::to_string(k) + "]";
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

// JSON has no infinities; they become null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <typename T>
json optional_number(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

json edges_json(const CommGraph& g) {
    json out = json::array();
    for (const Edge& e : g.edges()) out.push_back({e.tail, e.head});
    return out;
}

json feasibility_json(const FeasibilityReport& f) {
    json checks = json::array();
    for (const auto& c : f.checks) {
        checks.push_back({{"name", c.name}, {"lhs", number(c.lhs)}, {"rhs", number(c.rhs)}, {"pass", c.pass}});
    }
    return {{"feasible", f.feasible},
            {"searched", f.searched},
            {"Q", number(f.Q)},
            {"p", number(f.p)},
            {"Delta", number(f.Delta)},
            {"gamma", number(f.gamma)},
            {"eta", number(f.eta)},
            {"q_upper", optional_number(f.q_upper)},
            {"q_floor", number(f.q_floor)},
            {"p_min", number(f.p_min)},
            {"checks", std::move(checks)},
            {"violated", f.violated}};
}

json certificate_json(const ScenarioCertificate& c, const CommGraph& g) {
    json out = {{"computed", c.computed}, {"passes", c.passes()}, {"reason", c.reason}};
    if (!c.computed) return out;
    out["Delta"] = number(c.constants.Delta);
    out["gamma"] = number(c.constants.gamma);
    out["eta"] = number(c.constants.eta);
    out["q_floor"] = number(c.constants.q_floor);
    json agents = json::array();
    for (std::size_t i = 0; i < c.certificate.k.size(); ++i) {
        agents.push_back({{"agent", i},
                          {"k_min", number(c.certificate.k[i])},
                          {"bound", number(c.certificate.bound[i])},
                          {"margin", number(c.certificate.k[i] - c.certificate.bound[i])},
                          {"pass", c.certificate.agent_passes(i)}});
    }
    out["agents"] = std::move(agents);
    json alpha = json::array();
    const auto links = g.links();
    for (std::size_t l = 0; l < links.size() && l < c.certificate.alpha.size(); ++l) {
        alpha.push_back({{"receiver", links[l].receiver},
                         {"sender", links[l].sender},
                         {"alpha", number(c.certificate.alpha[l])}});
    }
    out["alpha"] = std::move(alpha);
    out["phi_columns_positive"] = c.certificate.columns_positive();
    return out;
}

json suite_json(const SuiteResult& s) {
    return {{"instances", s.instances},
            {"worst_normalized_residual", number(s.worst_normalized)},
            {"worst_index", s.worst_index}};
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == name) return c;
    }
    throw std::out_of_range("no column named " + name);
}

std::vector<double> CsvTable::series(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row.at(c));
    return out;
}

CsvTable trajectory_table(const TrajectoryRecord& record) {
    CsvTable table;
    const std::size_t n = record.agent_count();
    const std::size_t dim = record.dimension;
    const char* vel = record.kind == NetworkKind::single_integrator ? "u" : "qdot";
    table.header.push_back("time");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < dim; ++k) table.header.push_back(index_name("x", i, k));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < dim; ++k) table.header.push_back(index_name(vel, i, k));
    table.header.insert(table.header.end(), {"V", "spread", "margin"});
    for (const Edge& e : record.graph.edges()) table.header.push_back(index_name("d", e.tail, e.head));

    for (const Sample& s : record.samples) {
        std::vector<double> row;
        row.reserve(table.header.size());
        row.push_back(s.t);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < dim; ++k) row.push_back(s.x[i](static_cast<Eigen::Index>(k)));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < dim; ++k) row.push_back(s.v[i](static_cast<Eigen::Index>(k)));
        row.insert(row.end(), {s.V, s.spread, s.margin});
        row.insert(row.end(), s.edge_distance.begin(), s.edge_distance.end());
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_csv(std::ostream& out, const CsvTable& table) {
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        out << (c ? "," : "") << table.header[c];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out << (c ? "," : "") << format_number(row[c]);
        }
        out << '\n';
    }
}

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("empty CSV");
    }
    std::stringstream head(line);
    for (std::string cell; std::getline(head, cell, ',');) table.header.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) {
            if (cell == "inf") row.push_back(std::numeric_limits<double>::infinity());
            else if (cell == "-inf") row.push_back(-std::numeric_limits<double>::infinity());
            else if (cell == "nan") row.push_back(std::numeric_limits<double>::quiet_NaN());
            else row.push_back(std::stod(cell));
        }
        if (row.size() != table.header.size()) {
            throw std::runtime_error("CSV row width differs from header");
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string report_json(const RunReport& report) {
    const ScenarioConfig& cfg = report.config;
    json out;
    out["command"] = report.command;
    out["scenario"] = json::parse(emit_config(cfg));

    json meta;
    meta["rho"] = cfg.edge_threshold;
    meta["edge_rule"] = "|x_i(0) - x_j(0)| <= rho";
    meta["defaults_applied"] = report.defaults_applied;
    meta["overrides"] = report.overrides;
    meta["seed"] = cfg.delay.seed;
    meta["gain_check"] = std::string(to_string(cfg.gain_check));
    meta["integrator"] = "classical RK4, fixed step, method of steps; delayed positions "
                         "interpolated linearly from per-agent histories updated once per step";
    meta["agent_index_base"] = 0;
    meta["sinusoidal_phase"] = "2 pi l / L for link l of L, links ordered by receiver then sender";
    if (report.graph) {
        const CommGraph& g = *report.graph;
        const PotentialParams params = cfg.potential();
        meta["edges"] = edges_json(g);
        meta["initially_connected"] = is_connected(g);
        double worst = 0.0;
        for (const Edge& e : g.edges()) {
            worst = std::max(worst, (cfg.initial_positions[e.tail] - cfg.initial_positions[e.head]).norm());
        }
        meta["max_initial_edge_distance"] = worst;
        meta["initial_edges_within_buffer"] = worst <= cfg.broadcast_radius - cfg.buffer_width;
        const double v0 = lyapunov_value(cfg, g, cfg.initial_positions, cfg.initial_velocities);
        meta["V0"] = v0;
        meta["p_psi_r"] = cfg.p * params.psi_at_radius();
        meta["V0_below_p_psi_r"] = v0 < cfg.p * params.psi_at_radius();
    }
    out["metadata"] = std::move(meta);

    if (report.record) {
        const TrajectoryRecord& r = *report.record;
        out["run"] = {{"samples", r.samples.size()},
                      {"final_time", r.samples.empty() ? json(nullptr) : json(r.samples.back().t)},
                      {"aborted", r.aborted},
                      {"abort_time", r.aborted ? json(r.abort_time) : json(nullptr)},
                      {"abort_reason", r.abort_reason}};
    }
    if (report.verdicts) {
        const MonitorVerdicts& v = *report.verdicts;
        out["monitors"] = {{"V0", number(v.V0)},
                           {"max_V_excess", number(v.max_V_excess)},
                           {"first_V_violation", optional_number(v.first_V_violation)},
                           {"min_margin", number(v.min_margin)},
                           {"first_link_violation", optional_number(v.first_link_violation)},
                           {"final_spread", number(v.final_spread)},
                           {"lyapunov_ok", v.lyapunov_ok},
                           {"links_ok", v.links_ok},
                           {"consensus_ok", v.consensus_ok},
                           {"aborted", v.aborted},
                           {"passed", v.passed()}};
    }
    if (report.certificate && report.graph) {
        out["gain_certificate"] = certificate_json(*report.certificate, *report.graph);
    }
    if (report.feasibility) out["feasibility"] = feasibility_json(*report.feasibility);
    if (report.feasibility_search) out["feasibility_search"] = feasibility_json(*report.feasibility_search);
    if (report.lemma1 || report.prop2) {
        json suites;
        if (report.suite_seed) suites["seed"] = *report.suite_seed;
        if (report.lemma1) suites["cross_term_bound"] = suite_json(*report.lemma1);
        if (report.prop2) suites["delay_integral_bound"] = suite_json(*report.prop2);
        out["inequality_suites"] = std::move(suites);
    }
    if (report.passed) out["passed"] = *report.passed;
    out["artifacts"] = {{"csv", report.artifacts.csv.empty() ? json(nullptr) : json(report.artifacts.csv)},
                        {"report", report.artifacts.report},
                        {"svg", report.artifacts.svg}};
    return out.dump(2);
}

}  // namespace conncoord
