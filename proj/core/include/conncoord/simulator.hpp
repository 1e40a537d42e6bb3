#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "conncoord/graph.hpp"
#include "conncoord/potential.hpp"
#include "conncoord/scenario.hpp"

namespace conncoord {

struct Sample {
    double t = 0.0;
    std::vector<Eigen::VectorXd> x;        // positions / joint angles
    std::vector<Eigen::VectorXd> v;        // u (single integrator) or qdot
    std::vector<Eigen::VectorXd> delayed;  // x_j(t - d_ji(t)) per link
    std::vector<double> edge_distance;     // |x_ij| per initial edge
    double V = 0.0;
    double spread = 0.0;  // max_ij |x_i - x_j|
    double margin = 0.0;  // min over initial edges of r - |x_ij|; +inf without edges
};

struct TrajectoryRecord {
    NetworkKind kind = NetworkKind::single_integrator;
    std::size_t dimension = 1;
    double radius = 1.0;
    CommGraph graph;
    std::vector<Sample> samples;

    bool aborted = false;
    double abort_time = 0.0;
    std::string abort_reason;

    std::size_t agent_count() const { return graph.agent_count(); }
};

/// Lyapunov function: p sum_{edges} psi(|x_ij|) plus 1/2 u^T u (SI) or 1/2 qdot^T M qdot (EL).
double lyapunov_value(const ScenarioConfig& cfg, const CommGraph& graph,
                      std::span<const Eigen::VectorXd> positions,
                      std::span<const Eigen::VectorXd> velocities);

/**
 * Fixed-step RK4 integration of the delayed closed loop (method of steps).
 *
 * Delayed neighbour positions are read from per-agent histories at every
 * stage time; histories grow once per accepted step. A relative distance
 * leaving the potential domain, or a non-finite state, ends the run early
 * with `aborted` set. Throws ConfigError for invalid configs and
 * InfeasibleError when gain_check is "enforce" and the certificate fails.
 */
TrajectoryRecord run_scenario(const ScenarioConfig& cfg);

struct MonitorVerdicts {
    double V0 = 0.0;
    double max_V_excess = 0.0;  // max_t V(t) - V(0)
    std::optional<double> first_V_violation;
    double min_margin = 0.0;
    std::optional<double> first_link_violation;
    double final_spread = 0.0;
    bool lyapunov_ok = false;
    bool links_ok = false;
    bool consensus_ok = false;
    bool aborted = false;

    bool passed() const { return lyapunov_ok && links_ok && consensus_ok && !aborted; }
};

MonitorVerdicts monitors(const TrajectoryRecord& record, const MonitorSettings& settings);

struct Property3Trace {
    std::size_t evaluations = 0;
    double min_slack = 0.0;
    std::optional<double> first_violation;
};

/// Componentwise delayed-gradient bound at every recorded sample and link.
Property3Trace property3_along(const TrajectoryRecord& record, const PotentialParams& params,
                               const Prop3Constants& constants);

}  // namespace conncoord
