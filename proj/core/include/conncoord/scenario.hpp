#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "conncoord/delay.hpp"
#include "conncoord/dynamics.hpp"
#include "conncoord/graph.hpp"
#include "conncoord/potential.hpp"
#include "conncoord/verify.hpp"

namespace conncoord {

enum class NetworkKind { single_integrator, euler_lagrange };
enum class GainCheck { enforce, bypass };

std::string_view to_string(NetworkKind kind);
NetworkKind network_kind_from_string(std::string_view name);
std::string_view to_string(GainCheck mode);
GainCheck gain_check_from_string(std::string_view name);

struct DelaySettings {
    double max_delay = 0.1;  // dbar on every link [s]
    DelayKind profile = DelayKind::sinusoidal;
    double frequency = 1.0;          // sinusoidal [Hz]
    std::optional<double> constant;  // constant profile value [s]; defaults to max_delay
    double walk_sigma = 0.01;        // random walk increment std. dev. [s]
    double walk_step = 0.01;         // random walk node spacing [s]
    std::uint64_t seed = 1;
};

struct IntegratorSettings {
    double step = 1e-3;      // [s]
    double horizon = 20.0;   // [s]
    std::size_t decimation = 10;
};

struct MonitorSettings {
    double lyapunov_tolerance = 1e-3;   // relative
    double consensus_tolerance = 1e-2;  // [m] or [rad]
};

/// One experiment: agents, edge rule, delays, gains, integrator and horizon.
struct ScenarioConfig {
    std::string name;
    NetworkKind kind = NetworkKind::single_integrator;
    std::size_t dimension = 1;
    std::vector<Eigen::VectorXd> initial_positions;
    std::vector<Eigen::VectorXd> initial_velocities;  // u(0) or qdot(0)

    double broadcast_radius = 1.0;
    double buffer_width = 0.4;
    double edge_threshold = 0.6;  // rho

    double Q = 0.2;
    double p = 1.0;
    std::vector<Eigen::VectorXd> damping;  // diagonal of K_i

    DelaySettings delay;
    IntegratorSettings integrator;
    ELModel el_model;
    MonitorSettings monitors;

    GainCheck gain_check = GainCheck::bypass;
    std::optional<double> alpha;  // unset: per-edge optimum
    std::optional<double> delta;  // unset: half the slack above the delay floor

    std::size_t agent_count() const { return initial_positions.size(); }

    /// Throws ConfigError naming the offending key.
    void validate() const;

    PotentialParams potential() const;
    ControlGains gains() const;
    CommGraph graph() const;
    DelayBounds delay_bounds(const CommGraph& g) const;

    /// One profile per link of `g`; sinusoidal phases are spread by link index.
    std::vector<DelayProfile> delay_profiles(const CommGraph& g) const;

    /// 1/2 sum u^T u (single integrator) or 1/2 sum qdot^T M qdot (Euler-Lagrange).
    double initial_kinetic_energy() const;

    friend bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);
};

/// Damping-gain certificate for a scenario, using its Delta and alpha policies.
struct ScenarioCertificate {
    bool computed = false;  // false when no admissible Delta exists
    std::string reason;
    Prop3Constants constants;
    GainCertificate certificate;

    bool passes() const { return computed && certificate.passes(); }
};

ScenarioCertificate certify_scenario_gains(const ScenarioConfig& cfg, const CommGraph& g);

/// Certifies the scenario's own (Q, p) pair.
FeasibilityReport scenario_feasibility(const ScenarioConfig& cfg);

/// Searches for an admissible (Q, p) pair given the scenario's geometry and energy.
FeasibilityReport scenario_feasibility_search(const ScenarioConfig& cfg);

}  // namespace conncoord
