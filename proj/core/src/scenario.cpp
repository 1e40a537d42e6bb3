#include "conncoord/scenario.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "conncoord/errors.hpp"

namespace conncoord {
namespace {

void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) {
        throw ConfigError(key + ": " + what);
    }
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

bool same_vectors(const std::vector<Eigen::VectorXd>& a, const std::vector<Eigen::VectorXd>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != b[i].size() || a[i] != b[i]) return false;
    }
    return true;
}

}  // namespace

std::string_view to_string(NetworkKind kind) {
    return kind == NetworkKind::single_integrator ? "single_integrator" : "euler_lagrange";
}

NetworkKind network_kind_from_string(std::string_view name) {
    if (name == "single_integrator") return NetworkKind::single_integrator;
    if (name == "euler_lagrange") return NetworkKind::euler_lagrange;
    throw ConfigError("network: unknown kind '" + std::string(name) + "'");
}

std::string_view to_string(GainCheck mode) {
    return mode == GainCheck::enforce ? "enforce" : "bypass";
}

GainCheck gain_check_from_string(std::string_view name) {
    if (name == "enforce") return GainCheck::enforce;
    if (name == "bypass") return GainCheck::bypass;
    throw ConfigError("gain_check: expected 'enforce' or 'bypass', got '" + std::string(name) + "'");
}

void ScenarioConfig::validate() const {
    const std::size_t n_agents = agent_count();
    require(n_agents >= 1, "initial_positions", "at least one agent is required");
    require(dimension >= 1, "dimension", "must be at least 1");
    require(kind != NetworkKind::euler_lagrange || dimension == 2, "dimension",
            "Euler-Lagrange agents are two-joint arms (dimension 2)");
    for (std::size_t i = 0; i < n_agents; ++i) {
        const std::string key = "initial_positions[" + std::to_string(i) + "]";
        require(static_cast<std::size_t>(initial_positions[i].size()) == dimension, key,
                "expected " + std::to_string(dimension) + " components");
        require(initial_positions[i].allFinite(), key, "must be finite");
    }
    require(initial_velocities.size() == n_agents, "initial_velocities", "need one entry per agent");
    for (std::size_t i = 0; i < n_agents; ++i) {
        const std::string key = "initial_velocities[" + std::to_string(i) + "]";
        require(static_cast<std::size_t>(initial_velocities[i].size()) == dimension, key,
                "expected " + std::to_string(dimension) + " components");
        require(initial_velocities[i].allFinite(), key, "must be finite");
    }

    require(broadcast_radius > 0.0 && std::isfinite(broadcast_radius), "broadcast_radius", "must be positive");
    require(buffer_width > 0.0 && buffer_width < broadcast_radius, "buffer_width",
            "must lie in (0, broadcast_radius)");
    require(edge_threshold > 0.0 && edge_threshold <= broadcast_radius, "edge_threshold",
            "must lie in (0, broadcast_radius]");
    require(Q > 0.0 && std::isfinite(Q), "potential.Q", "must be positive");
    require(p > 0.0 && std::isfinite(p), "potential.p", "must be positive");

    require(damping.size() == n_agents, "damping_gains", "need one entry per agent");
    for (std::size_t i = 0; i < n_agents; ++i) {
        const std::string key = "damping_gains[" + std::to_string(i) + "]";
        require(static_cast<std::size_t>(damping[i].size()) == dimension, key,
                "expected " + std::to_string(dimension) + " diagonal entries");
        require(damping[i].allFinite() && damping[i].minCoeff() > 0.0, key, "entries must be positive");
    }

    require(delay.max_delay >= 0.0 && std::isfinite(delay.max_delay), "delay.max_delay",
            "must be finite and non-negative");
    require(delay.frequency >= 0.0 && std::isfinite(delay.frequency), "delay.frequency",
            "must be non-negative");
    if (delay.constant) {
        require(*delay.constant >= 0.0 && *delay.constant <= delay.max_delay, "delay.constant",
                "must lie in [0, max_delay]");
    }
    require(delay.walk_sigma >= 0.0, "delay.walk_sigma", "must be non-negative");
    require(delay.walk_step > 0.0, "delay.walk_step", "must be positive");

    require(integrator.step > 0.0 && std::isfinite(integrator.step), "integrator.step", "must be positive");
    require(integrator.horizon > 0.0 && std::isfinite(integrator.horizon), "integrator.horizon",
            "must be positive");
    require(integrator.decimation >= 1, "integrator.decimation", "must be at least 1");
    if (delay.max_delay > 0.0) {
        require(integrator.step <= delay.max_delay / 10.0 * (1.0 + 1e-12), "integrator.step",
                "must not exceed max_delay / 10");
    }

    try {
        el_model.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("el_model: ") + e.what());
    }
    require(monitors.lyapunov_tolerance > 0.0, "monitors.lyapunov_tolerance", "must be positive");
    require(monitors.consensus_tolerance > 0.0, "monitors.consensus_tolerance", "must be positive");
    if (alpha) require(*alpha > 0.0, "alpha", "must be positive");
    if (delta) require(*delta > 0.0, "delta", "must be positive");
}

PotentialParams ScenarioConfig::potential() const {
    PotentialParams params;
    params.r = broadcast_radius;
    params.Q = Q;
    params.epsilon = buffer_width;
    params.N = agent_count();
    params.n = dimension;
    params.p = p;
    return params;
}

ControlGains ScenarioConfig::gains() const { return ControlGains{p, damping}; }

CommGraph ScenarioConfig::graph() const {
    return build_edge_set(initial_positions, broadcast_radius, edge_threshold);
}

DelayBounds ScenarioConfig::delay_bounds(const CommGraph& g) const {
    return DelayBounds::uniform(g, delay.max_delay);
}

std::vector<DelayProfile> ScenarioConfig::delay_profiles(const CommGraph& g) const {
    std::vector<DelayProfile> out;
    out.reserve(g.link_count());
    const double links = static_cast<double>(std::max<std::size_t>(g.link_count(), 1));
    for (std::size_t l = 0; l < g.link_count(); ++l) {
        DelayProfileSpec spec;
        spec.kind = delay.profile;
        spec.dbar = delay.max_delay;
        spec.value = delay.constant.value_or(delay.max_delay);
        spec.frequency = delay.frequency;
        spec.phase = 2.0 * std::numbers::pi * static_cast<double>(l) / links;
        spec.walk_sigma = delay.walk_sigma;
        spec.walk_step = delay.walk_step;
        spec.seed = splitmix64(delay.seed ^ splitmix64(l));
        out.emplace_back(spec);
    }
    return out;
}

double ScenarioConfig::initial_kinetic_energy() const {
    double ke = 0.0;
    for (std::size_t i = 0; i < agent_count(); ++i) {
        if (kind == NetworkKind::single_integrator) {
            ke += 0.5 * initial_velocities[i].squaredNorm();
        } else {
            ELAgentState s;
            s.q = initial_positions[i];
            s.qdot = initial_velocities[i];
            ke += el_kinetic_energy(el_model, s);
        }
    }
    return ke;
}

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
    return a.name == b.name && a.kind == b.kind && a.dimension == b.dimension &&
           same_vectors(a.initial_positions, b.initial_positions) &&
           same_vectors(a.initial_velocities, b.initial_velocities) &&
           a.broadcast_radius == b.broadcast_radius && a.buffer_width == b.buffer_width &&
           a.edge_threshold == b.edge_threshold && a.Q == b.Q && a.p == b.p &&
           same_vectors(a.damping, b.damping) && a.delay.max_delay == b.delay.max_delay &&
           a.delay.profile == b.delay.profile && a.delay.frequency == b.delay.frequency &&
           a.delay.constant == b.delay.constant && a.delay.walk_sigma == b.delay.walk_sigma &&
           a.delay.walk_step == b.delay.walk_step && a.delay.seed == b.delay.seed &&
           a.integrator.step == b.integrator.step && a.integrator.horizon == b.integrator.horizon &&
           a.integrator.decimation == b.integrator.decimation && a.el_model.m1 == b.el_model.m1 &&
           a.el_model.m2 == b.el_model.m2 && a.el_model.l1 == b.el_model.l1 &&
           a.el_model.l2 == b.el_model.l2 && a.el_model.gravity == b.el_model.gravity &&
           a.monitors.lyapunov_tolerance == b.monitors.lyapunov_tolerance &&
           a.monitors.consensus_tolerance == b.monitors.consensus_tolerance &&
           a.gain_check == b.gain_check && a.alpha == b.alpha && a.delta == b.delta;
}

ScenarioCertificate certify_scenario_gains(const ScenarioConfig& cfg, const CommGraph& g) {
    ScenarioCertificate out;
    const PotentialParams params = cfg.potential();
    const double dbar = cfg.delay.max_delay;
    const double floor_terms = prop3_floor_terms(params, dbar);
    const double Delta = cfg.delta.value_or(0.5 * (params.Q - floor_terms));
    try {
        out.constants = prop3_constants(params, dbar, Delta);
    } catch (const InfeasibleError& e) {
        out.reason = std::string("no admissible (gamma, eta): ") + e.what();
        return out;
    }
    out.computed = true;

    const DelayBounds bounds = cfg.delay_bounds(g);
    const GainTerms terms{params.p, out.constants.gamma, out.constants.eta, params.n};
    const std::vector<double> alpha = cfg.alpha ? std::vector<double>(g.link_count(), *cfg.alpha)
                                                : optimize_alpha(g, terms, bounds);
    std::vector<double> k_min(cfg.agent_count());
    for (std::size_t i = 0; i < k_min.size(); ++i) {
        k_min[i] = cfg.damping[i].minCoeff();
    }
    out.certificate = cfg.kind == NetworkKind::single_integrator
                          ? si_gain_bound(g, k_min, params.p, params.n, out.constants, bounds, alpha)
                          : el_gain_bound(g, k_min, params.p, params.n, out.constants, bounds, alpha);
    return out;
}

namespace {

FeasibilityInputs feasibility_inputs(const ScenarioConfig& cfg) {
    FeasibilityInputs in;
    in.N = cfg.agent_count();
    in.n = cfg.dimension;
    in.r = cfg.broadcast_radius;
    in.epsilon = cfg.buffer_width;
    in.dbar = cfg.delay.max_delay;
    in.KE0 = cfg.initial_kinetic_energy();
    in.Delta = cfg.delta;
    return in;
}

}  // namespace

FeasibilityReport scenario_feasibility(const ScenarioConfig& cfg) {
    FeasibilityInputs in = feasibility_inputs(cfg);
    in.Q = cfg.Q;
    in.p = cfg.p;
    return feasibility_plan(in);
}

FeasibilityReport scenario_feasibility_search(const ScenarioConfig& cfg) {
    return feasibility_plan(feasibility_inputs(cfg));
}

}  // namespace conncoord
