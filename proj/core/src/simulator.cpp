#include "conncoord/simulator.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "conncoord/delay.hpp"
#include "conncoord/dynamics.hpp"
#include "conncoord/errors.hpp"

namespace conncoord {

double lyapunov_value(const ScenarioConfig& cfg, const CommGraph& graph,
                      std::span<const Eigen::VectorXd> positions,
                      std::span<const Eigen::VectorXd> velocities) {
    const PotentialParams params = cfg.potential();
    double potential = 0.0;
    for (const Edge& e : graph.edges()) {
        potential += psi((positions[e.tail] - positions[e.head]).norm(), params);
    }
    double kinetic = 0.0;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (cfg.kind == NetworkKind::single_integrator) {
            kinetic += 0.5 * velocities[i].squaredNorm();
        } else {
            ELAgentState s;
            s.q = positions[i];
            s.qdot = velocities[i];
            kinetic += el_kinetic_energy(cfg.el_model, s);
        }
    }
    // The ordered-pair double sum counts each edge twice, cancelling the 1/2.
    return cfg.p * potential + kinetic;
}

namespace {

class ClosedLoop {
    Eigen::Index block() const { return static_cast<Eigen::Index>(n_agents_ * dim_); }
    Eigen::Index offset(std::size_t i) const { return static_cast<Eigen::Index>(i * dim_); }
    auto pos(Eigen::VectorXd& y, std::size_t i) const {
        return y.segment(offset(i), static_cast<Eigen::Index>(dim_));
    }
    auto pos(const Eigen::VectorXd& y, std::size_t i) const {
        return y.segment(offset(i), static_cast<Eigen::Index>(dim_));
    }
    auto vel(Eigen::VectorXd& y, std::size_t i) const {
        return y.segment(block() + offset(i), static_cast<Eigen::Index>(dim_));
    }
    auto vel(const Eigen::VectorXd& y, std::size_t i) const {
        return y.segment(block() + offset(i), static_cast<Eigen::Index>(dim_));
    }

public:
    ClosedLoop(const ScenarioConfig& cfg, const CommGraph& graph)
        : cfg_(cfg),
          graph_(graph),
          params_(cfg.potential()),
          gains_(cfg.gains()),
          profiles_(cfg.delay_profiles(graph)),
          n_agents_(graph.agent_count()),
          dim_(cfg.dimension),
          delayed_(graph.link_count()) {
        const double retention = cfg.delay.max_delay + 4.0 * cfg.integrator.step;
        histories_.assign(n_agents_, History(retention));
    }

    Eigen::VectorXd initial_state() const {
        Eigen::VectorXd y(2 * block());
        for (std::size_t i = 0; i < n_agents_; ++i) {
            pos(y, i) = cfg_.initial_positions[i];
            vel(y, i) = cfg_.initial_velocities[i];
        }
        return y;
    }

    void record(double t, const Eigen::VectorXd& y) {
        for (std::size_t i = 0; i < n_agents_; ++i) {
            histories_[i].record(t, pos(y, i));
        }
    }

    void gather_delayed(double t) {
        const auto links = graph_.links();
        for (std::size_t l = 0; l < links.size(); ++l) {
            delayed_[l] = query_delayed(histories_[links[l].sender], t, profiles_[l]);
        }
    }

    Eigen::VectorXd derivative(double t, const Eigen::VectorXd& y) {
        gather_delayed(t);
        Eigen::VectorXd dy(y.size());
        if (cfg_.kind == NetworkKind::single_integrator) {
            std::vector<SIAgentState> states(n_agents_);
            for (std::size_t i = 0; i < n_agents_; ++i) {
                states[i] = SIAgentState{pos(y, i), vel(y, i)};
            }
            const auto d = si_closed_loop_derivative(states, delayed_, gains_, params_, graph_);
            for (std::size_t i = 0; i < n_agents_; ++i) {
                pos(dy, i) = d[i].x;
                vel(dy, i) = d[i].u;
            }
        } else {
            for (std::size_t i = 0; i < n_agents_; ++i) {
                ELAgentState s;
                s.q = pos(y, i);
                s.qdot = vel(y, i);
                const Eigen::Vector2d tau =
                    el_control(i, s, delayed_, gains_, params_, cfg_.el_model, graph_);
                pos(dy, i) = s.qdot;
                vel(dy, i) = el_forward_dynamics(cfg_.el_model, s, tau);
            }
        }
        return dy;
    }

    Sample sample(double t, const Eigen::VectorXd& y) {
        gather_delayed(t);
        Sample s;
        s.t = t;
        for (std::size_t i = 0; i < n_agents_; ++i) {
            s.x.emplace_back(pos(y, i));
            s.v.emplace_back(vel(y, i));
        }
        s.delayed = delayed_;
        s.margin = std::numeric_limits<double>::infinity();
        for (const Edge& e : graph_.edges()) {
            const double d = (s.x[e.tail] - s.x[e.head]).norm();
            s.edge_distance.push_back(d);
            s.margin = std::min(s.margin, cfg_.broadcast_radius - d);
        }
        for (std::size_t i = 0; i < n_agents_; ++i) {
            for (std::size_t j = i + 1; j < n_agents_; ++j) {
                s.spread = std::max(s.spread, (s.x[i] - s.x[j]).norm());
            }
        }
        s.V = lyapunov_value(cfg_, graph_, s.x, s.v);
        return s;
    }

    /// Empty when every initial edge is inside the potential domain.
    std::string domain_violation(const Eigen::VectorXd& y) const {
        for (const Edge& e : graph_.edges()) {
            const double d = (pos(y, e.tail) - pos(y, e.head)).norm();
            if (!(d < params_.domain_radius())) {
                return "edge {" + std::to_string(e.tail) + ", " + std::to_string(e.head) +
                       "} reached distance " + std::to_string(d) + " beyond the potential domain";
            }
        }
        return {};
    }

private:
    const ScenarioConfig& cfg_;
    const CommGraph& graph_;
    PotentialParams params_;
    ControlGains gains_;
    std::vector<DelayProfile> profiles_;
    std::size_t n_agents_;
    std::size_t dim_;
    std::vector<History> histories_;
    std::vector<Eigen::VectorXd> delayed_;
};

}  // namespace

TrajectoryRecord run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    TrajectoryRecord rec;
    rec.kind = cfg.kind;
    rec.dimension = cfg.dimension;
    rec.radius = cfg.broadcast_radius;
    rec.graph = cfg.graph();

    if (cfg.gain_check == GainCheck::enforce) {
        const ScenarioCertificate cert = certify_scenario_gains(cfg, rec.graph);
        if (!cert.passes()) {
            throw InfeasibleError(cert.computed ? "damping gains fail the certificate"
                                                : "gain certificate unavailable: " + cert.reason);
        }
    }

    ClosedLoop loop(cfg, rec.graph);
    const double h = cfg.integrator.step;
    const auto steps = static_cast<long long>(std::llround(cfg.integrator.horizon / h));
    const auto decimation = static_cast<long long>(cfg.integrator.decimation);

    Eigen::VectorXd y = loop.initial_state();
    loop.record(0.0, y);
    if (const std::string bad = loop.domain_violation(y); !bad.empty()) {
        throw ConfigError("initial_positions: " + bad);
    }
    rec.samples.push_back(loop.sample(0.0, y));

    long long last_sampled = 0;
    long long accepted = 0;
    for (long long k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * h;
        Eigen::VectorXd next;
        try {
            const Eigen::VectorXd k1 = loop.derivative(t, y);
            const Eigen::VectorXd k2 = loop.derivative(t + 0.5 * h, y + 0.5 * h * k1);
            const Eigen::VectorXd k3 = loop.derivative(t + 0.5 * h, y + 0.5 * h * k2);
            const Eigen::VectorXd k4 = loop.derivative(t + h, y + h * k3);
            next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        } catch (const DomainError& e) {
            rec.aborted = true;
            rec.abort_time = t;
            rec.abort_reason = e.what();
            break;
        }
        const double t_next = static_cast<double>(k + 1) * h;
        if (!next.allFinite()) {
            rec.aborted = true;
            rec.abort_time = t_next;
            rec.abort_reason = "non-finite state";
            break;
        }
        if (std::string bad = loop.domain_violation(next); !bad.empty()) {
            rec.aborted = true;
            rec.abort_time = t_next;
            rec.abort_reason = std::move(bad);
            break;
        }
        y = std::move(next);
        accepted = k + 1;
        loop.record(t_next, y);
        if ((k + 1) % decimation == 0 || k + 1 == steps) {
            rec.samples.push_back(loop.sample(t_next, y));
            last_sampled = k + 1;
        }
    }
    if (rec.aborted && last_sampled < accepted) {
        // End the record at the last accepted state.
        rec.samples.push_back(loop.sample(static_cast<double>(accepted) * h, y));
    }
    return rec;
}

MonitorVerdicts monitors(const TrajectoryRecord& record, const MonitorSettings& settings) {
    MonitorVerdicts out;
    if (record.samples.empty()) {
        return out;
    }
    out.V0 = record.samples.front().V;
    const double threshold = out.V0 * (1.0 + settings.lyapunov_tolerance);
    out.max_V_excess = -std::numeric_limits<double>::infinity();
    out.min_margin = std::numeric_limits<double>::infinity();
    for (const Sample& s : record.samples) {
        out.max_V_excess = std::max(out.max_V_excess, s.V - out.V0);
        if (s.V > threshold && !out.first_V_violation) {
            out.first_V_violation = s.t;
        }
        out.min_margin = std::min(out.min_margin, s.margin);
        if (!(s.margin > 0.0) && !out.first_link_violation) {
            out.first_link_violation = s.t;
        }
    }
    out.aborted = record.aborted;
    if (record.aborted && !out.first_link_violation) {
        out.first_link_violation = record.abort_time;
    }
    out.final_spread = record.samples.back().spread;
    out.lyapunov_ok = !out.first_V_violation.has_value();
    out.links_ok = !out.first_link_violation.has_value();
    out.consensus_ok = !record.aborted && out.final_spread < settings.consensus_tolerance;
    return out;
}

Property3Trace property3_along(const TrajectoryRecord& record, const PotentialParams& params,
                              const Prop3Constants& constants) {
    Property3Trace out;
    out.min_slack = std::numeric_limits<double>::infinity();
    const auto links = record.graph.links();
    for (const Sample& s : record.samples) {
        for (std::size_t l = 0; l < links.size(); ++l) {
            const double slack = property3_slack(s.x[links[l].receiver], s.x[links[l].sender],
                                                 s.delayed[l], params, constants);
            ++out.evaluations;
            out.min_slack = std::min(out.min_slack, slack);
            if (slack < 0.0 && !out.first_violation) {
                out.first_violation = s.t;
            }
        }
    }
    return out;
}

}  // namespace conncoord
