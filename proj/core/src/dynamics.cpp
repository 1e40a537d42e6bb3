#include "conncoord/dynamics.hpp"

#include <stdexcept>
#include <string>

#include <Eigen/LU>

namespace conncoord {

void ELModel::validate() const {
    if (!(m1 > 0.0) || !(m2 > 0.0)) throw std::invalid_argument("link masses must be positive");
    if (!(l1 > 0.0) || !(l2 > 0.0)) throw std::invalid_argument("link lengths must be positive");
    if (!std::isfinite(gravity)) throw std::invalid_argument("gravity must be finite");
}

void ControlGains::validate(std::size_t n_agents, std::size_t dim) const {
    if (!(p > 0.0)) {
        throw std::invalid_argument("proportional gain p must be positive");
    }
    if (K.size() != n_agents) {
        throw std::invalid_argument("expected damping gains for " + std::to_string(n_agents) + " agents");
    }
    for (std::size_t i = 0; i < K.size(); ++i) {
        if (static_cast<std::size_t>(K[i].size()) != dim) {
            throw std::invalid_argument("damping gains of agent " + std::to_string(i) + " need " +
                                        std::to_string(dim) + " entries");
        }
        if (!(K[i].minCoeff() > 0.0) || !K[i].allFinite()) {
            throw std::invalid_argument("damping gains of agent " + std::to_string(i) +
                                        " must be positive");
        }
    }
}

double el_potential_energy(const ELModel& model, const Eigen::Vector2d& q) {
    return (model.m1 + model.m2) * model.gravity * model.l1 * std::sin(q(0)) +
           model.m2 * model.gravity * model.l2 * std::sin(q(0) + q(1));
}

double el_kinetic_energy(const ELModel& model, const ELAgentState& state) {
    const ELMatrices mats = el_matrices(model, state);
    return 0.5 * state.qdot.dot(mats.M * state.qdot);
}

Eigen::VectorXd coupling_term(std::size_t agent, const Eigen::VectorXd& xi,
                              std::span<const Eigen::VectorXd> delayed, double p,
                              const PotentialParams& params, const CommGraph& graph) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(xi.size());
    const std::size_t first = graph.link_offset(agent);
    const std::size_t count = graph.links_of(agent).size();
    for (std::size_t l = first; l < first + count; ++l) {
        sum += grad_psi(xi, delayed[l], params);
    }
    return -p * sum;
}

std::vector<SIAgentState> si_closed_loop_derivative(std::span<const SIAgentState> states,
                                                    std::span<const Eigen::VectorXd> delayed,
                                                    const ControlGains& gains,
                                                    const PotentialParams& params,
                                                    const CommGraph& graph) {
    if (states.size() != graph.agent_count() || delayed.size() != graph.link_count()) {
        throw std::invalid_argument("state or delayed-position count does not match the graph");
    }
    std::vector<SIAgentState> out(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        out[i].x = states[i].u;
        out[i].u = coupling_term(i, states[i].x, delayed, gains.p, params, graph) -
                   gains.K[i].cwiseProduct(states[i].u);
    }
    return out;
}

Eigen::Vector2d el_control(std::size_t agent, const ELAgentState& state,
                           std::span<const Eigen::VectorXd> delayed, const ControlGains& gains,
                           const PotentialParams& params, const ELModel& model,
                           const CommGraph& graph) {
    const Eigen::VectorXd q = state.q;
    const Eigen::Vector2d coupling = coupling_term(agent, q, delayed, gains.p, params, graph);
    const ELMatrices mats = el_matrices(model, state);
    return coupling - gains.K.at(agent).cwiseProduct(state.qdot) + mats.g;
}

Eigen::Vector2d el_forward_dynamics(const ELModel& model, const ELAgentState& state,
                                    const Eigen::Vector2d& tau) {
    const ELMatrices mats = el_matrices(model, state);
    return mats.M.inverse() * (tau - mats.C * state.qdot - mats.g);
}

}  // namespace conncoord
