#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "conncoord/graph.hpp"
#include "conncoord/potential.hpp"

namespace conncoord {

/// Single integrator with dynamic filter: x' = u, u' = -p sum grad psi - K u.
struct SIAgentState {
    Eigen::VectorXd x;
    Eigen::VectorXd u;
};

/// Two-DOF revolute arm, joint angles measured from the horizontal.
struct ELAgentState {
    Eigen::Vector2d q = Eigen::Vector2d::Zero();
    Eigen::Vector2d qdot = Eigen::Vector2d::Zero();
};

/// Planar two-link arm with point masses at the distal end of each link.
struct ELModel {
    double m1 = 0.5;  // [kg]
    double m2 = 0.5;  // [kg]
    double l1 = 1.0;  // [m]
    double l2 = 1.0;  // [m]
    double gravity = 9.81;  // [m/s^2], acts along -y

    void validate() const;
};

struct ControlGains {
    double p = 1.0;
    std::vector<Eigen::VectorXd> K;  // diagonal of K_i per agent

    double k_min(std::size_t agent) const { return K.at(agent).minCoeff(); }

    /// Every agent needs n strictly positive diagonal entries.
    void validate(std::size_t n_agents, std::size_t dim) const;
};

template <typename Scalar>
struct ELMatricesT {
    Eigen::Matrix<Scalar, 2, 2> M;
    Eigen::Matrix<Scalar, 2, 2> C;
    Eigen::Matrix<Scalar, 2, 1> g;
};
using ELMatrices = ELMatricesT<double>;

/// Inertia, Coriolis (Christoffel form, so M' - 2C is skew) and gravity torques.
/// Templated on the scalar so that oracles can evaluate in extended precision.
template <typename Scalar>
ELMatricesT<Scalar> el_matrices(const ELModel& model, const Eigen::Matrix<Scalar, 2, 1>& q,
                                const Eigen::Matrix<Scalar, 2, 1>& qdot) {
    using std::cos;
    using std::sin;
    const Scalar m1 = model.m1, m2 = model.m2, l1 = model.l1, l2 = model.l2, g0 = model.gravity;
    const Scalar c2 = cos(q(1));
    const Scalar s2 = sin(q(1));
    ELMatricesT<Scalar> out;
    out.M(0, 0) = (m1 + m2) * l1 * l1 + m2 * l2 * l2 + Scalar(2) * m2 * l1 * l2 * c2;
    out.M(0, 1) = m2 * l2 * l2 + m2 * l1 * l2 * c2;
    out.M(1, 0) = out.M(0, 1);
    out.M(1, 1) = m2 * l2 * l2;

    const Scalar h = -m2 * l1 * l2 * s2;
    out.C(0, 0) = h * qdot(1);
    out.C(0, 1) = h * (qdot(0) + qdot(1));
    out.C(1, 0) = -h * qdot(0);
    out.C(1, 1) = Scalar(0);

    const Scalar c1 = cos(q(0));
    const Scalar c12 = cos(q(0) + q(1));
    out.g(0) = (m1 + m2) * g0 * l1 * c1 + m2 * g0 * l2 * c12;
    out.g(1) = m2 * g0 * l2 * c12;
    return out;
}

inline ELMatrices el_matrices(const ELModel& model, const ELAgentState& state) {
    return el_matrices<double>(model, state.q, state.qdot);
}

/// Gravity potential whose gradient is g(q).
double el_potential_energy(const ELModel& model, const Eigen::Vector2d& q);
double el_kinetic_energy(const ELModel& model, const ELAgentState& state);

/// -p sum_{j in N_i} grad_i psi(|x_i - x_jd|). `delayed` is indexed by link.
Eigen::VectorXd coupling_term(std::size_t agent, const Eigen::VectorXd& xi,
                              std::span<const Eigen::VectorXd> delayed, double p,
                              const PotentialParams& params, const CommGraph& graph);

/// Time derivatives (x', u') for every agent; `delayed` holds x_j(t - d_ji(t)) per link.
std::vector<SIAgentState> si_closed_loop_derivative(std::span<const SIAgentState> states,
                                                    std::span<const Eigen::VectorXd> delayed,
                                                    const ControlGains& gains,
                                                    const PotentialParams& params,
                                                    const CommGraph& graph);

/// tau_i = -p sum grad psi(|x_ij^d|) - K_i qdot_i + g_i(q_i).
Eigen::Vector2d el_control(std::size_t agent, const ELAgentState& state,
                           std::span<const Eigen::VectorXd> delayed, const ControlGains& gains,
                           const PotentialParams& params, const ELModel& model,
                           const CommGraph& graph);

/// qddot = M^-1 (tau - C qdot - g).
Eigen::Vector2d el_forward_dynamics(const ELModel& model, const ELAgentState& state,
                                    const Eigen::Vector2d& tau);

}  // namespace conncoord
