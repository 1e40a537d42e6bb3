#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "conncoord/graph.hpp"

namespace conncoord {

/// Parameters of the bounded connectivity potential psi(d) = d^2 / (r^2 - d^2 + Q).
struct PotentialParams {
    double r = 1.0;        // broadcast radius [m or rad]
    double Q = 0.2;        // shape parameter [length^2]
    double epsilon = 0.4;  // buffer width [length]
    std::size_t N = 2;     // agent count
    std::size_t n = 1;     // agent state dimension
    double p = 1.0;        // proportional gain

    /// Throws std::invalid_argument when an invariant is violated.
    void validate() const;

    /// psi(r) = r^2 / Q.
    double psi_at_radius() const { return r * r / Q; }

    /// Distances must stay strictly below this value.
    double domain_radius() const;
};

/// Per-directed-edge delay upper bounds: dbar(j, i) bounds the delay from j to i.
struct DelayBounds {
    Eigen::MatrixXd dbar;

    /// Same bound on every link of `g`, zero elsewhere.
    static DelayBounds uniform(const CommGraph& g, double bound);

    double max() const { return dbar.size() == 0 ? 0.0 : dbar.maxCoeff(); }
};

struct Prop3Constants {
    double Delta = 0.0;
    double gamma = 0.0;
    double eta = 0.0;
    double q_floor = 0.0;  // includes Delta
};

double psi(double dist, const PotentialParams& params);

/// State-dependent gain h(d) = 2(r^2 + Q) / (r^2 - d^2 + Q)^2.
double coupling_gain(double dist, const PotentialParams& params);

/// Gradient of psi(|xi - xj|) with respect to xi: h(|xi - xj|) (xi - xj).
Eigen::VectorXd grad_psi(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                         const PotentialParams& params);

/// Strict upper bound on Q that secures N(N-1)/2 psi(r - eps) < psi(r), or
/// nullopt when any Q > 0 works (N(N-1) <= 2 r^2 / (r - eps)^2).
std::optional<double> prop1_q_upper(std::size_t N, double r, double epsilon);

/// 2 p n^2 dbar^2 psi(r) + 2 n r dbar sqrt(2 p psi(r)); the Q floor without Delta.
double prop3_floor_terms(const PotentialParams& params, double dbar_max);

/// gamma and eta at their lower bounds for slack Delta.
/// Throws InfeasibleError when Q is below the floor for this Delta.
Prop3Constants prop3_constants(const PotentialParams& params, double dbar_max, double Delta);

/// Strict lower bound on p from the initial kinetic energy KE0.
/// Throws InfeasibleError when 2 psi(r) - N(N-1) psi(r - eps) <= 0.
double prop4_p_min(double KE0, std::size_t N, double r, double epsilon, double Q);

struct FeasibilityInputs {
    std::size_t N = 2;
    std::size_t n = 1;
    double r = 1.0;
    double epsilon = 0.4;
    double dbar = 0.0;  // largest delay bound
    double KE0 = 0.0;   // initial kinetic energy bound [J]

    /// When both are set the plan certifies this pair instead of searching.
    std::optional<double> Q;
    std::optional<double> p;
    /// Slack override; defaults to half the gap between Q and the floor terms.
    std::optional<double> Delta;
};

struct FeasibilityCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
};

struct FeasibilityReport {
    bool feasible = false;
    bool searched = false;
    double Q = 0.0;
    double p = 0.0;
    double Delta = 0.0;
    double gamma = 0.0;
    double eta = 0.0;
    std::optional<double> q_upper;
    double q_floor = 0.0;
    double p_min = 0.0;
    std::vector<FeasibilityCheck> checks;
    std::string violated;  // empty when feasible
};

/// Joint (Q, p, Delta) selection: certifies a given pair, or searches a Q grid
/// below the Prop-1 ceiling for a p between the Prop-4 floor and the Prop-3 ceiling.
FeasibilityReport feasibility_plan(const FeasibilityInputs& in);

}  // namespace conncoord
