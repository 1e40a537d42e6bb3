#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "conncoord/graph.hpp"
#include "conncoord/potential.hpp"

namespace conncoord {

/// The constants entering the damping-gain condition.
struct GainTerms {
    double p = 1.0;
    double gamma = 0.0;
    double eta = 0.0;
    std::size_t n = 1;
};

/**
 * Damping-gain certificate.
 *
 * `alpha[l]` is alpha_ij for link l = (receiver i, sender j). Agent i passes
 * when k_i > bound_i with
 *   bound_i = sum_j alpha_ij p (gamma + eta) / 2 + p (gamma + n eta) dbar_ij^2 / (2 alpha_ji).
 * `phi` is the matrix whose column sums equal k_i - bound_i.
 */
struct GainCertificate {
    std::vector<double> k;
    std::vector<double> bound;
    std::vector<double> alpha;
    Eigen::MatrixXd phi;
    Eigen::VectorXd column_sums;

    bool agent_passes(std::size_t i) const { return k.at(i) > bound.at(i); }
    bool passes() const;
    bool columns_positive() const { return column_sums.size() == 0 || column_sums.minCoeff() > 0.0; }
};

/// Shared implementation; throws std::invalid_argument for non-positive alpha.
GainCertificate gain_bound(const CommGraph& graph, std::span<const double> k_min,
                           const GainTerms& terms, const DelayBounds& dbar,
                           std::span<const double> alpha);

/// Single-integrator form of the condition (filter gains K_i).
GainCertificate si_gain_bound(const CommGraph& graph, std::span<const double> k_min, double p,
                              std::size_t n, const Prop3Constants& constants,
                              const DelayBounds& dbar, std::span<const double> alpha);

/// Euler-Lagrange form: k_i > p/2 sum (alpha_ij (gamma + eta) + (gamma + n eta) dbar^2 / alpha_ji).
GainCertificate el_gain_bound(const CommGraph& graph, std::span<const double> k_min, double p,
                              std::size_t n, const Prop3Constants& constants,
                              const DelayBounds& dbar, std::span<const double> alpha);

/// Smallest alpha accepted; used in place of zero when an edge has no delay.
inline constexpr double kAlphaFloor = 1e-12;

/// Minimizer sqrt(b / a) of a alpha + b / alpha (floored at kAlphaFloor).
double optimal_alpha(double a, double b);

/// Per-edge minimizer alpha* = dbar sqrt((gamma + n eta) / (gamma + eta)), same on both links.
std::vector<double> optimize_alpha(const CommGraph& graph, const GainTerms& terms,
                                   const DelayBounds& dbar);

/// Uniformly sampled signal; values[k] is the sample at time (k - pre) * dt.
struct SampledSignal {
    double dt = 1e-3;
    std::size_t pre = 0;
    std::vector<Eigen::VectorXd> values;

    double time(std::size_t k) const {
        return (static_cast<double>(k) - static_cast<double>(pre)) * dt;
    }
    std::size_t horizon_samples() const { return values.size() - pre; }
};

struct InequalityResidual {
    double lhs = 0.0;
    double rhs = 0.0;

    double residual() const { return rhs - lhs; }
    double scale() const;
};

/// 2 int_0^t x^T int_{-d}^0 y(s + th) dth ds <= alpha |x|^2 + dbar^2 / alpha |y|^2.
/// `delay[k]` is d at the k-th non-negative grid time. Norms run over [0, t].
InequalityResidual lemma1_check(const SampledSignal& x, const SampledSignal& y,
                                std::span<const double> delay, double dbar, double alpha);

/// int_0^t x^T ybar 1 <= alpha/2 |x|^2 + n dbar^2 / (2 alpha) |y|^2, where
/// ybar(s) is the largest component magnitude of int_{s-d(s)}^s y.
InequalityResidual prop2_check(const SampledSignal& x, const SampledSignal& y,
                               std::span<const double> delay, double dbar, double alpha);

struct SuiteResult {
    std::size_t instances = 0;
    double worst_normalized = 0.0;  // min over instances of residual / scale
    std::size_t worst_index = 0;
};

/// Randomized instances: smooth multi-sine signals (y vanishing for t <= 0),
/// smooth bounded delays and log-uniform alpha.
SuiteResult lemma1_suite(std::size_t count, std::uint64_t seed);
SuiteResult prop2_suite(std::size_t count, std::uint64_t seed);

/// Smallest component of gamma |x_j - x_jd| + eta |x_j - x_jd|_inf - |grad(x_ij) - grad(x_ij^d)|.
/// Negative means the componentwise bound fails.
double property3_slack(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                       const Eigen::VectorXd& xj_delayed, const PotentialParams& params,
                       const Prop3Constants& constants);

}  // namespace conncoord
