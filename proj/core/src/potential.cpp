#include "conncoord/potential.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "conncoord/errors.hpp"

namespace conncoord {
namespace {

double denominator(double dist_sq, const PotentialParams& params) {
    const double den = params.r * params.r - dist_sq + params.Q;
    if (!(den > 0.0)) {
        std::ostringstream msg;
        msg << "distance " << std::sqrt(dist_sq) << " outside potential domain (limit "
            << params.domain_radius() << ")";
        throw DomainError(msg.str());
    }
    return den;
}

void check_buffer(double r, double epsilon) {
    if (!(r > 0.0) || !(epsilon > 0.0) || !(epsilon < r)) {
        throw std::invalid_argument("buffer width must satisfy 0 < epsilon < r");
    }
}

// Largest p with floor_terms(p) < Q, solving a s^2 + b s = Q for s = sqrt(p).
double p_ceiling(double Q, std::size_t n, double r, double dbar) {
    if (dbar <= 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    const double psi_r = r * r / Q;
    const auto nd = static_cast<double>(n);
    const double a = 2.0 * nd * nd * dbar * dbar * psi_r;
    const double b = 2.0 * nd * r * dbar * std::sqrt(2.0 * psi_r);
    const double s = (-b + std::sqrt(b * b + 4.0 * a * Q)) / (2.0 * a);
    return s * s;
}

}  // namespace

void PotentialParams::validate() const {
    if (!(r > 0.0)) throw std::invalid_argument("r must be positive");
    if (!(epsilon > 0.0) || !(epsilon < r)) throw std::invalid_argument("epsilon must lie in (0, r)");
    if (!(Q > 0.0)) throw std::invalid_argument("Q must be positive");
    if (!(p > 0.0)) throw std::invalid_argument("p must be positive");
    if (N < 1) throw std::invalid_argument("N must be at least 1");
    if (n < 1) throw std::invalid_argument("n must be at least 1");
}

double PotentialParams::domain_radius() const { return std::sqrt(r * r + Q); }

DelayBounds DelayBounds::uniform(const CommGraph& g, double bound) {
    const auto n = static_cast<Eigen::Index>(g.agent_count());
    DelayBounds out{Eigen::MatrixXd::Zero(n, n)};
    for (const Link& l : g.links()) {
        out.dbar(static_cast<Eigen::Index>(l.sender), static_cast<Eigen::Index>(l.receiver)) = bound;
    }
    return out;
}

double psi(double dist, const PotentialParams& params) {
    if (dist < 0.0) {
        throw DomainError("negative distance");
    }
    const double d2 = dist * dist;
    return d2 / denominator(d2, params);
}

double coupling_gain(double dist, const PotentialParams& params) {
    const double den = denominator(dist * dist, params);
    return 2.0 * (params.r * params.r + params.Q) / (den * den);
}

Eigen::VectorXd grad_psi(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                         const PotentialParams& params) {
    const Eigen::VectorXd rel = xi - xj;
    const double den = denominator(rel.squaredNorm(), params);
    return (2.0 * (params.r * params.r + params.Q) / (den * den)) * rel;
}

std::optional<double> prop1_q_upper(std::size_t N, double r, double epsilon) {
    check_buffer(r, epsilon);
    if (N < 2) {
        throw std::invalid_argument("N must be at least 2");
    }
    const double inner = (r - epsilon) * (r - epsilon);
    const double pairs = static_cast<double>(N) * static_cast<double>(N - 1);
    if (!(pairs > 2.0 * r * r / inner)) {
        return std::nullopt;
    }
    return 2.0 * r * r * (r * r - inner) / (pairs * inner - 2.0 * r * r);
}

double prop3_floor_terms(const PotentialParams& params, double dbar_max) {
    const double psi_r = params.psi_at_radius();
    const auto n = static_cast<double>(params.n);
    return 2.0 * params.p * n * n * dbar_max * dbar_max * psi_r +
           2.0 * n * params.r * dbar_max * std::sqrt(2.0 * params.p * psi_r);
}

Prop3Constants prop3_constants(const PotentialParams& params, double dbar_max, double Delta) {
    params.validate();
    if (!(Delta > 0.0)) {
        throw InfeasibleError("Delta must be positive");
    }
    if (dbar_max < 0.0) {
        throw std::invalid_argument("delay bound must be non-negative");
    }
    Prop3Constants c;
    c.Delta = Delta;
    c.q_floor = prop3_floor_terms(params, dbar_max) + Delta;
    if (params.Q < c.q_floor) {
        std::ostringstream msg;
        msg << "Q = " << params.Q << " is below the delay floor " << c.q_floor << " (Delta = " << Delta
            << ")";
        throw InfeasibleError(msg.str());
    }
    const double r = params.r;
    const double Q = params.Q;
    const auto n = static_cast<double>(params.n);
    const double rq = r * r + Q;
    c.gamma = 2.0 * rq / (Delta * Delta);
    c.eta = 4.0 * rq * rq *
            (2.0 * r + n * dbar_max * std::sqrt(2.0 * params.p * params.psi_at_radius())) *
            std::sqrt(n) * r / (Q * Q * Delta * Delta);
    return c;
}

double prop4_p_min(double KE0, std::size_t N, double r, double epsilon, double Q) {
    check_buffer(r, epsilon);
    if (!(Q > 0.0)) {
        throw std::invalid_argument("Q must be positive");
    }
    if (KE0 < 0.0) {
        throw std::invalid_argument("kinetic energy must be non-negative");
    }
    PotentialParams params;
    params.r = r;
    params.Q = Q;
    params.epsilon = epsilon;
    const double pairs = static_cast<double>(N) * static_cast<double>(N - 1);
    const double den = 2.0 * params.psi_at_radius() - pairs * psi(r - epsilon, params);
    if (!(den > 0.0)) {
        throw InfeasibleError("2 psi(r) - N(N-1) psi(r - epsilon) is not positive; Q violates the pair-sum property");
    }
    return 2.0 * KE0 / den;
}

namespace {

FeasibilityReport certify(const FeasibilityInputs& in, double Q, double p) {
    FeasibilityReport rep;
    rep.Q = Q;
    rep.p = p;
    rep.q_upper = prop1_q_upper(in.N, in.r, in.epsilon);

    PotentialParams params;
    params.r = in.r;
    params.Q = Q;
    params.epsilon = in.epsilon;
    params.N = in.N;
    params.n = in.n;
    params.p = p;

    const double pairs = static_cast<double>(in.N) * static_cast<double>(in.N - 1);
    const double psi_r = params.psi_at_radius();
    const double pair_sum = 0.5 * pairs * psi(in.r - in.epsilon, params);
    rep.checks.push_back({"pair-sum property: N(N-1)/2 psi(r-eps) < psi(r)", pair_sum, psi_r,
                          pair_sum < psi_r});
    if (rep.q_upper) {
        rep.checks.push_back({"Q below pair-sum ceiling", Q, *rep.q_upper, Q < *rep.q_upper});
    }

    bool p_min_ok = true;
    try {
        rep.p_min = prop4_p_min(in.KE0, in.N, in.r, in.epsilon, Q);
    } catch (const InfeasibleError&) {
        rep.p_min = std::numeric_limits<double>::infinity();
        p_min_ok = false;
    }
    rep.checks.push_back({"p above initial-energy floor", p, rep.p_min, p_min_ok && p > rep.p_min});

    const double floor_terms = prop3_floor_terms(params, in.dbar);
    const double slack = Q - floor_terms;
    rep.Delta = in.Delta.value_or(0.5 * slack);
    rep.q_floor = floor_terms + rep.Delta;
    const bool delay_ok = rep.Delta > 0.0 && Q >= rep.q_floor;
    rep.checks.push_back({"Q above delay floor (incl. Delta > 0)", Q, rep.q_floor, delay_ok});
    if (delay_ok) {
        const Prop3Constants c = prop3_constants(params, in.dbar, rep.Delta);
        rep.gamma = c.gamma;
        rep.eta = c.eta;
    }

    rep.feasible = true;
    for (const auto& c : rep.checks) {
        if (!c.pass) {
            rep.feasible = false;
            if (rep.violated.empty()) {
                rep.violated = c.name;
            }
        }
    }
    return rep;
}

}  // namespace

FeasibilityReport feasibility_plan(const FeasibilityInputs& in) {
    check_buffer(in.r, in.epsilon);
    if (in.N < 2) {
        throw std::invalid_argument("feasibility requires N >= 2");
    }
    if (in.n < 1 || in.dbar < 0.0 || in.KE0 < 0.0) {
        throw std::invalid_argument("invalid feasibility inputs");
    }
    if (in.Q && in.p) {
        return certify(in, *in.Q, *in.p);
    }

    const std::optional<double> q_upper = prop1_q_upper(in.N, in.r, in.epsilon);
    // Without a pair-sum ceiling the search range is capped at 4 r^2.
    const double q_cap = q_upper.value_or(4.0 * in.r * in.r);
    constexpr int kGrid = 400;
    constexpr double kPCap = 1e12;

    double best_score = -std::numeric_limits<double>::infinity();
    double best_q = 0.0;
    double best_lo = 0.0;
    double best_hi = 0.0;
    for (int k = 1; k <= kGrid; ++k) {
        const double Q = q_cap * static_cast<double>(k) / (kGrid + 1);
        double lo = 0.0;
        try {
            lo = prop4_p_min(in.KE0, in.N, in.r, in.epsilon, Q);
        } catch (const InfeasibleError&) {
            continue;
        }
        const double hi = std::min(p_ceiling(Q, in.n, in.r, in.dbar), kPCap);
        if (!(lo < hi)) {
            continue;
        }
        const double score = std::log(hi) - std::log(std::max(lo, 1e-300));
        if (score >= best_score) {
            best_score = score;
            best_q = Q;
            best_lo = lo;
            best_hi = hi;
        }
    }

    if (!std::isfinite(best_score)) {
        FeasibilityReport rep;
        rep.searched = true;
        rep.q_upper = q_upper;
        rep.violated =
            "no Q below the pair-sum ceiling admits p above the initial-energy floor and below the delay ceiling";
        return rep;
    }

    double p = 0.0;
    if (best_hi >= kPCap) {
        p = std::max(1.0, 2.0 * best_lo);
    } else if (best_lo > 0.0) {
        p = std::sqrt(best_lo * best_hi);
    } else {
        p = 0.5 * best_hi;
    }
    FeasibilityInputs fixed = in;
    fixed.Q = best_q;
    fixed.p = p;
    FeasibilityReport rep = certify(fixed, best_q, p);
    rep.searched = true;
    return rep;
}

}  // namespace conncoord
