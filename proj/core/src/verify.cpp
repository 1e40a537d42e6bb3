#include "conncoord/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace conncoord {

bool GainCertificate::passes() const {
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (!agent_passes(i)) {
            return false;
        }
    }
    return true;
}

GainCertificate gain_bound(const CommGraph& graph, std::span<const double> k_min,
                           const GainTerms& terms, const DelayBounds& dbar,
                           std::span<const double> alpha) {
    const std::size_t n_agents = graph.agent_count();
    if (k_min.size() != n_agents) {
        throw std::invalid_argument("need one damping gain per agent");
    }
    if (alpha.size() != graph.link_count()) {
        throw std::invalid_argument("need one alpha per directed link");
    }
    if (std::any_of(alpha.begin(), alpha.end(), [](double a) { return !(a > 0.0); })) {
        throw std::invalid_argument("alpha must be positive");
    }
    const auto sz = static_cast<Eigen::Index>(n_agents);
    if (dbar.dbar.rows() != sz || dbar.dbar.cols() != sz) {
        throw std::invalid_argument("delay bounds must be N x N");
    }

    const double own = terms.p * (terms.gamma + terms.eta) / 2.0;
    const double cross = terms.p * (terms.gamma + static_cast<double>(terms.n) * terms.eta) / 2.0;

    GainCertificate cert;
    cert.k.assign(k_min.begin(), k_min.end());
    cert.alpha.assign(alpha.begin(), alpha.end());
    cert.bound.assign(n_agents, 0.0);
    cert.phi = Eigen::MatrixXd::Zero(sz, sz);
    for (std::size_t i = 0; i < n_agents; ++i) {
        cert.phi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = k_min[i];
    }

    const auto links = graph.links();
    for (std::size_t l = 0; l < links.size(); ++l) {
        const auto i = static_cast<Eigen::Index>(links[l].receiver);
        const auto j = static_cast<Eigen::Index>(links[l].sender);
        const double alpha_ij = alpha[l];
        const double alpha_ji = alpha[links[l].reverse];
        const double d_ij = dbar.dbar(i, j);  // from i to j
        const double d_ji = dbar.dbar(j, i);  // from j to i

        cert.bound[links[l].receiver] += own * alpha_ij + cross * d_ij * d_ij / alpha_ji;
        cert.phi(i, i) -= own * alpha_ij;
        cert.phi(i, j) = -cross * d_ji * d_ji / alpha_ij;
    }
    cert.column_sums = cert.phi.colwise().sum().transpose();
    return cert;
}

GainCertificate si_gain_bound(const CommGraph& graph, std::span<const double> k_min, double p,
                              std::size_t n, const Prop3Constants& constants,
                              const DelayBounds& dbar, std::span<const double> alpha) {
    return gain_bound(graph, k_min, GainTerms{p, constants.gamma, constants.eta, n}, dbar, alpha);
}

GainCertificate el_gain_bound(const CommGraph& graph, std::span<const double> k_min, double p,
                              std::size_t n, const Prop3Constants& constants,
                              const DelayBounds& dbar, std::span<const double> alpha) {
    // p/2 (alpha (gamma + eta) + (gamma + n eta) dbar^2 / alpha) is the same form.
    return gain_bound(graph, k_min, GainTerms{p, constants.gamma, constants.eta, n}, dbar, alpha);
}

double optimal_alpha(double a, double b) {
    if (!(a > 0.0) || b < 0.0) {
        throw std::invalid_argument("optimal_alpha needs a > 0 and b >= 0");
    }
    return std::max(std::sqrt(b / a), kAlphaFloor);
}

std::vector<double> optimize_alpha(const CommGraph& graph, const GainTerms& terms,
                                   const DelayBounds& dbar) {
    const double own = terms.p * (terms.gamma + terms.eta) / 2.0;
    const double cross = terms.p * (terms.gamma + static_cast<double>(terms.n) * terms.eta) / 2.0;
    std::vector<double> alpha(graph.link_count());
    const auto links = graph.links();
    for (std::size_t l = 0; l < links.size(); ++l) {
        const auto i = static_cast<Eigen::Index>(links[l].receiver);
        const auto j = static_cast<Eigen::Index>(links[l].sender);
        const double d = std::max(dbar.dbar(i, j), dbar.dbar(j, i));
        alpha[l] = optimal_alpha(own, cross * d * d);
    }
    return alpha;
}

double InequalityResidual::scale() const {
    return std::max({std::abs(lhs), std::abs(rhs), std::numeric_limits<double>::min()});
}

namespace {

struct DelayWindowIntegrals {
    // inner[m] = int_{t_m - d_m}^{t_m} y, for the m-th non-negative grid time.
    std::vector<Eigen::VectorXd> inner;
    double x_norm_sq = 0.0;
    double y_norm_sq = 0.0;
};

double trapezoid(std::span<const double> f, double dt) {
    if (f.size() < 2) {
        return 0.0;
    }
    double s = 0.5 * (f.front() + f.back());
    for (std::size_t k = 1; k + 1 < f.size(); ++k) {
        s += f[k];
    }
    return s * dt;
}

DelayWindowIntegrals window_integrals(const SampledSignal& x, const SampledSignal& y,
                                      std::span<const double> delay, double dbar) {
    if (x.dt != y.dt || !(x.dt > 0.0) || x.pre != y.pre || x.values.size() != y.values.size() ||
        x.values.size() <= x.pre) {
        throw std::invalid_argument("signals must share one sampling grid");
    }
    const std::size_t steps = x.horizon_samples();
    if (delay.size() != steps) {
        throw std::invalid_argument("delay must be sampled on the non-negative grid");
    }
    const double lookback = static_cast<double>(y.pre) * y.dt;
    for (double d : delay) {
        if (d < 0.0 || d > dbar || d > lookback * (1.0 + 1e-12)) {
            throw std::invalid_argument("delay sample outside [0, dbar] or beyond the pre-history");
        }
    }
    const auto dim = x.values.front().size();
    for (std::size_t k = 0; k < x.values.size(); ++k) {
        if (x.values[k].size() != dim || y.values[k].size() != dim) {
            throw std::invalid_argument("signal dimensions differ");
        }
    }

    const double dt = y.dt;
    std::vector<Eigen::VectorXd> cum(y.values.size(), Eigen::VectorXd::Zero(dim));
    for (std::size_t k = 1; k < y.values.size(); ++k) {
        cum[k] = cum[k - 1] + 0.5 * dt * (y.values[k - 1] + y.values[k]);
    }
    // Exact integral of the piecewise-linear interpolant from the first sample to s.
    const auto cum_at = [&](double s) -> Eigen::VectorXd {
        const double u = (s - y.time(0)) / dt;
        auto k = static_cast<std::size_t>(std::max(0.0, std::floor(u)));
        k = std::min(k, y.values.size() - 2);
        const double tau = s - y.time(k);
        return cum[k] + tau * y.values[k] + (tau * tau / (2.0 * dt)) * (y.values[k + 1] - y.values[k]);
    };

    DelayWindowIntegrals out;
    out.inner.reserve(steps);
    std::vector<double> xx(steps);
    std::vector<double> yy(steps);
    for (std::size_t m = 0; m < steps; ++m) {
        const std::size_t idx = x.pre + m;
        const double t = x.time(idx);
        out.inner.push_back(cum[idx] - cum_at(t - delay[m]));
        xx[m] = x.values[idx].squaredNorm();
        yy[m] = y.values[idx].squaredNorm();
    }
    out.x_norm_sq = trapezoid(xx, dt);
    out.y_norm_sq = trapezoid(yy, dt);
    return out;
}

}  // namespace

InequalityResidual lemma1_check(const SampledSignal& x, const SampledSignal& y,
                                std::span<const double> delay, double dbar, double alpha) {
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("alpha must be positive");
    }
    const DelayWindowIntegrals w = window_integrals(x, y, delay, dbar);
    std::vector<double> f(w.inner.size());
    for (std::size_t m = 0; m < f.size(); ++m) {
        f[m] = 2.0 * x.values[x.pre + m].dot(w.inner[m]);
    }
    return {trapezoid(f, x.dt), alpha * w.x_norm_sq + dbar * dbar / alpha * w.y_norm_sq};
}

InequalityResidual prop2_check(const SampledSignal& x, const SampledSignal& y,
                               std::span<const double> delay, double dbar, double alpha) {
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("alpha must be positive");
    }
    const DelayWindowIntegrals w = window_integrals(x, y, delay, dbar);
    std::vector<double> f(w.inner.size());
    for (std::size_t m = 0; m < f.size(); ++m) {
        f[m] = w.inner[m].cwiseAbs().maxCoeff() * x.values[x.pre + m].sum();
    }
    const auto n = static_cast<double>(x.values.front().size());
    return {trapezoid(f, x.dt), 0.5 * alpha * w.x_norm_sq + n * dbar * dbar / (2.0 * alpha) * w.y_norm_sq};
}

namespace {

struct RandomInstance {
    SampledSignal x;
    SampledSignal y;
    std::vector<double> delay;
    double dbar = 0.0;
    double alpha = 1.0;
};

RandomInstance random_instance(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

    constexpr double kDt = 2e-3;
    constexpr double kHorizon = 4.0;
    RandomInstance inst;
    const int dim = 1 + static_cast<int>(std::floor(3.0 * unit(rng)));
    inst.dbar = uniform(0.02, 0.5);
    inst.alpha = std::pow(10.0, uniform(-2.0, 2.0));

    struct Wave {
        double amp, freq, phase;
    };
    const auto waves = [&] {
        std::vector<std::vector<Wave>> w(static_cast<std::size_t>(dim));
        for (auto& comp : w) {
            for (int m = 0; m < 3; ++m) {
                const double amp = uniform(-1.0, 1.0);
                const double freq = uniform(0.2, 8.0);
                comp.push_back({amp, freq, uniform(0.0, 2.0 * std::numbers::pi)});
            }
        }
        return w;
    };
    const auto wx = waves();
    const auto wy = waves();
    const double ramp = uniform(0.1, 1.0);
    const double d_freq = uniform(0.5, 10.0);
    const double d_phase = uniform(0.0, 2.0 * std::numbers::pi);

    const auto pre = static_cast<std::size_t>(std::ceil(inst.dbar / kDt)) + 2;
    const auto steps = static_cast<std::size_t>(std::round(kHorizon / kDt)) + 1;
    inst.x.dt = inst.y.dt = kDt;
    inst.x.pre = inst.y.pre = pre;
    for (std::size_t k = 0; k < pre + steps; ++k) {
        const double t = (static_cast<double>(k) - static_cast<double>(pre)) * kDt;
        // y vanishes smoothly for t <= 0 so the norms over [0, t] bound the delayed windows.
        double env = 1.0;
        if (t <= 0.0) {
            env = 0.0;
        } else if (t < ramp) {
            env = 0.5 * (1.0 - std::cos(std::numbers::pi * t / ramp));
        }
        Eigen::VectorXd xv(dim);
        Eigen::VectorXd yv(dim);
        for (int c = 0; c < dim; ++c) {
            double sx = 0.0;
            double sy = 0.0;
            for (const Wave& w : wx[static_cast<std::size_t>(c)]) sx += w.amp * std::sin(w.freq * t + w.phase);
            for (const Wave& w : wy[static_cast<std::size_t>(c)]) sy += w.amp * std::sin(w.freq * t + w.phase);
            xv(c) = sx;
            yv(c) = env * sy;
        }
        inst.x.values.push_back(std::move(xv));
        inst.y.values.push_back(std::move(yv));
        if (k >= pre) {
            inst.delay.push_back(
                std::clamp(inst.dbar * 0.5 * (1.0 + std::sin(d_freq * t + d_phase)), 0.0, inst.dbar));
        }
    }
    return inst;
}

template <typename Check>
SuiteResult run_suite(std::size_t count, std::uint64_t seed, Check check) {
    std::mt19937_64 rng(seed);
    SuiteResult result;
    result.instances = count;
    result.worst_normalized = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < count; ++i) {
        const RandomInstance inst = random_instance(rng);
        const InequalityResidual r = check(inst.x, inst.y, inst.delay, inst.dbar, inst.alpha);
        const double normalized = r.residual() / r.scale();
        if (normalized < result.worst_normalized) {
            result.worst_normalized = normalized;
            result.worst_index = i;
        }
    }
    return result;
}

}  // namespace

SuiteResult lemma1_suite(std::size_t count, std::uint64_t seed) {
    return run_suite(count, seed, lemma1_check);
}

SuiteResult prop2_suite(std::size_t count, std::uint64_t seed) {
    return run_suite(count, seed, prop2_check);
}

double property3_slack(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                       const Eigen::VectorXd& xj_delayed, const PotentialParams& params,
                       const Prop3Constants& constants) {
    const Eigen::VectorXd diff = grad_psi(xi, xj, params) - grad_psi(xi, xj_delayed, params);
    const Eigen::VectorXd e = xj - xj_delayed;
    const double e_inf = e.size() == 0 ? 0.0 : e.cwiseAbs().maxCoeff();
    const Eigen::VectorXd bound =
        constants.gamma * e.cwiseAbs() + Eigen::VectorXd::Constant(e.size(), constants.eta * e_inf);
    return (bound - diff.cwiseAbs()).minCoeff();
}

}  // namespace conncoord
