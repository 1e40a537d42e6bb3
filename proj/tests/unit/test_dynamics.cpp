#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "conncoord/dynamics.hpp"

using namespace conncoord;

namespace {

PotentialParams unit_params(std::size_t n) {
    PotentialParams p;
    p.r = 1.0;
    p.Q = 0.2;
    p.epsilon = 0.4;
    p.N = 2;
    p.n = n;
    p.p = 1.0;
    return p;
}

ControlGains gains(std::size_t agents, std::size_t n, double k, double p = 1.0) {
    ControlGains g;
    g.p = p;
    g.K.assign(agents, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), k));
    return g;
}

double total_energy(const ELModel& m, const ELAgentState& s) {
    return el_kinetic_energy(m, s) + el_potential_energy(m, s.q);
}

ELAgentState rk4_unforced(const ELModel& m, ELAgentState s, double h) {
    const auto f = [&](const ELAgentState& x) {
        return el_forward_dynamics(m, x, Eigen::Vector2d::Zero());
    };
    const auto shift = [](const ELAgentState& x, const Eigen::Vector2d& dq, const Eigen::Vector2d& dv, double a) {
        ELAgentState out;
        out.q = x.q + a * dq;
        out.qdot = x.qdot + a * dv;
        return out;
    };
    const Eigen::Vector2d a1 = f(s);
    const Eigen::Vector2d v1 = s.qdot;
    const ELAgentState s2 = shift(s, v1, a1, 0.5 * h);
    const Eigen::Vector2d a2 = f(s2);
    const ELAgentState s3 = shift(s, s2.qdot, a2, 0.5 * h);
    const Eigen::Vector2d a3 = f(s3);
    const ELAgentState s4 = shift(s, s3.qdot, a3, h);
    const Eigen::Vector2d a4 = f(s4);
    s.q += h / 6.0 * (v1 + 2 * s2.qdot + 2 * s3.qdot + s4.qdot);
    s.qdot += h / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4);
    return s;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("coincident agents at rest are an equilibrium") {
    const CommGraph g(3, {Edge{0, 1}, Edge{1, 2}});
    std::vector<SIAgentState> s(3, SIAgentState{Eigen::VectorXd::Constant(2, 0.7), Eigen::VectorXd::Zero(2)});
    std::vector<Eigen::VectorXd> delayed(g.link_count(), Eigen::VectorXd::Constant(2, 0.7));
    const auto d = si_closed_loop_derivative(s, delayed, gains(3, 2, 5.0), unit_params(2), g);
    for (const auto& a : d) {
        CHECK(a.x.norm() == 0.0);
        CHECK(a.u.norm() == 0.0);
    }
}

TEST_CASE("two-agent filter derivative") {
    const CommGraph g(2, {Edge{0, 1}});
    std::vector<SIAgentState> s{{Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Zero(1)},
                                {Eigen::VectorXd::Constant(1, 0.5), Eigen::VectorXd::Zero(1)}};
    // Links: (receiver 0 <- sender 1), (receiver 1 <- sender 0); zero delay.
    std::vector<Eigen::VectorXd> delayed{s[1].x, s[0].x};
    const auto d = si_closed_loop_derivative(s, delayed, gains(2, 1, 1.0), unit_params(1), g);
    CHECK(d[0].u(0) == doctest::Approx(1.32964).epsilon(1e-5));
    CHECK(d[1].u(0) == doctest::Approx(-1.32964).epsilon(1e-5));
    CHECK(d[0].u(0) == -d[1].u(0));
}

TEST_CASE("delay-free filter loop dissipates exactly the damping power") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    const CommGraph g(4, {Edge{0, 1}, Edge{1, 2}, Edge{2, 3}, Edge{0, 3}});
    const auto params = unit_params(2);
    for (int trial = 0; trial < 200; ++trial) {
        ControlGains k;
        k.p = 0.5 + u(rng) + 0.3;
        std::vector<SIAgentState> s(4);
        for (std::size_t i = 0; i < 4; ++i) {
            s[i].x = Eigen::Vector2d(u(rng), u(rng));
            s[i].u = Eigen::Vector2d(u(rng), u(rng));
            k.K.push_back(Eigen::Vector2d(1.0 + 10 * std::abs(u(rng)), 1.0 + 10 * std::abs(u(rng))));
        }
        std::vector<Eigen::VectorXd> delayed;
        for (const Link& l : g.links()) delayed.push_back(s[l.sender].x);
        const auto d = si_closed_loop_derivative(s, delayed, k, params, g);
        double lhs = 0.0, damping = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            lhs += s[i].u.dot(d[i].u);
            damping += s[i].u.dot(k.K[i].cwiseProduct(s[i].u));
        }
        for (const Edge& e : g.edges()) {
            lhs += k.p * grad_psi(s[e.tail].x, s[e.head].x, params).dot(s[e.tail].u - s[e.head].u);
        }
        CHECK(lhs == doctest::Approx(-damping).epsilon(1e-9));
    }
}

TEST_CASE("inertia and gravity examples") {
    const ELModel m;
    ELAgentState s;
    const ELMatrices a = el_matrices(m, s);
    CHECK(a.M(0, 0) == doctest::Approx(2.5));
    CHECK(a.M(0, 1) == doctest::Approx(1.0));
    CHECK(a.M(1, 0) == doctest::Approx(1.0));
    CHECK(a.M(1, 1) == doctest::Approx(0.5));
    CHECK(a.g(0) == doctest::Approx(14.715).epsilon(1e-12));
    CHECK(a.g(1) == doctest::Approx(4.905).epsilon(1e-12));
}

TEST_CASE("gravity torque is the gradient of the gravity potential") {
    const ELModel m;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ang(-3.0, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        ELAgentState s;
        s.q = Eigen::Vector2d(ang(rng), ang(rng));
        const Eigen::Vector2d g = el_matrices(m, s).g;
        for (int k = 0; k < 2; ++k) {
            Eigen::Vector2d hi = s.q, lo = s.q;
            hi(k) += 1e-6;
            lo(k) -= 1e-6;
            const double fd = (el_potential_energy(m, hi) - el_potential_energy(m, lo)) / 2e-6;
            CHECK(fd == doctest::Approx(g(k)).epsilon(1e-7));
        }
    }
}

TEST_CASE("Mdot - 2C is skew-symmetric") {
    using LVec = Eigen::Matrix<long double, 2, 1>;
    using LMat = Eigen::Matrix<long double, 2, 2>;
    const ELModel m;
    const auto inertia = [&](const LVec& q, const LVec& qd, long double s) {
        return el_matrices<long double>(m, LVec(q + s * qd), qd).M;
    };
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> vel(-5.0, 5.0);
    double worst_sym = 0.0, worst_quad = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const LVec q(ang(rng), ang(rng));
        const LVec qd(vel(rng), vel(rng));
        const LMat c2 = 2 * el_matrices<long double>(m, q, qd).C;
        // Central difference at 1e-7 for the symmetric part.
        const long double h = 1e-7L;
        const LMat mdot = (inertia(q, qd, h) - inertia(q, qd, -h)) / (2 * h);
        const LMat n = mdot - c2;
        worst_sym = std::max(worst_sym, static_cast<double>((n + n.transpose()).cwiseAbs().maxCoeff()));
        // Five-point stencil for the quadratic form, whose oracle error must sit below 1e-12.
        const long double k = 1e-4L;
        const LMat mdot5 = (-inertia(q, qd, 2 * k) + 8 * inertia(q, qd, k) - 8 * inertia(q, qd, -k) +
                            inertia(q, qd, -2 * k)) /
                           (12 * k);
        worst_quad = std::max(worst_quad, static_cast<double>(std::abs(qd.dot((mdot5 - c2) * qd))));
    }
    CHECK(worst_sym < 1e-9);
    CHECK(worst_quad < 1e-12);
}

TEST_CASE("unforced arm conserves energy") {
    const ELModel m;
    ELAgentState s;
    s.q = Eigen::Vector2d(0.3, 0.5);
    s.qdot = Eigen::Vector2d(1.0, -0.5);
    const double e0 = total_energy(m, s);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
        s = rk4_unforced(m, s, 1e-4);
        worst = std::max(worst, std::abs(total_energy(m, s) - e0));
    }
    CHECK(worst / std::abs(e0) < 1e-6);
}

TEST_CASE("inertia eigenvalues stay in a positive band") {
    const ELModel m;
    double lo = 1e9, hi = 0.0;
    for (int k = 0; k <= 3600; ++k) {
        ELAgentState s;
        s.q(1) = 2 * std::numbers::pi * k / 3600.0;
        const Eigen::Matrix2d mm = el_matrices(m, s).M;
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(mm);
        const double lmin = es.eigenvalues()(0);
        CHECK(lmin >= mm.determinant() / mm.trace() - 1e-12);
        lo = std::min(lo, lmin);
        hi = std::max(hi, es.eigenvalues()(1));
    }
    CHECK(lo > 0.0);
    CHECK(hi < 4.0);
}

TEST_CASE("arm control law") {
    const ELModel m;
    const auto params = unit_params(2);
    SUBCASE("coincident neighbours at rest: gravity compensation only") {
        const CommGraph g(2, {Edge{0, 1}});
        ELAgentState s;
        s.q = Eigen::Vector2d(0.4, -0.9);
        std::vector<Eigen::VectorXd> delayed{Eigen::VectorXd(s.q), Eigen::VectorXd(s.q)};
        const Eigen::Vector2d tau = el_control(0, s, delayed, gains(2, 2, 100.0, 0.01), params, m, g);
        const Eigen::Vector2d grav = el_matrices(m, s).g;
        CHECK(tau(0) == grav(0));
        CHECK(tau(1) == grav(1));
    }
    SUBCASE("isolated agent: damping only") {
        const CommGraph g(1, {});
        ELAgentState s;
        s.q = Eigen::Vector2d(0.1, 0.2);
        s.qdot = Eigen::Vector2d(0.3, -0.7);
        ControlGains k;
        k.p = 0.01;
        k.K = {Eigen::Vector2d(360.0, 720.0)};
        const Eigen::Vector2d tau = el_control(0, s, {}, k, params, m, g);
        const Eigen::Vector2d diff = tau - el_matrices(m, s).g;
        CHECK(diff(0) == doctest::Approx(-108.0));
        CHECK(diff(1) == doctest::Approx(504.0));
    }
    SUBCASE("coupling matches the single-integrator gradient") {
        const CommGraph g(2, {Edge{0, 1}});
        ELAgentState s;
        s.q = Eigen::Vector2d(0.5, 0.0);
        std::vector<Eigen::VectorXd> delayed{Eigen::VectorXd(Eigen::Vector2d::Zero()), Eigen::VectorXd(s.q)};
        const Eigen::Vector2d tau = el_control(0, s, delayed, gains(2, 2, 1.0), params, m, g);
        const Eigen::Vector2d coupling = tau - el_matrices(m, s).g;
        CHECK(coupling(0) == doctest::Approx(-1.32964).epsilon(1e-5));
        CHECK(coupling(1) == 0.0);
    }
}

TEST_CASE("forward dynamics") {
    const ELModel m;
    ELAgentState s;
    s.q = Eigen::Vector2d(0.2, 1.1);
    s.qdot = Eigen::Vector2d(-0.4, 0.9);
    const ELMatrices a = el_matrices(m, s);
    CHECK(el_forward_dynamics(m, s, a.C * s.qdot + a.g).norm() < 1e-12);

    ELModel flat;
    flat.gravity = 0.0;
    ELAgentState rest;
    rest.q = Eigen::Vector2d(0.7, -0.3);
    CHECK(el_forward_dynamics(flat, rest, Eigen::Vector2d::Zero()).norm() == 0.0);
}

TEST_CASE("gain validation") {
    CHECK_NOTHROW(gains(3, 2, 1.0).validate(3, 2));
    CHECK_THROWS_AS(gains(3, 2, 0.0).validate(3, 2), std::invalid_argument);
    CHECK_THROWS_AS(gains(3, 2, 1.0).validate(4, 2), std::invalid_argument);
    CHECK_THROWS_AS(gains(3, 1, 1.0).validate(3, 2), std::invalid_argument);
    CHECK_THROWS_AS(gains(3, 2, 1.0, 0.0).validate(3, 2), std::invalid_argument);
}

}
