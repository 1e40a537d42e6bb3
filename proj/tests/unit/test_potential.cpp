#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "conncoord/errors.hpp"
#include "conncoord/potential.hpp"
#include "conncoord/verify.hpp"

using namespace conncoord;

namespace {

PotentialParams base(double p = 1.0, std::size_t n = 1) {
    PotentialParams params;
    params.r = 1.0;
    params.Q = 0.2;
    params.epsilon = 0.4;
    params.N = 5;
    params.n = n;
    params.p = p;
    return params;
}

PotentialParams el_params() { return base(0.01, 2); }

Eigen::VectorXd random_point(std::mt19937_64& rng, std::size_t n, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (auto& c : v) c = u(rng);
    return v;
}

bool pair_sum_holds(double Q) {
    PotentialParams params = base();
    params.Q = Q;
    return 10.0 * psi(0.6, params) < params.psi_at_radius();
}

}  // namespace

TEST_SUITE("potential") {

TEST_CASE("psi values") {
    const auto params = base();
    CHECK(psi(0.0, params) == 0.0);
    CHECK(psi(1.0, params) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(psi(0.6, params) == doctest::Approx(0.36 / 0.84).epsilon(1e-15));
    CHECK(params.psi_at_radius() == doctest::Approx(5.0));
}

TEST_CASE("psi is increasing on [0, r]") {
    const auto params = base();
    double prev = psi(0.0, params);
    for (int k = 1; k <= 10000; ++k) {
        const double v = psi(k * 1e-4, params);
        REQUIRE(v > prev);
        prev = v;
    }
}

TEST_CASE("gain h is positive and increasing from h(0)") {
    const auto params = base();
    const double h0 = coupling_gain(0.0, params);
    CHECK(h0 == doctest::Approx(2.0 / 1.2));
    double prev = h0;
    for (int k = 1; k <= 1000; ++k) {
        const double h = coupling_gain(k * 1e-3, params);
        REQUIRE(h > prev);
        prev = h;
    }
}

TEST_CASE("grad_psi examples") {
    const auto params = base();
    const Eigen::VectorXd a = Eigen::VectorXd::Constant(1, 0.5);
    const Eigen::VectorXd z = Eigen::VectorXd::Zero(1);
    CHECK(coupling_gain(0.5, params) == doctest::Approx(2.4 / 0.9025).epsilon(1e-14));
    CHECK(grad_psi(a, z, params)(0) == doctest::Approx(1.2 / 0.9025).epsilon(1e-14));
    CHECK(grad_psi(a, z, params)(0) == doctest::Approx(1.32964).epsilon(1e-5));
    CHECK(grad_psi(a, a, params).norm() == 0.0);
    // Antisymmetry in the pair.
    CHECK(grad_psi(z, a, params)(0) == -grad_psi(a, z, params)(0));
}

TEST_CASE("grad_psi matches central differences of psi") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::size_t> dim(1, 3);
    std::uniform_real_distribution<double> qdist(0.05, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        PotentialParams params = base();
        params.Q = qdist(rng);
        const std::size_t n = dim(rng);
        const Eigen::VectorXd xj = random_point(rng, n, 1.0);
        Eigen::VectorXd rel = random_point(rng, n, 1.0);
        // Scale into 0.95 of the domain.
        const double reach = 0.95 * params.domain_radius() * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        rel *= reach / std::max(rel.norm(), 1e-12);
        const Eigen::VectorXd xi = xj + rel;
        const Eigen::VectorXd g = grad_psi(xi, xj, params);
        const double step = 1e-6 * params.r;
        for (Eigen::Index k = 0; k < xi.size(); ++k) {
            Eigen::VectorXd hi = xi, lo = xi;
            hi(k) += step;
            lo(k) -= step;
            const double fd = (psi((hi - xj).norm(), params) - psi((lo - xj).norm(), params)) / (2 * step);
            const double err = std::abs(fd - g(k)) / std::max(std::abs(g(k)), 1e-3);
            worst = std::max(worst, err);
        }
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("domain guard") {
    const auto params = base();
    CHECK_THROWS_AS(psi(1.0954452, params), DomainError);  // just past sqrt(1.2)
    CHECK_THROWS_AS(psi(1.5, params), DomainError);
    CHECK_NOTHROW(psi(1.09, params));
    CHECK_THROWS_AS(grad_psi(Eigen::VectorXd::Constant(1, 2.0), Eigen::VectorXd::Zero(1), params), DomainError);
}

TEST_CASE("parameter validation") {
    PotentialParams p = base();
    p.epsilon = 1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = base();
    p.Q = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = base();
    p.p = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("pair-sum ceiling on Q") {
    const auto q = prop1_q_upper(5, 1.0, 0.4);
    REQUIRE(q.has_value());
    CHECK(*q == doctest::Approx(1.28 / 5.2).epsilon(1e-12));
    CHECK(*q == doctest::Approx(0.246153).epsilon(1e-5));
    CHECK_FALSE(prop1_q_upper(2, 1.0, 0.4).has_value());
    CHECK(pair_sum_holds(0.99 * *q));
    CHECK_FALSE(pair_sum_holds(1.01 * *q));
    // Property 2 holds everywhere below the ceiling.
    for (int k = 1; k < 100; ++k) CHECK(pair_sum_holds(*q * k / 100.0));
}

TEST_CASE("delay floor and constants at the arm-network parameters") {
    const auto params = el_params();
    const double floor = prop3_floor_terms(params, 0.1);
    CHECK(floor == doctest::Approx(0.004 + 0.126491).epsilon(1e-5));
    const double delta_max = params.Q - floor;
    CHECK(delta_max == doctest::Approx(0.069509).epsilon(1e-3));
    const Prop3Constants c = prop3_constants(params, 0.1, delta_max);
    CHECK(c.gamma == doctest::Approx(496.7).epsilon(1e-3));
    CHECK(c.gamma == doctest::Approx(2.4 / (delta_max * delta_max)).epsilon(1e-12));
    const double eta = 4 * 1.44 * (2 + 0.2 * std::sqrt(0.1)) * std::sqrt(2.0) / (0.04 * delta_max * delta_max);
    CHECK(c.eta == doctest::Approx(eta).epsilon(1e-12));
    CHECK(c.eta == doctest::Approx(8.70e4).epsilon(1e-3));
    CHECK_THROWS_AS(prop3_constants(params, 0.1, 0.08), InfeasibleError);
    CHECK_THROWS_AS(prop3_constants(params, 0.1, 0.0), InfeasibleError);
}

TEST_CASE("energy floor on p") {
    CHECK(prop4_p_min(0.0, 5, 1.0, 0.4, 0.2) == 0.0);
    CHECK(prop4_p_min(1.0, 5, 1.0, 0.4, 0.2) == doctest::Approx(1.4).epsilon(1e-12));
    CHECK(0.01 > prop4_p_min(0.0, 5, 1.0, 0.4, 0.2));
    CHECK_THROWS_AS(prop4_p_min(1.0, 5, 1.0, 0.4, 0.3), InfeasibleError);
}

TEST_CASE("feasibility plan certifies the arm-network pair") {
    FeasibilityInputs in;
    in.N = 5;
    in.n = 2;
    in.dbar = 0.1;
    in.KE0 = 0.0;
    in.Q = 0.2;
    in.p = 0.01;
    const auto rep = feasibility_plan(in);
    CHECK(rep.feasible);
    CHECK_FALSE(rep.searched);
    CHECK(rep.Delta > 0.0);
    CHECK(rep.Delta <= 0.0695);
    CHECK(rep.Delta == doctest::Approx(0.5 * 0.069509).epsilon(1e-3));
}

TEST_CASE("feasibility plan rejects the single-integrator pair at p = 1") {
    FeasibilityInputs in;
    in.N = 5;
    in.n = 1;
    in.dbar = 0.1;
    in.Q = 0.2;
    in.p = 1.0;
    const auto rep = feasibility_plan(in);
    CHECK_FALSE(rep.feasible);
    CHECK_FALSE(rep.violated.empty());
}

TEST_CASE("feasibility search flips to infeasible as the initial energy grows") {
    FeasibilityInputs in;
    in.N = 5;
    in.n = 1;
    in.dbar = 0.1;
    in.KE0 = 0.0;
    const auto at_rest = feasibility_plan(in);
    CHECK(at_rest.feasible);
    CHECK(at_rest.searched);
    // Bisect on KE0 for the flip.
    double lo = 0.0, hi = 1e6;
    in.KE0 = hi;
    const auto hot = feasibility_plan(in);
    CHECK_FALSE(hot.feasible);
    CHECK_FALSE(hot.violated.empty());
    for (int k = 0; k < 60; ++k) {
        in.KE0 = 0.5 * (lo + hi);
        (feasibility_plan(in).feasible ? lo : hi) = in.KE0;
    }
    CHECK(lo > 0.0);
    in.KE0 = lo;
    const auto edge = feasibility_plan(in);
    CHECK(edge.feasible);
    CHECK(edge.p > edge.p_min);
    CHECK(edge.Q >= edge.q_floor);
}

TEST_CASE("delay-free pair is feasible with finite constants") {
    FeasibilityInputs in;
    in.N = 2;
    in.n = 1;
    in.dbar = 0.0;
    in.Q = 0.2;
    in.p = 1.0;
    const auto rep = feasibility_plan(in);
    CHECK(rep.feasible);
    CHECK(std::isfinite(rep.gamma));
    CHECK(std::isfinite(rep.eta));
}

TEST_CASE("componentwise delayed-gradient bound on sampled states") {
    // Relative distances below r, delayed offsets within n dbar sqrt(2 p psi(r)).
    const auto params = el_params();
    const double dbar = 0.1;
    const double delta_max = params.Q - prop3_floor_terms(params, dbar);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (double frac : {1.0, 0.5, 0.1}) {
        const Prop3Constants c = prop3_constants(params, dbar, frac * delta_max);
        const double reach = params.n * dbar * std::sqrt(2 * params.p * params.psi_at_radius());
        double worst = std::numeric_limits<double>::infinity();
        for (int trial = 0; trial < 20000; ++trial) {
            const Eigen::VectorXd xj = random_point(rng, 2, 1.0);
            Eigen::VectorXd rel = random_point(rng, 2, 1.0);
            rel *= params.r * unit(rng) / rel.norm();
            Eigen::VectorXd e = random_point(rng, 2, 1.0);
            e *= reach * unit(rng) / e.norm();
            worst = std::min(worst, property3_slack(xj + rel, xj, xj + e, params, c));
        }
        CHECK(worst >= 0.0);
    }
}

}
