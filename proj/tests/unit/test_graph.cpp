#include <doctest.h>

#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "conncoord/graph.hpp"
#include "scenarios.hpp"

using namespace conncoord;

namespace {

std::vector<Eigen::VectorXd> scalars(std::initializer_list<double> xs) {
    std::vector<Eigen::VectorXd> out;
    for (double x : xs) out.push_back(Eigen::VectorXd::Constant(1, x));
    return out;
}

CommGraph random_graph(std::mt19937_64& rng, std::size_t n, double density, bool random_weights) {
    std::bernoulli_distribution coin(density);
    std::uniform_real_distribution<double> w(0.1, 3.0);
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (coin(rng)) edges.push_back(Edge{i, j, random_weights ? w(rng) : 1.0});
    return CommGraph(n, edges);
}

bool spectrally_connected(const CommGraph& g) {
    if (g.agent_count() < 2) return true;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> s(weighted_laplacian(g));
    return s.eigenvalues()(1) > 1e-9;
}

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("edge rule on the single-integrator positions gives the path graph") {
    const auto g = build_edge_set(scalars({1, 1.5, 2.1, 2.7, 3.2}), 1.0, 0.6);
    REQUIRE(g.edge_count() == 4);
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(g.edges()[k].tail == k);
        CHECK(g.edges()[k].head == k + 1);
    }
    CHECK(is_connected(g));
}

TEST_CASE("single agent has no edges") {
    const auto g = build_edge_set(scalars({0.3}), 1.0, 0.6);
    CHECK(g.edge_count() == 0);
    CHECK(g.link_count() == 0);
    CHECK(is_connected(g));
}

TEST_CASE("joint-space edge rule at rho = r connects every pair of arms") {
    // Brute-force distances: the largest pair (0, 4) sits at 0.916 < 1.
    const ScenarioConfig cfg = testing::load_scenario("el_fig2");
    const auto& q = cfg.initial_positions;
    std::size_t expected = 0;
    for (std::size_t i = 0; i < q.size(); ++i)
        for (std::size_t j = i + 1; j < q.size(); ++j)
            if ((q[i] - q[j]).norm() <= 1.0) ++expected;
    const auto g = build_edge_set(q, 1.0, 1.0);
    CHECK(expected == 10);
    CHECK(g.edge_count() == expected);
    CHECK((q[3] - q[4]).norm() == doctest::Approx(0.7633).epsilon(1e-3));
    CHECK((q[0] - q[4]).norm() == doctest::Approx(0.9163).epsilon(1e-3));
}

TEST_CASE("edge set is symmetric and deterministic") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    std::vector<Eigen::VectorXd> pts;
    for (int i = 0; i < 12; ++i) pts.push_back(Eigen::Vector2d(u(rng), u(rng)));
    const auto a = build_edge_set(pts, 1.0, 0.8);
    const auto b = build_edge_set(pts, 1.0, 0.8);
    CHECK(a == b);
    for (std::size_t i = 0; i < a.agent_count(); ++i)
        for (std::size_t j = 0; j < a.agent_count(); ++j) CHECK(a.adjacent(i, j) == a.adjacent(j, i));
    for (const Link& l : a.links()) {
        const Link& back = a.links()[l.reverse];
        CHECK(back.receiver == l.sender);
        CHECK(back.sender == l.receiver);
    }
}

TEST_CASE("invalid edge sets are rejected") {
    CHECK_THROWS_AS(CommGraph(2, {Edge{0, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(CommGraph(2, {Edge{0, 1}, Edge{1, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(CommGraph(2, {Edge{0, 1, 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(CommGraph(2, {Edge{0, 2}}), std::invalid_argument);
    CHECK_THROWS_AS(build_edge_set(scalars({0, 1}), 1.0, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(build_edge_set(scalars({0, 1}), 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("incidence matrix") {
    SUBCASE("one edge") {
        const auto d = incidence_matrix(CommGraph(2, {Edge{0, 1}}));
        CHECK(d(0, 0) == -1.0);
        CHECK(d(1, 0) == 1.0);
    }
    SUBCASE("empty edge set") {
        const auto d = incidence_matrix(CommGraph(4, {}));
        CHECK(d.rows() == 4);
        CHECK(d.cols() == 0);
    }
    SUBCASE("path columns sum to zero") {
        const auto d = incidence_matrix(CommGraph(3, {Edge{0, 1}, Edge{1, 2}}));
        CHECK(d.colwise().sum().cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("laplacian examples") {
    const auto l2 = weighted_laplacian(CommGraph(2, {Edge{0, 1}}));
    Eigen::Matrix2d expected;
    expected << 1, -1, -1, 1;
    CHECK((l2 - expected).cwiseAbs().maxCoeff() == 0.0);

    const auto l3 = weighted_laplacian(CommGraph(3, {Edge{0, 1}, Edge{1, 2}}));
    CHECK(l3(0, 0) == 1.0);
    CHECK(l3(1, 1) == 2.0);
    CHECK(l3(2, 2) == 1.0);
    CHECK(l3(0, 2) == 0.0);
}

TEST_CASE("L equals D W D^T on random weighted graphs") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::size_t> size(1, 12);
    std::uniform_real_distribution<double> dens(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto g = random_graph(rng, size(rng), dens(rng), true);
        const Eigen::MatrixXd d = incidence_matrix(g);
        Eigen::VectorXd w(static_cast<Eigen::Index>(g.edge_count()));
        for (std::size_t k = 0; k < g.edge_count(); ++k) w(static_cast<Eigen::Index>(k)) = g.edges()[k].weight;
        const Eigen::MatrixXd ddt = d * w.asDiagonal() * d.transpose();
        worst = std::max(worst, (weighted_laplacian(g) - ddt).cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("connectivity: BFS agrees with the spectral test") {
    CHECK(is_connected(CommGraph(5, {Edge{0, 1}, Edge{1, 2}, Edge{2, 3}, Edge{3, 4}})));
    CHECK_FALSE(is_connected(CommGraph(4, {Edge{0, 1}, Edge{2, 3}})));
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::size_t> size(2, 10);
    std::uniform_real_distribution<double> dens(0.05, 0.6);
    int connected = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto g = random_graph(rng, size(rng), dens(rng), trial % 2 == 0);
        const bool bfs = is_connected(g);
        connected += bfs;
        CHECK(bfs == spectrally_connected(g));
        CHECK((algebraic_connectivity(g) > 1e-9) == bfs);
    }
    // Both outcomes should be exercised.
    CHECK(connected > 10);
    CHECK(connected < 190);
}

TEST_CASE("links are grouped by receiver and sorted by sender") {
    const CommGraph g(4, {Edge{2, 0}, Edge{3, 1}, Edge{0, 3}});
    std::size_t l = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(g.link_offset(i) == l);
        std::size_t last = 0;
        bool first = true;
        for (const Link& link : g.links_of(i)) {
            CHECK(link.receiver == i);
            if (!first) CHECK(link.sender > last);
            last = link.sender;
            first = false;
            ++l;
        }
    }
    CHECK(g.weight(0, 2) == 1.0);
    CHECK(g.weight(1, 2) == 0.0);
    CHECK(g.neighbors(0) == std::vector<std::size_t>{2, 3});
}

}
