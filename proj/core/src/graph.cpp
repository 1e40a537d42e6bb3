#include "conncoord/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace conncoord {

CommGraph::CommGraph(std::size_t n_agents, std::vector<Edge> edges)
    : n_agents_(n_agents), edges_(std::move(edges)) {
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> incoming(n_agents_);
    for (std::size_t k = 0; k < edges_.size(); ++k) {
        Edge& e = edges_[k];
        if (e.tail >= n_agents_ || e.head >= n_agents_) {
            throw std::invalid_argument("edge " + std::to_string(k) + " references an unknown agent");
        }
        if (e.tail == e.head) {
            throw std::invalid_argument("self-loop at agent " + std::to_string(e.tail));
        }
        if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
            throw std::invalid_argument("edge " + std::to_string(k) + " has non-positive weight");
        }
        if (e.tail > e.head) {
            std::swap(e.tail, e.head);
        }
        const auto& seen = incoming[e.tail];
        if (std::any_of(seen.begin(), seen.end(), [&](const auto& s) { return s.first == e.head; })) {
            throw std::invalid_argument("duplicate edge {" + std::to_string(e.tail) + ", " +
                                        std::to_string(e.head) + "}");
        }
        incoming[e.tail].emplace_back(e.head, k);
        incoming[e.head].emplace_back(e.tail, k);
    }

    offsets_.assign(n_agents_ + 1, 0);
    links_.reserve(2 * edges_.size());
    for (std::size_t i = 0; i < n_agents_; ++i) {
        auto& in = incoming[i];
        std::sort(in.begin(), in.end());
        offsets_[i] = links_.size();
        for (const auto& [sender, edge] : in) {
            links_.push_back(Link{i, sender, edge, 0});
        }
    }
    offsets_[n_agents_] = links_.size();

    for (std::size_t l = 0; l < links_.size(); ++l) {
        const auto block = links_of(links_[l].sender);
        const auto it = std::find_if(block.begin(), block.end(),
                                     [&](const Link& o) { return o.sender == links_[l].receiver; });
        links_[l].reverse = offsets_[links_[l].sender] +
                            static_cast<std::size_t>(std::distance(block.begin(), it));
    }
}

std::span<const Link> CommGraph::links_of(std::size_t receiver) const {
    if (receiver >= n_agents_) {
        throw std::out_of_range("agent index out of range");
    }
    return std::span<const Link>(links_).subspan(offsets_[receiver],
                                                 offsets_[receiver + 1] - offsets_[receiver]);
}

std::vector<std::size_t> CommGraph::neighbors(std::size_t agent) const {
    std::vector<std::size_t> out;
    for (const Link& l : links_of(agent)) {
        out.push_back(l.sender);
    }
    return out;
}

bool CommGraph::adjacent(std::size_t i, std::size_t j) const {
    const auto block = links_of(i);
    return std::any_of(block.begin(), block.end(), [j](const Link& l) { return l.sender == j; });
}

double CommGraph::weight(std::size_t i, std::size_t j) const {
    for (const Link& l : links_of(i)) {
        if (l.sender == j) {
            return edges_[l.edge].weight;
        }
    }
    return 0.0;
}

bool operator==(const CommGraph& a, const CommGraph& b) {
    if (a.n_agents_ != b.n_agents_ || a.edges_.size() != b.edges_.size()) {
        return false;
    }
    for (std::size_t k = 0; k < a.edges_.size(); ++k) {
        const Edge& x = a.edges_[k];
        const Edge& y = b.edges_[k];
        if (x.tail != y.tail || x.head != y.head || x.weight != y.weight) {
            return false;
        }
    }
    return true;
}

CommGraph build_edge_set(std::span<const Eigen::VectorXd> positions, double r, double rho) {
    if (!(rho > 0.0) || !(rho <= r)) {
        throw std::invalid_argument("edge threshold rho must satisfy 0 < rho <= r");
    }
    const std::size_t n = positions.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!positions[i].allFinite()) {
            throw std::invalid_argument("position of agent " + std::to_string(i) + " is not finite");
        }
        if (positions[i].size() != positions.front().size()) {
            throw std::invalid_argument("agent positions have mismatched dimensions");
        }
    }
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if ((positions[i] - positions[j]).norm() <= rho * (1.0 + kEdgeRelTolerance)) {
                edges.push_back(Edge{i, j, 1.0});
            }
        }
    }
    return CommGraph(n, std::move(edges));
}

Eigen::MatrixXd adjacency_matrix(const CommGraph& g) {
    const auto n = static_cast<Eigen::Index>(g.agent_count());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (const Edge& e : g.edges()) {
        const auto t = static_cast<Eigen::Index>(e.tail);
        const auto h = static_cast<Eigen::Index>(e.head);
        a(t, h) = e.weight;
        a(h, t) = e.weight;
    }
    return a;
}

Eigen::MatrixXd incidence_matrix(const CommGraph& g) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(g.agent_count()),
                                              static_cast<Eigen::Index>(g.edge_count()));
    Eigen::Index k = 0;
    for (const Edge& e : g.edges()) {
        d(static_cast<Eigen::Index>(e.head), k) = 1.0;
        d(static_cast<Eigen::Index>(e.tail), k) = -1.0;
        ++k;
    }
    return d;
}

Eigen::MatrixXd weighted_laplacian(const CommGraph& g) {
    Eigen::MatrixXd l = -adjacency_matrix(g);
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        l(i, i) = -l.row(i).sum();
    }
    return l;
}

bool is_connected(const CommGraph& g) {
    const std::size_t n = g.agent_count();
    if (n <= 1) {
        return true;
    }
    std::vector<bool> seen(n, false);
    std::queue<std::size_t> frontier;
    frontier.push(0);
    seen[0] = true;
    std::size_t reached = 1;
    while (!frontier.empty()) {
        const std::size_t i = frontier.front();
        frontier.pop();
        for (const Link& l : g.links_of(i)) {
            if (!seen[l.sender]) {
                seen[l.sender] = true;
                ++reached;
                frontier.push(l.sender);
            }
        }
    }
    return reached == n;
}

double algebraic_connectivity(const CommGraph& g) {
    if (g.agent_count() < 2) {
        return 0.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(weighted_laplacian(g),
                                                          Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(1);
}

}  // namespace conncoord
