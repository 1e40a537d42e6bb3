#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace conncoord {

/// Undirected edge {tail, head}. Orientation convention: head is the larger agent index.
struct Edge {
    std::size_t tail = 0;
    std::size_t head = 0;
    double weight = 1.0;
};

/// One direction of an edge: `receiver` reads the (delayed) position of `sender`.
struct Link {
    std::size_t receiver = 0;
    std::size_t sender = 0;
    std::size_t edge = 0;     // index into CommGraph::edges()
    std::size_t reverse = 0;  // index of the opposite link
};

/**
 * Static undirected communication graph.
 *
 * Every edge appears as two links. Links are grouped by receiver, so
 * `links_of(i)` is the contiguous block of links feeding agent i, ordered by
 * sender. Immutable after construction.
 */
class CommGraph {
public:
    CommGraph() = default;

    /// Throws std::invalid_argument on self-loops, duplicates, out-of-range
    /// agents or non-positive weights. Edge endpoints may be given in either order.
    CommGraph(std::size_t n_agents, std::vector<Edge> edges);

    std::size_t agent_count() const noexcept { return n_agents_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    std::size_t link_count() const noexcept { return links_.size(); }

    std::span<const Edge> edges() const noexcept { return edges_; }
    std::span<const Link> links() const noexcept { return links_; }
    std::span<const Link> links_of(std::size_t receiver) const;

    /// Index of the first link of `receiver` in links().
    std::size_t link_offset(std::size_t receiver) const { return offsets_.at(receiver); }

    std::vector<std::size_t> neighbors(std::size_t agent) const;
    bool adjacent(std::size_t i, std::size_t j) const;
    double weight(std::size_t i, std::size_t j) const;

    friend bool operator==(const CommGraph& a, const CommGraph& b);

private:
    std::size_t n_agents_ = 0;
    std::vector<Edge> edges_;
    std::vector<Link> links_;
    std::vector<std::size_t> offsets_{0};
};

/// Relative slack on the edge rule so that distances equal to rho up to
/// rounding (2.1 - 1.5 > 0.6 in binary) still count as edges.
inline constexpr double kEdgeRelTolerance = 1e-12;

/// Edges between every pair with |x_i - x_j| <= rho (1 + kEdgeRelTolerance), unit weights.
/// Requires 0 < rho <= r and finite positions of equal dimension.
CommGraph build_edge_set(std::span<const Eigen::VectorXd> positions, double r, double rho);

Eigen::MatrixXd adjacency_matrix(const CommGraph& g);

/// N x M matrix: +1 at the head of edge k, -1 at its tail.
Eigen::MatrixXd incidence_matrix(const CommGraph& g);

/// l_ii = sum_k a_ik, l_ij = -a_ij.
Eigen::MatrixXd weighted_laplacian(const CommGraph& g);

/// Breadth-first reachability from agent 0.
bool is_connected(const CommGraph& g);

/// Second-smallest Laplacian eigenvalue (0 for graphs with fewer than two agents).
double algebraic_connectivity(const CommGraph& g);

}  // namespace conncoord
