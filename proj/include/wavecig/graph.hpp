#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "types.hpp"

namespace wavecig {

using Edge = std::pair<int, int>;

/// Simple undirected graph on nodes 0..P-1 backed by a dense adjacency.
/// Self-loops are rejected; edges are stored symmetrically.
class Graph {
public:
    Graph() = default;
    explicit Graph(int nodes) : n_(nodes), adj_(static_cast<std::size_t>(nodes) * nodes, 0) {
        if (nodes < 0) throw ConfigError("graph node count must be nonnegative");
    }

    static Graph from_edges(int nodes, const std::vector<Edge>& edges) {
        Graph g(nodes);
        for (const auto& [p, q] : edges) g.add_edge(p, q);
        return g;
    }

    /// Nonzero off-diagonal entries of `adjacency` become edges.
    static Graph from_adjacency(const Matrix& adjacency) {
        if (adjacency.rows() != adjacency.cols())
            throw DataError("adjacency matrix must be square");
        Graph g(static_cast<int>(adjacency.rows()));
        for (int p = 0; p < g.n_; ++p)
            for (int q = p + 1; q < g.n_; ++q)
                if (adjacency(p, q) != 0.0 || adjacency(q, p) != 0.0) g.add_edge(p, q);
        return g;
    }

    int node_count() const { return n_; }

    void add_edge(int p, int q) {
        check(p, q);
        adj_[idx(p, q)] = 1;
        adj_[idx(q, p)] = 1;
    }

    void remove_edge(int p, int q) {
        check(p, q);
        adj_[idx(p, q)] = 0;
        adj_[idx(q, p)] = 0;
    }

    bool has_edge(int p, int q) const {
        if (p == q) return false;
        return adj_[idx(p, q)] != 0;
    }

    /// Unordered edges with p < q, in row-major order.
    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        for (int p = 0; p < n_; ++p)
            for (int q = p + 1; q < n_; ++q)
                if (adj_[idx(p, q)]) out.emplace_back(p, q);
        return out;
    }

    int edge_count() const {
        int e = 0;
        for (int p = 0; p < n_; ++p)
            for (int q = p + 1; q < n_; ++q) e += adj_[idx(p, q)];
        return e;
    }

    int degree(int p) const {
        int d = 0;
        for (int q = 0; q < n_; ++q) d += adj_[idx(p, q)];
        return d;
    }

    std::vector<int> neighbours(int p) const {
        std::vector<int> out;
        for (int q = 0; q < n_; ++q)
            if (adj_[idx(p, q)]) out.push_back(q);
        return out;
    }

    Matrix adjacency() const {
        Matrix a = Matrix::Zero(n_, n_);
        for (int p = 0; p < n_; ++p)
            for (int q = 0; q < n_; ++q) a(p, q) = adj_[idx(p, q)];
        return a;
    }

    /// Fraction of the P(P-1)/2 possible edges that are present.
    double density() const {
        const double pairs = 0.5 * n_ * (n_ - 1.0);
        return pairs > 0 ? edge_count() / pairs : 0.0;
    }

    /// Graph whose node i is node perm[i] of this graph.
    Graph permuted(const std::vector<int>& perm) const {
        Graph g(n_);
        for (int p = 0; p < n_; ++p)
            for (int q = p + 1; q < n_; ++q)
                if (has_edge(perm[p], perm[q])) g.add_edge(p, q);
        return g;
    }

    Graph united(const Graph& other) const {
        if (other.n_ != n_) throw DataError("graph union: node counts differ");
        Graph g = *this;
        for (std::size_t i = 0; i < adj_.size(); ++i) g.adj_[i] |= other.adj_[i];
        return g;
    }

    friend bool operator==(const Graph& a, const Graph& b) {
        return a.n_ == b.n_ && a.adj_ == b.adj_;
    }

private:
    std::size_t idx(int p, int q) const {
        return static_cast<std::size_t>(p) * n_ + static_cast<std::size_t>(q);
    }
    void check(int p, int q) const {
        if (p < 0 || q < 0 || p >= n_ || q >= n_) throw DataError("graph: node index out of range");
        if (p == q) throw DataError("graph: self-loops are not allowed");
    }

    int n_ = 0;
    std::vector<unsigned char> adj_;
};

/// Breadth-first shortest-path distances from `source`; -1 marks unreachable.
inline std::vector<int> bfs_distances(const Graph& g, int source) {
    std::vector<int> dist(g.node_count(), -1);
    std::vector<int> frontier{source};
    dist[source] = 0;
    for (int level = 1; !frontier.empty(); ++level) {
        std::vector<int> next;
        for (int u : frontier)
            for (int v : g.neighbours(u))
                if (dist[v] < 0) {
                    dist[v] = level;
                    next.push_back(v);
                }
        frontier = std::move(next);
    }
    return dist;
}

/// Support graph of a square matrix: |m(p,q)| >= threshold or |m(q,p)| >= threshold.
template <class Derived>
Graph support_graph(const Eigen::MatrixBase<Derived>& m, double threshold = kSupportThreshold) {
    const int n = static_cast<int>(m.rows());
    Graph g(n);
    for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q)
            if (std::abs(m(p, q)) >= threshold || std::abs(m(q, p)) >= threshold) g.add_edge(p, q);
    return g;
}

}  // namespace wavecig
