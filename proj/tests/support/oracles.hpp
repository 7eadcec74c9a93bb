#pragma once

// Brute-force reference computations for the test suites. These must stay on
// independent code paths from the library: dense inverses instead of sparse
// Cholesky, explicit split graphs instead of seeded Dijkstra, pseudo-inverse
// resistance instead of Dirichlet energy.

#include <Eigen/Dense>
#include <map>
#include <queue>
#include <vector>

#include "carrier/cable.hpp"
#include "carrier/graph.hpp"

namespace oracles {

using carrier::CablePoint;
using carrier::EmbeddedGraph;
using carrier::VertexId;

struct DenseChain {
    std::vector<VertexId> live, absorbing;
    std::vector<int> live_index;
    Eigen::MatrixXd fundamental;  // N = (I-Q)^{-1}: expected visit counts
    Eigen::MatrixXd exit_law;     // N * R: hitting probabilities, live x absorbing
};

inline DenseChain dense_chain(const EmbeddedGraph& g, const std::vector<char>& live_mask) {
    DenseChain out;
    out.live_index.assign(g.vertex_count(), -1);
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        if (live_mask[v]) {
            out.live_index[v] = static_cast<int>(out.live.size());
            out.live.push_back(v);
        }
    out.absorbing = g.vertex_boundary(out.live);
    std::map<VertexId, int> abs_index;
    for (std::size_t i = 0; i < out.absorbing.size(); ++i) abs_index[out.absorbing[i]] = int(i);
    const int n = static_cast<int>(out.live.size());
    const int m = static_cast<int>(out.absorbing.size());
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, m);
    for (int i = 0; i < n; ++i) {
        VertexId v = out.live[i];
        auto ns = g.neighbors(v);
        auto es = g.incident_edges(v);
        for (std::size_t k = 0; k < ns.size(); ++k) {
            double p = g.edge(es[k]).weight / g.vertex_weight(v);
            if (out.live_index[ns[k]] >= 0)
                Q(i, out.live_index[ns[k]]) += p;
            else
                R(i, abs_index.at(ns[k])) += p;
        }
    }
    out.fundamental = (Eigen::MatrixXd::Identity(n, n) - Q).inverse();
    out.exit_law = out.fundamental * R;
    return out;
}

/// Effective resistance by the pseudo-inverse route: contract A and Z to two
/// nodes, then R = (e_a - e_z)^T L^+ (e_a - e_z).
inline double dense_resistance(const EmbeddedGraph& g, const std::vector<char>& mask,
                               const std::vector<VertexId>& A, const std::vector<VertexId>& Z) {
    std::vector<int> node(g.vertex_count(), -1);
    int next = 2;  // 0 = contracted A, 1 = contracted Z
    for (VertexId v : A) node[v] = 0;
    for (VertexId v : Z) node[v] = 1;
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        if (mask[v] && node[v] == -1) node[v] = next++;
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(next, next);
    for (const auto& e : g.edges()) {
        if (!mask[e.u] || !mask[e.v]) continue;
        int a = node[e.u], b = node[e.v];
        if (a == b) continue;
        L(a, a) += e.weight;
        L(b, b) += e.weight;
        L(a, b) -= e.weight;
        L(b, a) -= e.weight;
    }
    Eigen::MatrixXd pinv = L.completeOrthogonalDecomposition().pseudoInverse();
    return pinv(0, 0) - 2.0 * pinv(0, 1) + pinv(1, 1);
}

/// d0 oracle: plain Dijkstra on the graph with x and y spliced in as
/// explicit degree-2 vertices.
inline double split_graph_d0(const EmbeddedGraph& g, const CablePoint& x, const CablePoint& y) {
    struct Arc {
        int to;
        double len;
    };
    const int n = g.vertex_count();
    std::vector<std::vector<Arc>> adj(n + 2);
    auto add = [&](int a, int b, double len) {
        adj[a].push_back({b, len});
        adj[b].push_back({a, len});
    };
    for (const auto& e : g.edges()) {
        std::vector<std::pair<double, int>> cuts;  // (t, node)
        if (x.edge == (&e - g.edges().data())) cuts.push_back({x.t, n});
        if (y.edge == (&e - g.edges().data())) cuts.push_back({y.t, n + 1});
        std::sort(cuts.begin(), cuts.end());
        int prev = e.u;
        double prev_t = 0.0;
        for (auto& [t, id] : cuts) {
            add(prev, id, (t - prev_t) * e.length);
            prev = id;
            prev_t = t;
        }
        add(prev, e.v, (1.0 - prev_t) * e.length);
    }
    std::vector<double> dist(n + 2, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[n] = 0.0;
    pq.push({0.0, n});
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d > dist[v]) continue;
        for (const Arc& a : adj[v])
            if (d + a.len < dist[a.to]) {
                dist[a.to] = d + a.len;
                pq.push({dist[a.to], a.to});
            }
    }
    return dist[n + 1];
}

}  // namespace oracles
