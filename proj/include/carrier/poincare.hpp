#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <map>
#include <vector>

#include "carrier/cable.hpp"
#include "carrier/graph.hpp"

namespace carrier {

struct EigenSolverFailureError : GraphError {
    using GraphError::GraphError;
};

struct PoincareOptions {
    double blowup = 4.0;      // the outer ball is B(x0, blowup*r)
    double h_divisor = 8.0;   // target element size: (min edge in ball)/h_divisor
    std::size_t max_nodes = 200000;
    int max_power_iters = 2000;
    double power_tol = 1e-11;
    bool check_carrier = true;  // 1-d reference problems have no carrier polygon
};

struct PoincareResult {
    double kappa = 0.0;   // best constant: integral inequality holds with kappa * r^2
    double mu = 0.0;      // top generalized eigenvalue <f,f>_m(B) / E_{B'}(f)
    int nodes = 0;
    int elements = 0;
    int iterations = 0;
    double r = 0.0;
};

namespace detail {

struct CableMesh {
    // nodes indexed 0..n-1; vertex nodes shared between edges
    std::vector<int> elem_a, elem_b;       // node ids
    std::vector<double> elem_len;          // plane length of the element
    std::vector<double> elem_weight;       // |e| of the carrying edge
    std::vector<char> elem_in_core;        // element lies in the inner ball
    int node_count = 0;
};

/// Subdivide the pieces of `outer` into elements of length <= h, sharing
/// nodes at graph vertices, splitting exactly at the inner-ball cut points
/// so every element is entirely in or out of the core.
inline CableMesh build_cable_mesh(const EmbeddedGraph& g, const CableBall& outer,
                                  const CableBall& core, double h) {
    CableMesh mesh;
    std::map<VertexId, int> vertex_node;
    auto node_for_vertex = [&](VertexId v) {
        auto [it, inserted] = vertex_node.try_emplace(v, mesh.node_count);
        if (inserted) ++mesh.node_count;
        return it->second;
    };
    std::map<EdgeId, std::vector<std::pair<double, double>>> core_by_edge;
    for (const CablePiece& p : core.pieces) core_by_edge[p.edge].push_back({p.lo, p.hi});

    for (const CablePiece& piece : outer.pieces) {
        const EdgeRec& er = g.edge(piece.edge);
        // breakpoints: piece ends, core cut points, uniform refinement
        std::vector<double> cuts{piece.lo, piece.hi};
        if (auto it = core_by_edge.find(piece.edge); it != core_by_edge.end())
            for (auto [lo, hi] : it->second) {
                if (lo > piece.lo && lo < piece.hi) cuts.push_back(lo);
                if (hi > piece.lo && hi < piece.hi) cuts.push_back(hi);
            }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        std::vector<double> refined;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            refined.push_back(cuts[i]);
            double span = (cuts[i + 1] - cuts[i]) * er.length;
            int pieces_here = std::max(1, static_cast<int>(std::ceil(span / h)));
            for (int k = 1; k < pieces_here; ++k)
                refined.push_back(cuts[i] + (cuts[i + 1] - cuts[i]) * k / pieces_here);
        }
        refined.push_back(cuts.back());

        auto in_core = [&](double mid) {
            if (auto it = core_by_edge.find(piece.edge); it != core_by_edge.end())
                for (auto [lo, hi] : it->second)
                    if (mid >= lo - 1e-15 && mid <= hi + 1e-15) return true;
            return false;
        };
        int prev_node = -1;
        for (std::size_t i = 0; i < refined.size(); ++i) {
            int node;
            if (refined[i] == 0.0)
                node = node_for_vertex(er.u);
            else if (refined[i] == 1.0)
                node = node_for_vertex(er.v);
            else
                node = mesh.node_count++;
            if (i > 0) {
                mesh.elem_a.push_back(prev_node);
                mesh.elem_b.push_back(node);
                mesh.elem_len.push_back((refined[i] - refined[i - 1]) * er.length);
                mesh.elem_weight.push_back(er.length);
                mesh.elem_in_core.push_back(in_core(0.5 * (refined[i] + refined[i - 1])));
            }
            prev_node = node;
        }
    }
    return mesh;
}

}  // namespace detail

/// Best kappa with  int_{B(r)} |f - mean|^2 dm  <=  kappa r^2 int_{B(Cr)} |f'|^2 dm
/// over the discretized cable functions: top eigenvalue of the (mass, energy)
/// pencil on the mean-centered space, by inverse power iteration.
inline PoincareResult poincare_constant(const EmbeddedGraph& g, const CablePoint& x0, double r,
                                        const PoincareOptions& opts = {}) {
    if (opts.check_carrier && !g.disc_in_carrier(cable_position(g, x0), opts.blowup * r))
        throw BallEscapesCarrierError();
    std::vector<double> dist = cable::vertex_distances(g, x0);
    CableBall outer = cable::ball_d0(g, x0, opts.blowup * r, &dist);
    CableBall core = cable::ball_d0(g, x0, r, &dist);
    if (outer.pieces.empty() || core.measure <= 0.0)
        throw EigenSolverFailureError("empty discretization");

    double min_len = std::numeric_limits<double>::infinity(), total_len = 0.0;
    for (const CablePiece& p : outer.pieces) {
        min_len = std::min(min_len, g.edge(p.edge).length);
        total_len += (p.hi - p.lo) * g.edge(p.edge).length;
    }
    double h = min_len / opts.h_divisor;
    h = std::max(h, total_len / static_cast<double>(opts.max_nodes));

    detail::CableMesh mesh = detail::build_cable_mesh(g, outer, core, h);
    const int n = mesh.node_count;
    const int ne = static_cast<int>(mesh.elem_len.size());

    using Trip = Eigen::Triplet<double>;
    std::vector<Trip> at;
    Eigen::VectorXd mass_diag_row = Eigen::VectorXd::Zero(n);  // M_B * 1
    std::vector<Trip> mt;
    for (int e = 0; e < ne; ++e) {
        int a = mesh.elem_a[e], b = mesh.elem_b[e];
        double k = mesh.elem_weight[e] / mesh.elem_len[e];
        at.push_back({a, a, k});
        at.push_back({b, b, k});
        at.push_back({a, b, -k});
        at.push_back({b, a, -k});
        if (mesh.elem_in_core[e]) {
            double m = mesh.elem_weight[e] * mesh.elem_len[e] / 6.0;
            mt.push_back({a, a, 2.0 * m});
            mt.push_back({b, b, 2.0 * m});
            mt.push_back({a, b, m});
            mt.push_back({b, a, m});
            mass_diag_row[a] += 3.0 * m;
            mass_diag_row[b] += 3.0 * m;
        }
    }
    Eigen::SparseMatrix<double> A(n, n), M(n, n);
    A.setFromTriplets(at.begin(), at.end());
    M.setFromTriplets(mt.begin(), mt.end());
    const double m_total = mass_diag_row.sum();
    if (!(m_total > 0.0)) throw EigenSolverFailureError("inner ball carries no mass");

    // mean-centering: Mt v = M v - (m_row . v / m_total) m_row
    auto apply_centered_mass = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd mv = M * v;
        double proj = mass_diag_row.dot(v) / m_total;
        return Eigen::VectorXd(mv - proj * mass_diag_row);
    };

    // pin node 0: drop its row/col; the reduced stiffness is SPD
    Eigen::SparseMatrix<double> Ared = A.bottomRightCorner(n - 1, n - 1);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(Ared);
    if (chol.info() != Eigen::Success) throw EigenSolverFailureError("stiffness factorization");

    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) v[i] = std::sin(1.0 + 0.7 * i);  // fixed, non-constant
    v -= Eigen::VectorXd::Constant(n, v.mean());
    double mu = 0.0, prev_mu = -1.0;
    int it = 0;
    for (; it < opts.max_power_iters; ++it) {
        Eigen::VectorXd b = apply_centered_mass(v);
        Eigen::VectorXd y(n);
        y[0] = 0.0;
        y.tail(n - 1) = chol.solve(b.tail(n - 1));
        double denom = y.dot(A * y);
        if (!(denom > 0.0)) throw EigenSolverFailureError("power iteration collapsed");
        mu = y.dot(apply_centered_mass(y)) / denom;
        v = y / std::sqrt(denom);
        if (it > 2 && std::abs(mu - prev_mu) <= opts.power_tol * mu) break;
        prev_mu = mu;
    }
    PoincareResult res;
    res.mu = mu;
    res.kappa = mu / (r * r);
    res.nodes = n;
    res.elements = ne;
    res.iterations = it;
    res.r = r;
    return res;
}

}  // namespace carrier
