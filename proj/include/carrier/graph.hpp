#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "carrier/geometry.hpp"

namespace carrier {

using VertexId = std::int32_t;
using EdgeId = std::int32_t;

struct GraphError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DuplicatePositionError : GraphError {
    VertexId a, b;
    DuplicatePositionError(VertexId a_, VertexId b_)
        : GraphError("vertices " + std::to_string(a_) + " and " + std::to_string(b_) +
                     " share a position"),
          a(a_), b(b_) {}
};
struct EdgeCrossingError : GraphError {
    EdgeId e, f;
    EdgeCrossingError(EdgeId e_, EdgeId f_)
        : GraphError("edges " + std::to_string(e_) + " and " + std::to_string(f_) + " cross"),
          e(e_), f(f_) {}
};
struct DisconnectedError : GraphError {
    DisconnectedError() : GraphError("graph is not connected") {}
};
struct SingletonGraphError : GraphError {
    SingletonGraphError() : GraphError("operation needs at least two vertices") {}
};

struct Face {
    std::vector<VertexId> boundary;  // cyclic; ccw for bounded faces
    bool bounded = false;
    double area = 0.0;
    double diameter = 0.0;
};

struct EdgeRec {
    VertexId u, v;  // u < v
    double weight;
    double length;
};

/// Straight-line embedded planar weighted graph. Immutable after build();
/// all queries are read-only.
class EmbeddedGraph {
public:
    using EdgeInput = std::tuple<VertexId, VertexId, double>;

    static EmbeddedGraph build(std::vector<Vec2> positions, const std::vector<EdgeInput>& edges) {
        EmbeddedGraph g;
        g.pos_ = std::move(positions);
        if (g.pos_.empty()) throw GraphError("empty vertex set");
        g.check_duplicate_positions();
        g.init_edges(edges);
        g.check_connected();
        g.check_crossings();
        g.build_rotation();
        g.trace_faces();
        g.compute_isolation();
        return g;
    }

    int vertex_count() const { return static_cast<int>(pos_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const Vec2& position(VertexId v) const { return pos_[v]; }
    const std::vector<Vec2>& positions() const { return pos_; }
    const EdgeRec& edge(EdgeId e) const { return edges_[e]; }
    const std::vector<EdgeRec>& edges() const { return edges_; }

    /// Neighbors of v in counterclockwise rotation order.
    std::span<const VertexId> neighbors(VertexId v) const {
        return {adj_nbr_.data() + adj_off_[v],
                static_cast<std::size_t>(adj_off_[v + 1] - adj_off_[v])};
    }
    /// Incident edge ids of v, aligned with neighbors(v).
    std::span<const EdgeId> incident_edges(VertexId v) const {
        return {adj_edge_.data() + adj_off_[v],
                static_cast<std::size_t>(adj_off_[v + 1] - adj_off_[v])};
    }
    int degree(VertexId v) const { return adj_off_[v + 1] - adj_off_[v]; }
    int max_degree() const { return max_degree_; }

    EdgeId edge_between(VertexId u, VertexId v) const {
        auto it = edge_index_.find(key(u, v));
        return it == edge_index_.end() ? -1 : it->second;
    }

    /// Total incident weight w_v (the walk's normalizing constant).
    double vertex_weight(VertexId v) const { return vertex_weight_[v]; }

    const std::vector<Face>& faces() const { return faces_; }
    const Face& unbounded_face() const { return faces_[unbounded_]; }
    std::size_t unbounded_face_index() const { return unbounded_; }

    double isolation_radius(VertexId u) const {
        if (vertex_count() < 2) throw SingletonGraphError();
        return isolation_[u];
    }
    const std::vector<double>& isolation_radii() const { return isolation_; }

    std::vector<VertexId> euclidean_ball_vertices(const Vec2& center, double r) const {
        std::vector<VertexId> out;
        for (VertexId v = 0; v < vertex_count(); ++v)
            if (distance(pos_[v], center) <= r) out.push_back(v);
        return out;
    }

    /// External vertex boundary of S: vertices outside S adjacent to S.
    std::vector<VertexId> vertex_boundary(const std::vector<VertexId>& s) const {
        std::vector<char> in(vertex_count(), 0);
        for (VertexId v : s) in[v] = 1;
        std::vector<char> seen(vertex_count(), 0);
        std::vector<VertexId> out;
        for (VertexId v : s)
            for (VertexId u : neighbors(v))
                if (!in[u] && !seen[u]) {
                    seen[u] = 1;
                    out.push_back(u);
                }
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Boundary cycle of the unbounded face as plane points (carrier boundary).
    const std::vector<Vec2>& carrier_boundary() const { return carrier_poly_; }

    bool point_in_carrier(const Vec2& p) const {
        return point_in_polygon(p, carrier_poly_);
    }
    /// Distance from an interior point to the carrier boundary; negative if outside.
    double carrier_clearance(const Vec2& p) const {
        double d = distance_to_polygon_boundary(p, carrier_poly_);
        return point_in_polygon(p, carrier_poly_) ? d : -d;
    }
    bool disc_in_carrier(const Vec2& c, double r) const {
        return carrier_clearance(c) >= r;
    }

    Vec2 point_on_edge(EdgeId e, double t) const {
        const EdgeRec& er = edges_[e];
        return pos_[er.u] * (1.0 - t) + pos_[er.v] * t;
    }

private:
    static std::int64_t key(VertexId u, VertexId v) {
        if (u > v) std::swap(u, v);
        return (static_cast<std::int64_t>(u) << 32) | static_cast<std::uint32_t>(v);
    }

    void check_duplicate_positions() {
        double lo_x = pos_[0].x, hi_x = lo_x, lo_y = pos_[0].y, hi_y = lo_y;
        for (const Vec2& p : pos_) {
            lo_x = std::min(lo_x, p.x); hi_x = std::max(hi_x, p.x);
            lo_y = std::min(lo_y, p.y); hi_y = std::max(hi_y, p.y);
        }
        double diag = std::hypot(hi_x - lo_x, hi_y - lo_y);
        double tol = 1e-12 * (diag > 0.0 ? diag : 1.0);
        std::vector<VertexId> order(pos_.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](VertexId a, VertexId b) {
            return pos_[a].x < pos_[b].x;
        });
        for (std::size_t i = 0; i < order.size(); ++i)
            for (std::size_t j = i + 1; j < order.size(); ++j) {
                if (pos_[order[j]].x - pos_[order[i]].x > tol) break;
                if (distance(pos_[order[i]], pos_[order[j]]) <= tol) {
                    VertexId a = std::min(order[i], order[j]), b = std::max(order[i], order[j]);
                    throw DuplicatePositionError(a, b);
                }
            }
    }

    void init_edges(const std::vector<EdgeInput>& edges) {
        edges_.reserve(edges.size());
        for (const auto& [a, b, w] : edges) {
            if (a == b) throw GraphError("self-loop at vertex " + std::to_string(a));
            if (a < 0 || b < 0 || a >= vertex_count() || b >= vertex_count())
                throw GraphError("edge endpoint out of range");
            if (!(w > 0.0)) throw GraphError("non-positive edge weight");
            VertexId u = std::min(a, b), v = std::max(a, b);
            if (edge_index_.count(key(u, v))) throw GraphError("duplicate edge");
            EdgeId id = static_cast<EdgeId>(edges_.size());
            edge_index_[key(u, v)] = id;
            edges_.push_back({u, v, w, distance(pos_[u], pos_[v])});
        }
        if (edges_.empty() && vertex_count() > 1) throw DisconnectedError();
    }

    void check_connected() {
        std::vector<char> seen(vertex_count(), 0);
        std::vector<std::vector<VertexId>> nbrs(vertex_count());
        for (const EdgeRec& e : edges_) {
            nbrs[e.u].push_back(e.v);
            nbrs[e.v].push_back(e.u);
        }
        std::queue<VertexId> q;
        q.push(0);
        seen[0] = 1;
        int visited = 1;
        while (!q.empty()) {
            VertexId v = q.front();
            q.pop();
            for (VertexId u : nbrs[v])
                if (!seen[u]) {
                    seen[u] = 1;
                    ++visited;
                    q.push(u);
                }
        }
        if (visited != vertex_count()) throw DisconnectedError();
    }

    // x-sweep over edge bounding boxes; detailed checks for overlapping boxes
    void check_crossings() const {
        struct Box {
            double x0, x1, y0, y1;
            EdgeId id;
        };
        std::vector<Box> boxes;
        boxes.reserve(edges_.size());
        for (EdgeId e = 0; e < edge_count(); ++e) {
            const Vec2& a = pos_[edges_[e].u];
            const Vec2& b = pos_[edges_[e].v];
            boxes.push_back({std::min(a.x, b.x), std::max(a.x, b.x),
                             std::min(a.y, b.y), std::max(a.y, b.y), e});
        }
        std::sort(boxes.begin(), boxes.end(),
                  [](const Box& a, const Box& b) { return a.x0 < b.x0; });
        std::vector<const Box*> active;
        for (const Box& b : boxes) {
            std::erase_if(active, [&](const Box* a) { return a->x1 < b.x0; });
            for (const Box* a : active) {
                if (a->y1 < b.y0 || b.y1 < a->y0) continue;
                check_pair(a->id, b.id);
            }
            active.push_back(&b);
        }
        // a vertex sitting on a non-incident edge breaks the embedding too
        for (EdgeId e = 0; e < edge_count(); ++e) {
            const EdgeRec& er = edges_[e];
            double tol = 1e-12 * er.length;
            for (VertexId v = 0; v < vertex_count(); ++v) {
                if (v == er.u || v == er.v) continue;
                if (point_segment_distance(pos_[v], pos_[er.u], pos_[er.v]) <= tol) {
                    EdgeId other = incident_any(v);
                    throw EdgeCrossingError(e, other >= 0 ? other : e);
                }
            }
        }
    }

    EdgeId incident_any(VertexId v) const {
        for (EdgeId e = 0; e < edge_count(); ++e)
            if (edges_[e].u == v || edges_[e].v == v) return e;
        return -1;
    }

    void check_pair(EdgeId i, EdgeId j) const {
        const EdgeRec& e = edges_[i];
        const EdgeRec& f = edges_[j];
        double tol = 1e-12 * std::min(e.length, f.length);
        VertexId shared = -1, qe = -1, qf = -1;
        if (e.u == f.u) { shared = e.u; qe = e.v; qf = f.v; }
        else if (e.u == f.v) { shared = e.u; qe = e.v; qf = f.u; }
        else if (e.v == f.u) { shared = e.v; qe = e.u; qf = f.v; }
        else if (e.v == f.v) { shared = e.v; qe = e.u; qf = f.u; }
        if (shared >= 0) {
            // collinear overlap from a shared endpoint
            if (point_segment_distance(pos_[qe], pos_[shared], pos_[qf]) <= tol ||
                point_segment_distance(pos_[qf], pos_[shared], pos_[qe]) <= tol)
                throw EdgeCrossingError(i, j);
            return;
        }
        if (segment_segment_distance(pos_[e.u], pos_[e.v], pos_[f.u], pos_[f.v]) <= tol)
            throw EdgeCrossingError(i, j);
    }

    void build_rotation() {
        std::vector<std::vector<std::pair<double, EdgeId>>> rot(vertex_count());
        for (EdgeId e = 0; e < edge_count(); ++e) {
            const EdgeRec& er = edges_[e];
            rot[er.u].push_back({arg(pos_[er.v] - pos_[er.u]), e});
            rot[er.v].push_back({arg(pos_[er.u] - pos_[er.v]), e});
        }
        adj_off_.assign(vertex_count() + 1, 0);
        for (VertexId v = 0; v < vertex_count(); ++v) {
            std::sort(rot[v].begin(), rot[v].end());
            adj_off_[v + 1] = adj_off_[v] + static_cast<int>(rot[v].size());
        }
        adj_nbr_.resize(adj_off_.back());
        adj_edge_.resize(adj_off_.back());
        vertex_weight_.assign(vertex_count(), 0.0);
        max_degree_ = 0;
        for (VertexId v = 0; v < vertex_count(); ++v) {
            int k = adj_off_[v];
            for (auto& [ang, e] : rot[v]) {
                (void)ang;
                const EdgeRec& er = edges_[e];
                adj_nbr_[k] = (er.u == v) ? er.v : er.u;
                adj_edge_[k] = e;
                vertex_weight_[v] += er.weight;
                ++k;
            }
            max_degree_ = std::max(max_degree_, degree(v));
        }
    }

    // Face left of each directed edge via rotation-system traversal:
    // successor of (u -> v) is (v -> w) with w the predecessor of u in the
    // ccw rotation around v. Bounded faces come out counterclockwise.
    void trace_faces() {
        const int m = edge_count();
        std::vector<char> used(2 * m, 0);  // directed edge id: 2*e + (from v side)
        auto dir_id = [&](EdgeId e, bool from_u) { return 2 * e + (from_u ? 0 : 1); };
        auto rot_index = [&](VertexId v, VertexId nbr) {
            auto ns = neighbors(v);
            for (std::size_t i = 0; i < ns.size(); ++i)
                if (ns[i] == nbr) return static_cast<int>(i);
            return -1;
        };
        faces_.clear();
        double min_area = std::numeric_limits<double>::infinity();
        for (EdgeId e0 = 0; e0 < m; ++e0)
            for (int side = 0; side < 2; ++side) {
                if (used[2 * e0 + side]) continue;
                VertexId u = side == 0 ? edges_[e0].u : edges_[e0].v;
                VertexId v = side == 0 ? edges_[e0].v : edges_[e0].u;
                Face face;
                VertexId cu = u, cv = v;
                EdgeId ce = e0;
                do {
                    used[dir_id(ce, edges_[ce].u == cu)] = 1;
                    face.boundary.push_back(cu);
                    int idx = rot_index(cv, cu);
                    auto ns = neighbors(cv);
                    auto es = incident_edges(cv);
                    int prev = (idx + static_cast<int>(ns.size()) - 1) %
                               static_cast<int>(ns.size());
                    cu = cv;
                    cv = ns[prev];
                    ce = es[prev];
                } while (!(cu == u && cv == v));
                std::vector<Vec2> poly;
                poly.reserve(face.boundary.size());
                for (VertexId w : face.boundary) poly.push_back(pos_[w]);
                double sa = polygon_signed_area(poly);
                face.area = std::abs(sa);
                face.diameter = polygon_diameter(poly);
                face.bounded = sa > 0.0;
                if (sa < min_area) {
                    min_area = sa;
                    unbounded_ = faces_.size();
                }
                faces_.push_back(std::move(face));
            }
        faces_[unbounded_].bounded = false;
        carrier_poly_.clear();
        for (VertexId w : faces_[unbounded_].boundary) carrier_poly_.push_back(pos_[w]);
    }

    void compute_isolation() {
        const int n = vertex_count();
        isolation_.assign(n, std::numeric_limits<double>::infinity());
        if (n < 2) return;
        std::vector<VertexId> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](VertexId a, VertexId b) {
            return pos_[a].x < pos_[b].x;
        });
        // sweep in x: for each vertex look left/right while |dx| < current best
        for (int i = 0; i < n; ++i) {
            VertexId v = order[i];
            double best = isolation_[v];
            for (int j = i + 1; j < n; ++j) {
                double dx = pos_[order[j]].x - pos_[v].x;
                if (dx * dx >= best) break;
                double d2 = norm2(pos_[order[j]] - pos_[v]);
                best = std::min(best, d2);
                isolation_[order[j]] = std::min(isolation_[order[j]], d2);
            }
            isolation_[v] = best;
        }
        for (double& d : isolation_) d = std::sqrt(d);
    }

    std::vector<Vec2> pos_;
    std::vector<EdgeRec> edges_;
    std::unordered_map<std::int64_t, EdgeId> edge_index_;
    std::vector<int> adj_off_;
    std::vector<VertexId> adj_nbr_;
    std::vector<EdgeId> adj_edge_;
    std::vector<double> vertex_weight_;
    std::vector<Face> faces_;
    std::size_t unbounded_ = 0;
    std::vector<Vec2> carrier_poly_;
    std::vector<double> isolation_;
    int max_degree_ = 0;
};

}  // namespace carrier
