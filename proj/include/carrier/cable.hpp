#pragma once

#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "carrier/graph.hpp"
#include "carrier/rng.hpp"

namespace carrier {

struct BallEscapesCarrierError : GraphError {
    BallEscapesCarrierError() : GraphError("euclidean ball leaves the carrier") {}
};

/// Point of the cable space X: parameter t in [0,1] along an edge, measured
/// from the lower-id endpoint. Vertices are the t in {0,1} classes.
struct CablePoint {
    EdgeId edge = -1;
    double t = 0.0;
};

inline CablePoint cable_at_vertex(const EmbeddedGraph& g, VertexId v) {
    EdgeId e = g.incident_edges(v).front();
    return {e, g.edge(e).u == v ? 0.0 : 1.0};
}

inline Vec2 cable_position(const EmbeddedGraph& g, const CablePoint& x) {
    return g.point_on_edge(x.edge, x.t);
}

/// Vertex id if x sits at an edge endpoint, else -1.
inline VertexId cable_vertex_of(const CablePoint& x, const EmbeddedGraph& g) {
    if (x.t == 0.0) return g.edge(x.edge).u;
    if (x.t == 1.0) return g.edge(x.edge).v;
    return -1;
}

/// Isolation radius r_x: nearest-other-vertex distance for vertices, length
/// of the carrying edge otherwise.
inline double cable_isolation(const EmbeddedGraph& g, const CablePoint& x) {
    VertexId v = cable_vertex_of(x, g);
    if (v >= 0) return g.isolation_radius(v);
    return g.edge(x.edge).length;
}

struct CablePiece {
    EdgeId edge = -1;
    double lo = 0.0, hi = 0.0;  // params on the edge
};

/// Region of X as edge sub-intervals; measure weights plane length by edge
/// length, so a parameter stretch dt on edge e has measure |e|^2 dt.
struct CableBall {
    std::vector<CablePiece> pieces;
    double measure = 0.0;
};

namespace cable {

inline double piece_measure(const EmbeddedGraph& g, const CablePiece& p) {
    double len = g.edge(p.edge).length;
    return len * len * (p.hi - p.lo);
}

/// Shortest-path distance from x to every vertex (Dijkstra seeded on the
/// endpoints of x's edge).
inline std::vector<double> vertex_distances(const EmbeddedGraph& g, const CablePoint& x) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(g.vertex_count(), inf);
    using Item = std::pair<double, VertexId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    const EdgeRec& e = g.edge(x.edge);
    auto seed = [&](VertexId v, double d) {
        if (d < dist[v]) {
            dist[v] = d;
            pq.push({d, v});
        }
    };
    seed(e.u, x.t * e.length);
    seed(e.v, (1.0 - x.t) * e.length);
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d > dist[v]) continue;
        auto ns = g.neighbors(v);
        auto es = g.incident_edges(v);
        for (std::size_t i = 0; i < ns.size(); ++i) {
            double nd = d + g.edge(es[i]).length;
            if (nd < dist[ns[i]]) {
                dist[ns[i]] = nd;
                pq.push({nd, ns[i]});
            }
        }
    }
    return dist;
}

/// Exact d0: along-edge geodesic for points of one edge, endpoint routing
/// otherwise. Arguments are canonicalized so d0(x,y) == d0(y,x) bit for bit.
inline double d0(const EmbeddedGraph& g, CablePoint x, CablePoint y) {
    if (std::pair{y.edge, y.t} < std::pair{x.edge, x.t}) std::swap(x, y);
    const EdgeRec& ey = g.edge(y.edge);
    double best = std::numeric_limits<double>::infinity();
    if (x.edge == y.edge) best = std::abs(x.t - y.t) * ey.length;
    std::vector<double> dist = vertex_distances(g, x);
    best = std::min(best, dist[ey.u] + y.t * ey.length);
    best = std::min(best, dist[ey.v] + (1.0 - y.t) * ey.length);
    return best;
}

/// d0 ball as edge intervals. Pass precomputed vertex distances when sweeping
/// several radii around one center.
inline CableBall ball_d0(const EmbeddedGraph& g, const CablePoint& x, double r,
                         const std::vector<double>* dist_hint = nullptr) {
    std::vector<double> own;
    if (!dist_hint) {
        own = vertex_distances(g, x);
        dist_hint = &own;
    }
    const std::vector<double>& dist = *dist_hint;
    CableBall ball;
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const EdgeRec& er = g.edge(e);
        std::vector<UnitInterval> iv;
        if (dist[er.u] <= r) iv.push_back({0.0, (r - dist[er.u]) / er.length});
        if (dist[er.v] <= r) iv.push_back({1.0 - (r - dist[er.v]) / er.length, 1.0});
        if (e == x.edge) {
            double dt = r / er.length;
            iv.push_back({x.t - dt, x.t + dt});
        }
        for (const UnitInterval& u : merge_unit_intervals(std::move(iv))) {
            ball.pieces.push_back({e, u.lo, u.hi});
            ball.measure += er.length * er.length * u.length();
        }
    }
    return ball;
}

/// m(B_d0(x,2r)) / m(B_d0(x,r)); requires B_euc(x,2r) inside the carrier.
inline double doubling_ratio(const EmbeddedGraph& g, const CablePoint& x, double r) {
    if (!g.disc_in_carrier(cable_position(g, x), 2.0 * r)) throw BallEscapesCarrierError();
    std::vector<double> dist = vertex_distances(g, x);
    double m2 = ball_d0(g, x, 2.0 * r, &dist).measure;
    double m1 = ball_d0(g, x, r, &dist).measure;
    return m2 / m1;
}

/// Euclidean cone piece of X: points within distance r of the vertex u with
/// argument in I. The apex and boundary ties are included.
inline CableBall cone(const EmbeddedGraph& g, VertexId u, double r, const AngleInterval& I) {
    const Vec2 up = g.position(u);
    CableBall out;
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const EdgeRec& er = g.edge(e);
        const Vec2 a = g.position(er.u), b = g.position(er.v);
        // radial clip: |p(t)-u| <= r is a single sub-interval
        double t0 = 0.0, t1 = 1.0;
        {
            Vec2 d = b - a, f = a - up;
            double A = norm2(d), B = 2.0 * dot(f, d), C = norm2(f) - r * r;
            if (A == 0.0) continue;
            double disc = B * B - 4.0 * A * C;
            if (disc < 0.0) continue;
            double s = std::sqrt(disc);
            double q = (B >= 0.0) ? -0.5 * (B + s) : -0.5 * (B - s);
            double ra = q / A, rb = (q != 0.0) ? C / q : ra;
            if (ra > rb) std::swap(ra, rb);
            t0 = std::max(0.0, ra);
            t1 = std::min(1.0, rb);
            if (!(t1 > t0)) continue;
        }
        std::vector<UnitInterval> keep;
        if (er.u == u || er.v == u) {
            // direction from the apex is constant along the edge
            Vec2 other = (er.u == u) ? b : a;
            if (I.contains(arg(other - up))) keep.push_back({t0, t1});
        } else {
            // the argument seen from u is strictly monotone along a segment
            Vec2 p0 = a + (b - a) * t0, p1 = a + (b - a) * t1;
            double th0 = arg(p0 - up);
            double dth = std::atan2(cross(p0 - up, p1 - up), dot(p0 - up, p1 - up));
            if (I.full()) {
                keep.push_back({t0, t1});
            } else if (std::abs(dth) < 1e-15) {
                if (I.contains(th0)) keep.push_back({t0, t1});
            } else {
                auto theta_at = [&](double t) {
                    Vec2 p = a + (b - a) * t;
                    double d = std::atan2(cross(p0 - up, p - up), dot(p0 - up, p - up));
                    return th0 + d;  // unwrapped; |range| < pi
                };
                auto t_of_theta = [&](double target) {
                    double lo = t0, hi = t1;
                    bool increasing = dth > 0.0;
                    for (int it = 0; it < 60; ++it) {
                        double mid = 0.5 * (lo + hi);
                        bool below = theta_at(mid) < target;
                        if (below == increasing)
                            lo = mid;
                        else
                            hi = mid;
                    }
                    return 0.5 * (lo + hi);
                };
                double lo_th = std::min(th0, th0 + dth), hi_th = std::max(th0, th0 + dth);
                // lifted copies of [I.lo, I.lo+len] meeting [lo_th, hi_th]
                double base = I.lo + kTwoPi * std::floor((lo_th - I.lo) / kTwoPi - 1.0);
                for (double ilo = base; ilo <= hi_th; ilo += kTwoPi) {
                    double ihi = ilo + I.len;
                    double clo = std::max(lo_th, ilo), chi = std::min(hi_th, ihi);
                    if (chi < clo) continue;
                    double ta = t_of_theta(clo), tb = t_of_theta(chi);
                    if (ta > tb) std::swap(ta, tb);
                    keep.push_back({ta, tb});
                }
            }
        }
        for (const UnitInterval& k : merge_unit_intervals(std::move(keep))) {
            out.pieces.push_back({e, k.lo, k.hi});
            out.measure += er.length * er.length * k.length();
        }
    }
    return out;
}

/// Largest sampled d0(x,y)/|x-y| over `samples` random cable point pairs:
/// the empirical upper bi-Lipschitz constant. Half the pairs are drawn from
/// edges meeting a common vertex, where the extremal configurations live;
/// the other half are independent.
inline double bilipschitz_constant(const EmbeddedGraph& g, int samples, std::uint64_t seed) {
    double worst = 1.0;
    RngStream rng(seed, 0);
    for (int i = 0; i < samples; ++i) {
        CablePoint x{static_cast<EdgeId>(rng.next_below(g.edge_count())), rng.next_double()};
        EdgeId e2;
        if ((i & 1) == 0) {
            e2 = static_cast<EdgeId>(rng.next_below(g.edge_count()));
        } else {
            const EdgeRec& er = g.edge(x.edge);
            VertexId pivot = (rng.next_below(2) == 0) ? er.u : er.v;
            auto es = g.incident_edges(pivot);
            e2 = es[rng.next_below(es.size())];
        }
        CablePoint y{e2, rng.next_double()};
        double euc = distance(cable_position(g, x), cable_position(g, y));
        if (euc <= 1e-12) continue;
        worst = std::max(worst, d0(g, x, y) / euc);
    }
    return worst;
}

}  // namespace cable
}  // namespace carrier
