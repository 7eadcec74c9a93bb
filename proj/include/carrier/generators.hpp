#pragma once

#include <array>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "carrier/geometry.hpp"
#include "carrier/graph.hpp"
#include "carrier/rng.hpp"

namespace carrier {

struct SizeCapExceededError : GraphError {
    SizeCapExceededError(std::size_t n, std::size_t cap)
        : GraphError("triangulation would have " + std::to_string(n) +
                     " vertices, cap is " + std::to_string(cap)) {}
};
struct DegenerateConfigurationError : GraphError {
    using GraphError::GraphError;
};

/// Combinatorial triangulation of a disc: oriented triangles, one boundary
/// cycle, rotation order per vertex. Positions are assigned later by packing.
struct Triangulation {
    int n = 0;
    std::vector<std::array<VertexId, 3>> faces;  // ccw
    std::vector<VertexId> boundary;              // ccw cycle
    std::vector<char> interior;                  // per vertex
    std::vector<std::vector<VertexId>> rot;      // ccw neighbor order
    std::vector<int> layer;                      // generation depth (if layered)

    int interior_count() const {
        int k = 0;
        for (char c : interior) k += c;
        return k;
    }
    std::vector<std::pair<VertexId, VertexId>> edge_list() const {
        std::set<std::pair<VertexId, VertexId>> es;
        for (const auto& f : faces)
            for (int i = 0; i < 3; ++i) {
                VertexId a = f[i], b = f[(i + 1) % 3];
                es.insert({std::min(a, b), std::max(a, b)});
            }
        return {es.begin(), es.end()};
    }
};

namespace detail {

/// Rebuild per-vertex ccw neighbor order from oriented faces. In a ccw face
/// (v,a,b) the wedge at v runs from a to b, so b succeeds a around v.
inline void rotation_from_faces(Triangulation& t) {
    std::vector<std::map<VertexId, VertexId>> succ(t.n);
    for (const auto& f : t.faces)
        for (int i = 0; i < 3; ++i) {
            VertexId v = f[i], a = f[(i + 1) % 3], b = f[(i + 2) % 3];
            succ[v][a] = b;
        }
    t.rot.assign(t.n, {});
    for (VertexId v = 0; v < t.n; ++v) {
        if (succ[v].empty()) continue;
        std::set<VertexId> targets;
        for (auto& [from, to] : succ[v]) targets.insert(to);
        VertexId start = -1;
        for (auto& [from, to] : succ[v])
            if (!targets.count(from)) { start = from; break; }
        bool closed = start < 0;  // interior: the wedge chain is a cycle
        if (closed) start = succ[v].begin()->first;
        VertexId cur = start;
        do {
            t.rot[v].push_back(cur);
            auto it = succ[v].find(cur);
            if (it == succ[v].end()) break;
            cur = it->second;
        } while (cur != start);
    }
}

inline void mark_interior(Triangulation& t) {
    t.interior.assign(t.n, 1);
    for (VertexId v : t.boundary) t.interior[v] = 0;
}

}  // namespace detail

/// Wheel: one hub (vertex 0) and a k-cycle rim; the disc triangulation with a
/// single interior vertex. make_wheel(3) is K4.
inline Triangulation make_wheel(int k) {
    if (k < 3) throw GraphError("wheel needs k >= 3");
    Triangulation t;
    t.n = k + 1;
    t.layer.assign(t.n, 1);
    t.layer[0] = 0;
    for (int i = 0; i < k; ++i) {
        VertexId a = 1 + i, b = 1 + (i + 1) % k;
        t.faces.push_back({0, a, b});
        t.boundary.push_back(a);
    }
    detail::mark_interior(t);
    detail::rotation_from_faces(t);
    return t;
}

/// Combinatorial ball of radius `depth` in the triangulation of the plane
/// where every vertex has degree `deg`. Interior vertices of the output have
/// degree exactly `deg`; the boundary is a single cycle. deg >= 7 gives the
/// transient (hyperbolic) regime.
inline Triangulation generate_hyperbolic(int deg, int depth, std::size_t size_cap = 200000) {
    if (deg < 7) throw GraphError("generate_hyperbolic needs deg >= 7");
    if (depth < 1) throw GraphError("generate_hyperbolic needs depth >= 1");
    Triangulation t;
    t.n = 1 + deg;
    if (static_cast<std::size_t>(t.n) > size_cap) throw SizeCapExceededError(t.n, size_cap);
    std::vector<int> degree_of(t.n, 0);
    degree_of[0] = deg;
    std::vector<VertexId> cycle(deg);
    t.layer.assign(t.n, 1);
    t.layer[0] = 0;
    for (int i = 0; i < deg; ++i) {
        cycle[i] = 1 + i;
        degree_of[1 + i] = 3;  // hub + two rim neighbors
        t.faces.push_back({0, 1 + i, 1 + (i + 1) % deg});
    }
    for (int level = 2; level <= depth; ++level) {
        const int m = static_cast<int>(cycle.size());
        std::vector<int> fan(m);
        std::size_t appended = 0;
        for (int i = 0; i < m; ++i) {
            fan[i] = deg - degree_of[cycle[i]];
            if (fan[i] < 2)
                throw GraphError("degree bookkeeping broke: fan < 2");
            appended += static_cast<std::size_t>(fan[i]) - 1;
        }
        if (static_cast<std::size_t>(t.n) + appended > size_cap)
            throw SizeCapExceededError(t.n + appended, size_cap);
        const VertexId base = t.n;
        t.n += static_cast<int>(appended);
        degree_of.resize(t.n, 0);
        t.layer.resize(t.n, level);
        std::vector<VertexId> next_cycle(appended);
        for (std::size_t j = 0; j < appended; ++j) next_cycle[j] = base + static_cast<int>(j);
        std::size_t pos = 0;  // index of first appended vertex of fan i
        for (int i = 0; i < m; ++i) {
            const VertexId b = cycle[i];
            const int f = fan[i];
            std::vector<VertexId> fan_list(f);
            fan_list[0] = next_cycle[(pos + appended - 1) % appended];  // shared with fan i-1
            for (int tdx = 1; tdx < f; ++tdx)
                fan_list[tdx] = next_cycle[pos + tdx - 1];
            for (int tdx = 0; tdx + 1 < f; ++tdx)
                t.faces.push_back({b, fan_list[tdx], fan_list[tdx + 1]});
            // edges: b to each fan vertex, plus the new-cycle edges inside the fan
            degree_of[b] += f;
            for (int tdx = 0; tdx < f; ++tdx) degree_of[fan_list[tdx]] += 1;
            for (int tdx = 0; tdx + 1 < f; ++tdx) {
                degree_of[fan_list[tdx]] += 1;
                degree_of[fan_list[tdx + 1]] += 1;
            }
            // bridge face over the old-cycle edge (b_i, b_{i+1})
            const VertexId bn = cycle[(i + 1) % m];
            t.faces.push_back({b, fan_list[f - 1], bn});
            pos += static_cast<std::size_t>(f) - 1;
        }
        cycle = std::move(next_cycle);
    }
    t.boundary = cycle;
    detail::mark_interior(t);
    detail::rotation_from_faces(t);
    return t;
}

// ---------------------------------------------------------------------------
// Embedded test corpora

inline EmbeddedGraph make_tri3() {
    std::vector<Vec2> pos{{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2.0}};
    return EmbeddedGraph::build(pos, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}});
}

/// w x h vertices, unit spacing, axis-aligned edges.
inline EmbeddedGraph make_square_grid(int w, int h, double weight = 1.0) {
    std::vector<Vec2> pos;
    for (int j = 0; j < h; ++j)
        for (int i = 0; i < w; ++i) pos.push_back({double(i), double(j)});
    std::vector<EmbeddedGraph::EdgeInput> edges;
    auto id = [&](int i, int j) { return j * w + i; };
    for (int j = 0; j < h; ++j)
        for (int i = 0; i < w; ++i) {
            if (i + 1 < w) edges.push_back({id(i, j), id(i + 1, j), weight});
            if (j + 1 < h) edges.push_back({id(i, j), id(i, j + 1), weight});
        }
    return EmbeddedGraph::build(std::move(pos), edges);
}

/// Patch of the unit triangular lattice within Euclidean radius R of origin.
inline EmbeddedGraph make_tri_lattice_disc(double R, double weight = 1.0) {
    std::map<std::pair<int, int>, VertexId> idx;
    std::vector<Vec2> pos;
    int bound = static_cast<int>(R) + 2;
    for (int j = -bound; j <= bound; ++j)
        for (int i = -bound; i <= bound; ++i) {
            Vec2 p{i + 0.5 * j, j * std::sqrt(3.0) / 2.0};
            if (norm(p) <= R) {
                idx[{i, j}] = static_cast<VertexId>(pos.size());
                pos.push_back(p);
            }
        }
    std::vector<EmbeddedGraph::EdgeInput> edges;
    const int dirs[3][2] = {{1, 0}, {0, 1}, {-1, 1}};
    for (const auto& [ij, v] : idx)
        for (const auto& d : dirs) {
            auto it = idx.find({ij.first + d[0], ij.second + d[1]});
            if (it != idx.end()) edges.push_back({v, it->second, weight});
        }
    return EmbeddedGraph::build(std::move(pos), edges);
}

// ---------------------------------------------------------------------------
// Delaunay triangulation of quasi-uniform points in the unit disc

namespace detail {

struct DelTri {
    VertexId a, b, c;
    Vec2 cc;
    double r2;
    bool dead = false;
};

inline std::vector<std::array<VertexId, 3>> bowyer_watson(const std::vector<Vec2>& pts) {
    // super-triangle well outside the unit disc
    std::vector<Vec2> p = pts;
    const VertexId s0 = static_cast<VertexId>(p.size());
    p.push_back({0.0, 64.0});
    p.push_back({-64.0, -48.0});
    p.push_back({64.0, -48.0});
    std::vector<DelTri> tris;
    auto add_tri = [&](VertexId a, VertexId b, VertexId c) {
        if (orient2d(p[a], p[b], p[c]) < 0.0) std::swap(b, c);
        auto cc = circumcircle(p[a], p[b], p[c]);
        if (!cc) throw DegenerateConfigurationError("collinear triple in Delaunay insertion");
        tris.push_back({a, b, c, cc->center, cc->radius2, false});
    };
    add_tri(s0, s0 + 1, s0 + 2);
    for (VertexId v = 0; v < static_cast<VertexId>(pts.size()); ++v) {
        std::map<std::pair<VertexId, VertexId>, int> edge_count;
        std::vector<std::pair<VertexId, VertexId>> cavity;
        for (auto& t : tris) {
            if (t.dead) continue;
            if (norm2(p[v] - t.cc) <= t.r2) {
                t.dead = true;
                const VertexId vs[3] = {t.a, t.b, t.c};
                for (int i = 0; i < 3; ++i) {
                    VertexId a = vs[i], b = vs[(i + 1) % 3];
                    auto k = std::minmax(a, b);
                    edge_count[{k.first, k.second}]++;
                    cavity.push_back({a, b});
                }
            }
        }
        for (auto& [a, b] : cavity) {
            auto k = std::minmax(a, b);
            if (edge_count[{k.first, k.second}] == 1) add_tri(a, b, v);
        }
        if ((v & 63) == 63)
            std::erase_if(tris, [](const DelTri& t) { return t.dead; });
    }
    std::vector<std::array<VertexId, 3>> out;
    for (const auto& t : tris) {
        if (t.dead || t.a >= s0 || t.b >= s0 || t.c >= s0) continue;
        out.push_back({t.a, t.b, t.c});
    }
    return out;
}

}  // namespace detail

/// Delaunay triangulation of n points sampled quasi-uniformly in the unit
/// disc with a minimum-separation rejection rule. Deterministic in seed.
inline EmbeddedGraph generate_delaunay(int n, std::uint64_t seed, double weight = 1.0) {
    if (n < 3) throw GraphError("generate_delaunay needs n >= 3");
    RngStream rng(seed, 0);
    std::vector<Vec2> pts;
    double min_sep = 0.8 / std::sqrt(static_cast<double>(n));
    int failures = 0;
    while (static_cast<int>(pts.size()) < n) {
        double r = std::sqrt(rng.next_double());
        double th = kTwoPi * rng.next_double();
        Vec2 cand{r * std::cos(th), r * std::sin(th)};
        bool ok = true;
        for (const Vec2& q : pts)
            if (distance(cand, q) < min_sep) { ok = false; break; }
        if (ok) {
            pts.push_back(cand);
            failures = 0;
        } else if (++failures > 200) {
            min_sep *= 0.9;  // guarantee termination for dense requests
            failures = 0;
        }
    }
    auto faces = detail::bowyer_watson(pts);
    std::set<std::pair<VertexId, VertexId>> es;
    for (const auto& f : faces)
        for (int i = 0; i < 3; ++i) {
            VertexId a = f[i], b = f[(i + 1) % 3];
            es.insert({std::min(a, b), std::max(a, b)});
        }
    std::vector<EmbeddedGraph::EdgeInput> edges;
    for (auto& [a, b] : es) edges.push_back({a, b, weight});
    return EmbeddedGraph::build(std::move(pts), edges);
}

}  // namespace carrier
