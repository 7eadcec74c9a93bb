#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "carrier/graph.hpp"

namespace carrier {

/// Absolute tolerance for angle comparisons (radians).
inline constexpr double kAngleTol = 1e-9;

struct GoodnessViolation {
    std::string kind;  // "angle" | "length-ratio" | "weight"
    VertexId vertex = -1;
    std::size_t face = 0;
    EdgeId e1 = -1, e2 = -1;
    double value = 0.0;
    double bound = 0.0;
};

struct GoodnessReport {
    double D_required = 1.0;   // max(D_length, D_weight); validate passes iff D >= this
    double D_length = 1.0;     // max adjacent-edge length ratio
    double D_weight = 1.0;     // max(w_e, 1/w_e) over edges
    double eta_allowed = 0.0;  // pi - max bounded-face inner angle
    double min_adjacent_angle = 0.0;
    double sausage_constant = std::numeric_limits<double>::infinity();
    double face_diameter_constant = 0.0;
    double edge_sq_over_area = 0.0;
    std::vector<GoodnessViolation> violations;

    bool passed() const { return violations.empty(); }
};

namespace goodness {

/// Interior angle of a ccw face at position i (signed; reflex corners of a
/// non-convex face come out > pi).
inline double face_interior_angle(const EmbeddedGraph& g, const Face& f, std::size_t i) {
    const std::size_t n = f.boundary.size();
    const Vec2& prev = g.position(f.boundary[(i + n - 1) % n]);
    const Vec2& cur = g.position(f.boundary[i]);
    const Vec2& next = g.position(f.boundary[(i + 1) % n]);
    Vec2 d1 = cur - prev, d2 = next - cur;
    double turn = std::atan2(cross(d1, d2), dot(d1, d2));
    return kPi - turn;
}

inline double max_bounded_face_angle(const EmbeddedGraph& g) {
    double worst = 0.0;
    for (const Face& f : g.faces()) {
        if (!f.bounded) continue;
        for (std::size_t i = 0; i < f.boundary.size(); ++i)
            worst = std::max(worst, face_interior_angle(g, f, i));
    }
    return worst;
}

/// Minimum angle between consecutive edges in rotation order, over all
/// vertices of degree >= 2.
inline double min_adjacent_angle(const EmbeddedGraph& g) {
    double best = kTwoPi;
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        auto ns = g.neighbors(v);
        if (ns.size() < 2) continue;
        std::vector<double> angs;
        angs.reserve(ns.size());
        for (VertexId u : ns) angs.push_back(arg(g.position(u) - g.position(v)));
        for (std::size_t i = 0; i < angs.size(); ++i) {
            double a = angs[i];
            double b = angs[(i + 1) % angs.size()];
            double wedge = b - a;
            if (i + 1 == angs.size()) wedge += kTwoPi;
            best = std::min(best, wedge);
        }
    }
    return best;
}

inline std::pair<double, double> adjacent_length_spread(const EmbeddedGraph& g, VertexId v) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (EdgeId e : g.incident_edges(v)) {
        lo = std::min(lo, g.edge(e).length);
        hi = std::max(hi, g.edge(e).length);
    }
    return {lo, hi};
}

/// (D_required-by-lengths, eta_allowed). D also has to cover the edge-weight
/// spread for validate() to be monotone in D; see tightest_report.
inline std::pair<double, double> tightest_parameters(const EmbeddedGraph& g) {
    double dlen = 1.0;
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        if (g.degree(v) < 2) continue;
        auto [lo, hi] = adjacent_length_spread(g, v);
        dlen = std::max(dlen, hi / lo);
    }
    double dw = 1.0;
    for (const EdgeRec& e : g.edges()) dw = std::max({dw, e.weight, 1.0 / e.weight});
    return {std::max(dlen, dw), kPi - max_bounded_face_angle(g)};
}

/// Minimum over non-adjacent edge pairs of d(e,f)/min(|e|,|f|); +inf when
/// every pair shares a vertex. Quadratic with a bounding-box prescreen.
inline double sausage_constant(const EmbeddedGraph& g) {
    const auto& es = g.edges();
    const int m = static_cast<int>(es.size());
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::array<double, 4>> box(m);
    for (int i = 0; i < m; ++i) {
        const Vec2& a = g.position(es[i].u);
        const Vec2& b = g.position(es[i].v);
        box[i] = {std::min(a.x, b.x), std::max(a.x, b.x),
                  std::min(a.y, b.y), std::max(a.y, b.y)};
    }
    auto box_dist = [&](int i, int j) {
        double dx = std::max({box[j][0] - box[i][1], box[i][0] - box[j][1], 0.0});
        double dy = std::max({box[j][2] - box[i][3], box[i][2] - box[j][3], 0.0});
        return std::hypot(dx, dy);
    };
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            if (es[i].u == es[j].u || es[i].u == es[j].v || es[i].v == es[j].u ||
                es[i].v == es[j].v)
                continue;
            double denom = std::min(es[i].length, es[j].length);
            if (box_dist(i, j) / denom >= best) continue;
            double d = segment_segment_distance(g.position(es[i].u), g.position(es[i].v),
                                                g.position(es[j].u), g.position(es[j].v));
            best = std::min(best, d / denom);
        }
    return best;
}

/// Plain all-pairs evaluation, kept as the oracle for the prescreened scan.
inline double sausage_constant_brute(const EmbeddedGraph& g) {
    const auto& es = g.edges();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < es.size(); ++i)
        for (std::size_t j = i + 1; j < es.size(); ++j) {
            if (es[i].u == es[j].u || es[i].u == es[j].v || es[i].v == es[j].u ||
                es[i].v == es[j].v)
                continue;
            double d = segment_segment_distance(g.position(es[i].u), g.position(es[i].v),
                                                g.position(es[j].u), g.position(es[j].v));
            best = std::min(best, d / std::min(es[i].length, es[j].length));
        }
    return best;
}

struct FaceDiameterConstants {
    double diameter_ratio = 0.0;    // max diam(f)/|e| over bounded f, e on f
    double edge_sq_over_area = 0.0; // max |e|^2/Leb(f)
};

inline FaceDiameterConstants face_diameter_constant(const EmbeddedGraph& g) {
    FaceDiameterConstants out;
    for (const Face& f : g.faces()) {
        if (!f.bounded) continue;
        const std::size_t n = f.boundary.size();
        for (std::size_t i = 0; i < n; ++i) {
            VertexId a = f.boundary[i], b = f.boundary[(i + 1) % n];
            double len = distance(g.position(a), g.position(b));
            out.diameter_ratio = std::max(out.diameter_ratio, f.diameter / len);
            out.edge_sq_over_area = std::max(out.edge_sq_over_area, len * len / f.area);
        }
    }
    return out;
}

inline GoodnessReport tightest_report(const EmbeddedGraph& g) {
    GoodnessReport r;
    double dlen = 1.0;
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        if (g.degree(v) < 2) continue;
        auto [lo, hi] = adjacent_length_spread(g, v);
        dlen = std::max(dlen, hi / lo);
    }
    r.D_length = dlen;
    for (const EdgeRec& e : g.edges())
        r.D_weight = std::max({r.D_weight, e.weight, 1.0 / e.weight});
    r.D_required = std::max(r.D_length, r.D_weight);
    r.eta_allowed = kPi - max_bounded_face_angle(g);
    r.min_adjacent_angle = min_adjacent_angle(g);
    r.sausage_constant = sausage_constant(g);
    auto fd = face_diameter_constant(g);
    r.face_diameter_constant = fd.diameter_ratio;
    r.edge_sq_over_area = fd.edge_sq_over_area;
    return r;
}

/// Checks conditions (a) and (b) at the given parameters plus the weight
/// range [1/D, D]. Violations are data, not errors.
inline GoodnessReport validate(const EmbeddedGraph& g, double D, double eta) {
    if (!(D > 1.0)) throw GraphError("validate needs D > 1");
    if (!(eta > 0.0 && eta < kPi)) throw GraphError("validate needs eta in (0, pi)");
    GoodnessReport r = tightest_report(g);
    const auto& faces = g.faces();
    for (std::size_t fi = 0; fi < faces.size(); ++fi) {
        const Face& f = faces[fi];
        if (!f.bounded) continue;
        for (std::size_t i = 0; i < f.boundary.size(); ++i) {
            double a = face_interior_angle(g, f, i);
            if (a > kPi - eta + kAngleTol)
                r.violations.push_back(
                    {"angle", f.boundary[i], fi, -1, -1, a, kPi - eta});
        }
    }
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        if (g.degree(v) < 2) continue;
        auto edges = g.incident_edges(v);
        EdgeId lo_e = edges[0], hi_e = edges[0];
        for (EdgeId e : edges) {
            if (g.edge(e).length < g.edge(lo_e).length) lo_e = e;
            if (g.edge(e).length > g.edge(hi_e).length) hi_e = e;
        }
        double ratio = g.edge(hi_e).length / g.edge(lo_e).length;
        if (ratio > D * (1.0 + 1e-12))
            r.violations.push_back({"length-ratio", v, 0, hi_e, lo_e, ratio, D});
    }
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        double w = g.edge(e).weight;
        if (w < 1.0 / D * (1.0 - 1e-12) || w > D * (1.0 + 1e-12))
            r.violations.push_back({"weight", -1, 0, e, -1, w, D});
    }
    return r;
}

}  // namespace goodness
}  // namespace carrier
