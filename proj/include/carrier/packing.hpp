#pragma once

#include <cmath>
#include <complex>
#include <deque>
#include <map>
#include <stdexcept>
#include <vector>

#include "carrier/generators.hpp"
#include "carrier/graph.hpp"

namespace carrier {

struct NotATriangulationError : GraphError {
    using GraphError::GraphError;
};
struct NoInteriorVertexError : GraphError {
    NoInteriorVertexError() : GraphError("triangulation has no interior vertex") {}
};

/// Maximal circle packing of a disc triangulation in the closed unit disc.
/// Boundary circles are horocycle limits, internally tangent to the unit
/// circle; interior radii come from the hyperbolic angle-sum iteration.
struct PackingResult {
    std::vector<double> radius;   // Euclidean radius
    std::vector<Vec2> center;     // Euclidean center
    std::vector<char> is_boundary;
    int iterations = 0;
    bool converged = false;
    double angle_residual = 0.0;      // max |angle sum - 2pi| over interior (hyperbolic)
    double tangency_residual = 0.0;   // max relative | |c_u-c_v| - (r_u+r_v) |
    double boundary_residual = 0.0;   // max | |c_v| + r_v - 1 | over boundary
    double layout_consistency = 0.0;  // max disagreement between placements
    VertexId root = 0, axis = 0;
};

struct PackOptions {
    double tol = 1e-9;
    int max_sweeps = 100000;
    VertexId root = -1;  // default: vertex 0 if interior, else first interior
    VertexId axis = -1;  // default: first rotation neighbor of root
};

namespace packing {

/// Angle at v in a Euclidean triangle of mutually tangent circles with radii
/// (rv; ru, rw): half-angle formula from the law of cosines.
inline double euclidean_angle(double rv, double ru, double rw) {
    double q = std::sqrt((ru * rw) / ((rv + ru) * (rv + rw)));
    return 2.0 * std::asin(std::min(1.0, q));
}

/// Hyperbolic counterpart in s-coordinates, s = exp(-hyperbolic radius).
/// Boundary horocycles have s = 0.
inline double hyperbolic_angle(double sv, double su, double sw) {
    double bu = 1.0 - sv * sv * su * su;
    double bw = 1.0 - sv * sv * sw * sw;
    double q = sv * std::sqrt((1.0 - su * su) * (1.0 - sw * sw) / (bu * bw));
    return 2.0 * std::asin(std::min(1.0, q));
}

/// d(angle)/d(sv) for the hyperbolic angle above.
inline double hyperbolic_angle_dsv(double sv, double su, double sw) {
    double bu = 1.0 - sv * sv * su * su;
    double bw = 1.0 - sv * sv * sw * sw;
    double q = sv * std::sqrt((1.0 - su * su) * (1.0 - sw * sw) / (bu * bw));
    if (q >= 1.0) return 0.0;
    double dq = q * (1.0 / sv + sv * su * su / bu + sv * sw * sw / bw);
    return 2.0 * dq / std::sqrt(1.0 - q * q);
}

inline void validate_triangulation(const Triangulation& t) {
    if (t.n < 4) throw NotATriangulationError("need at least 4 vertices");
    if (t.boundary.size() < 3) throw NotATriangulationError("boundary cycle too short");
    if (t.interior_count() < 1) throw NoInteriorVertexError();
    // every edge on <= 2 faces; boundary edges on exactly 1
    std::map<std::pair<VertexId, VertexId>, int> count;
    for (const auto& f : t.faces) {
        if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2])
            throw NotATriangulationError("degenerate face");
        for (int i = 0; i < 3; ++i) {
            VertexId a = f[i], b = f[(i + 1) % 3];
            count[{std::min(a, b), std::max(a, b)}]++;
        }
    }
    for (auto& [e, c] : count)
        if (c > 2) throw NotATriangulationError("edge on more than two faces");
    for (std::size_t i = 0; i < t.boundary.size(); ++i) {
        VertexId a = t.boundary[i], b = t.boundary[(i + 1) % t.boundary.size()];
        auto it = count.find({std::min(a, b), std::max(a, b)});
        if (it == count.end() || it->second != 1)
            throw NotATriangulationError("boundary edge not on exactly one face");
    }
}

/// Wedge neighbor pairs (u,w) around an interior vertex, from rotation order.
inline std::vector<std::pair<VertexId, VertexId>> interior_wedges(const Triangulation& t,
                                                                  VertexId v) {
    const auto& ring = t.rot[v];
    std::vector<std::pair<VertexId, VertexId>> out;
    out.reserve(ring.size());
    for (std::size_t i = 0; i < ring.size(); ++i)
        out.push_back({ring[i], ring[(i + 1) % ring.size()]});
    return out;
}

inline double angle_sum_hyperbolic(const Triangulation& t, const std::vector<double>& s,
                                   VertexId v) {
    double sum = 0.0;
    for (auto [u, w] : interior_wedges(t, v)) sum += hyperbolic_angle(s[v], s[u], s[w]);
    return sum;
}

inline double angle_sum_euclidean(const Triangulation& t, const std::vector<double>& radii,
                                  VertexId v) {
    double sum = 0.0;
    for (auto [u, w] : interior_wedges(t, v)) sum += euclidean_angle(radii[v], radii[u], radii[w]);
    return sum;
}

}  // namespace packing

namespace detail {

// One Newton solve of angle_sum(v) = 2*pi in s[v], bracketed in (0,1).
inline double solve_vertex_s(const Triangulation& t, const std::vector<double>& s, VertexId v) {
    const auto wedges = packing::interior_wedges(t, v);
    auto theta = [&](double sv) {
        double sum = 0.0;
        for (auto [u, w] : wedges) sum += packing::hyperbolic_angle(sv, s[u], s[w]);
        return sum;
    };
    auto dtheta = [&](double sv) {
        double sum = 0.0;
        for (auto [u, w] : wedges) sum += packing::hyperbolic_angle_dsv(sv, s[u], s[w]);
        return sum;
    };
    double lo = 1e-14, hi = 1.0 - 1e-14;
    double x = s[v];
    for (int it = 0; it < 60; ++it) {
        double f = theta(x) - kTwoPi;
        if (std::abs(f) < 1e-15) return x;
        if (f > 0.0)
            hi = std::min(hi, x);
        else
            lo = std::max(lo, x);
        double d = dtheta(x);
        double step = (d > 0.0) ? f / d : 0.0;
        double nx = x - step;
        if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
        if (std::abs(nx - x) < 1e-16 * x) return nx;
        x = nx;
    }
    return x;
}

inline std::complex<double> mobius_from_zero(std::complex<double> p, std::complex<double> z) {
    return (z + p) / (1.0 + std::conj(p) * z);
}
inline std::complex<double> mobius_to_zero(std::complex<double> p, std::complex<double> z) {
    return (z - p) / (1.0 - std::conj(p) * z);
}

}  // namespace detail

/// Computes the maximal packing: hyperbolic radii by damped Newton sweeps on
/// the angle sums (boundary held at the horocycle limit s=0), then a
/// breadth-first layout of hyperbolic centers and conversion to Euclidean
/// circles. Gauge: root at the origin, its first neighbor on the positive
/// real axis. Never throws on slow convergence; residuals tell the story.
inline PackingResult pack_maximal(const Triangulation& t, double tol = 1e-9,
                                  const PackOptions& opts_in = {}) {
    using cplx = std::complex<double>;
    PackOptions opts = opts_in;
    opts.tol = tol;
    packing::validate_triangulation(t);

    PackingResult res;
    res.is_boundary.assign(t.n, 0);
    for (VertexId v = 0; v < t.n; ++v) res.is_boundary[v] = !t.interior[v];

    std::vector<VertexId> interior;
    for (VertexId v = 0; v < t.n; ++v)
        if (t.interior[v]) interior.push_back(v);

    // --- radii iteration (s = exp(-hyperbolic radius), boundary s = 0)
    std::vector<double> s(t.n, 0.0);
    for (VertexId v : interior) s[v] = 0.5;
    auto residual = [&] {
        double r = 0.0;
        for (VertexId v : interior)
            r = std::max(r, std::abs(packing::angle_sum_hyperbolic(t, s, v) - kTwoPi));
        return r;
    };
    double prev_res = residual();
    std::vector<double> s_prev = s;
    int sweep = 0;
    for (; sweep < opts.max_sweeps; ++sweep) {
        s_prev = s;
        for (VertexId v : interior) s[v] = detail::solve_vertex_s(t, s, v);
        double res_now = residual();
        if (res_now <= tol) {
            res.converged = true;
            ++sweep;
            break;
        }
        // superstep extrapolation when contraction is steady
        if (sweep > 0 && res_now < prev_res && prev_res > 0.0) {
            double rate = res_now / prev_res;
            if (rate > 0.1 && rate < 1.0) {
                double lam = std::min(rate / (1.0 - rate), 20.0);
                std::vector<double> s_acc(t.n, 0.0);
                bool ok = true;
                for (VertexId v = 0; v < t.n; ++v) {
                    s_acc[v] = s[v] + lam * (s[v] - s_prev[v]);
                    if (t.interior[v] && !(s_acc[v] > 1e-14 && s_acc[v] < 1.0 - 1e-14)) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    std::swap(s, s_acc);
                    double res_acc = residual();
                    if (res_acc < res_now)
                        res_now = res_acc;
                    else
                        std::swap(s, s_acc);  // revert
                }
            }
        }
        prev_res = res_now;
    }
    res.iterations = sweep;
    res.angle_residual = residual();

    // --- gauge
    VertexId root = opts.root;
    if (root < 0 || !t.interior[root]) {
        root = -1;
        if (opts.root >= 0 && !t.interior[opts.root])
            throw GraphError("pack root must be an interior vertex");
        root = t.interior[0] ? 0 : interior.front();
    }
    VertexId axis = opts.axis >= 0 ? opts.axis : t.rot[root].front();
    res.root = root;
    res.axis = axis;

    // --- hyperbolic center layout
    std::vector<cplx> zeta(t.n);
    std::vector<char> placed(t.n, 0);
    auto gap_param = [&](VertexId a, VertexId b) {  // tanh(d(a,b)/2) for tangent circles
        double p = s[a] * s[b];
        return (1.0 - p) / (1.0 + p);
    };
    zeta[root] = 0.0;
    zeta[axis] = gap_param(root, axis);
    placed[root] = placed[axis] = 1;

    std::vector<std::vector<int>> vertex_faces(t.n);
    for (std::size_t fi = 0; fi < t.faces.size(); ++fi)
        for (VertexId v : t.faces[fi]) vertex_faces[v].push_back(static_cast<int>(fi));
    std::vector<int> face_placed(t.faces.size(), 0);
    std::deque<int> queue;
    for (std::size_t fi = 0; fi < t.faces.size(); ++fi) {
        for (VertexId v : t.faces[fi]) face_placed[fi] += placed[v];
        if (face_placed[fi] == 2) queue.push_back(static_cast<int>(fi));
    }

    auto place_from = [&](int fi, VertexId w) -> std::optional<cplx> {
        // face ccw (u, x, y): wedge at u runs ccw from x to y
        const auto& f = t.faces[fi];
        VertexId u = -1, x = -1, y = -1;
        for (int i = 0; i < 3; ++i) {
            VertexId cand = f[i];
            if (cand == w || !placed[cand] || !t.interior[cand]) continue;
            VertexId b = f[(i + 1) % 3], c = f[(i + 2) % 3];
            VertexId other = (b == w) ? c : b;
            if (!placed[other]) continue;
            u = cand;
            x = b;
            y = c;
            break;
        }
        if (u < 0) return std::nullopt;
        VertexId v = (x == w) ? y : x;
        double alpha = packing::hyperbolic_angle(s[u], s[x], s[y]);
        double sign = (y == w) ? 1.0 : -1.0;
        cplx m = detail::mobius_to_zero(zeta[u], zeta[v]);
        double dir = std::arg(m) + sign * alpha;
        cplx q = std::polar(gap_param(u, w), dir);
        return detail::mobius_from_zero(zeta[u], q);
    };

    int placed_count = 2;
    std::size_t stalled = 0;
    while (placed_count < t.n && stalled <= queue.size()) {
        if (queue.empty()) break;
        int fi = queue.front();
        queue.pop_front();
        if (face_placed[fi] != 2) continue;
        VertexId w = -1;
        for (VertexId v : t.faces[fi])
            if (!placed[v]) w = v;
        auto pos = place_from(fi, w);
        if (!pos) {
            queue.push_back(fi);
            ++stalled;
            continue;
        }
        stalled = 0;
        zeta[w] = *pos;
        placed[w] = 1;
        ++placed_count;
        for (int fj : vertex_faces[w]) {
            ++face_placed[fj];
            if (face_placed[fj] == 2) queue.push_back(fj);
            if (face_placed[fj] == 3 && fj != fi) {
                // redundant placement: audit global consistency of the development
                auto again = place_from(fj, w);
                if (again)
                    res.layout_consistency =
                        std::max(res.layout_consistency, std::abs(*again - zeta[w]));
            }
        }
    }
    if (placed_count < t.n)
        throw GraphError("layout could not reach every vertex (unsupported triangulation)");

    // --- hyperbolic -> Euclidean circles
    res.radius.assign(t.n, 0.0);
    res.center.assign(t.n, Vec2{});
    for (VertexId v : interior) {
        double tv = (1.0 - s[v]) / (1.0 + s[v]);  // tanh(r/2)
        double z2 = std::norm(zeta[v]);
        double denom = 1.0 - tv * tv * z2;
        res.radius[v] = tv * (1.0 - z2) / denom;
        cplx c = zeta[v] * ((1.0 - tv * tv) / denom);
        res.center[v] = {c.real(), c.imag()};
    }
    for (VertexId v = 0; v < t.n; ++v) {
        if (t.interior[v]) continue;
        cplx xi = zeta[v] / std::abs(zeta[v]);
        VertexId anchor = -1;
        for (VertexId u : t.rot[v])
            if (t.interior[u]) { anchor = u; break; }
        if (anchor < 0)
            throw GraphError("boundary vertex without interior neighbor is unsupported");
        Vec2 cu = res.center[anchor];
        double ru = res.radius[anchor];
        double k = cu.x * xi.real() + cu.y * xi.imag();
        double rho = (1.0 - 2.0 * k + norm2(cu) - ru * ru) / (2.0 * (1.0 + ru - k));
        res.radius[v] = rho;
        res.center[v] = {(1.0 - rho) * xi.real(), (1.0 - rho) * xi.imag()};
    }

    // --- residual audit
    for (const auto& [a, b] : t.edge_list()) {
        double gap = distance(res.center[a], res.center[b]);
        double want = res.radius[a] + res.radius[b];
        res.tangency_residual =
            std::max(res.tangency_residual, std::abs(gap - want) / want);
    }
    for (VertexId v = 0; v < t.n; ++v)
        if (!t.interior[v])
            res.boundary_residual = std::max(
                res.boundary_residual, std::abs(norm(res.center[v]) + res.radius[v] - 1.0));
    return res;
}

/// Straight-line embedding with circle centers as positions.
inline EmbeddedGraph to_embedded_graph(const PackingResult& p, const Triangulation& t,
                                       double weight = 1.0) {
    std::vector<Vec2> pos(p.center.begin(), p.center.end());
    std::vector<EmbeddedGraph::EdgeInput> edges;
    for (const auto& [a, b] : t.edge_list()) edges.push_back({a, b, weight});
    return EmbeddedGraph::build(std::move(pos), edges);
}

struct RingReport {
    double max_ratio_interior = 1.0;  // over edges with both ends interior
    double max_ratio_all = 1.0;       // over all edges
    std::map<int, double> per_degree; // keyed by max endpoint degree
};

/// Ring-lemma audit: adjacent radius ratios.
inline RingReport ring_constant(const PackingResult& p, const Triangulation& t) {
    RingReport r;
    for (const auto& [a, b] : t.edge_list()) {
        double ratio = std::max(p.radius[a] / p.radius[b], p.radius[b] / p.radius[a]);
        r.max_ratio_all = std::max(r.max_ratio_all, ratio);
        if (t.interior[a] && t.interior[b]) {
            r.max_ratio_interior = std::max(r.max_ratio_interior, ratio);
            int deg = static_cast<int>(std::max(t.rot[a].size(), t.rot[b].size()));
            auto [it, inserted] = r.per_degree.try_emplace(deg, ratio);
            if (!inserted) it->second = std::max(it->second, ratio);
        }
    }
    return r;
}

}  // namespace carrier
