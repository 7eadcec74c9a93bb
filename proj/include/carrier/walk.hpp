#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "carrier/cable.hpp"
#include "carrier/graph.hpp"
#include "carrier/parallel.hpp"
#include "carrier/rng.hpp"

namespace carrier {

struct IsolatedVertexError : GraphError {
    IsolatedVertexError() : GraphError("vertex has no neighbors") {}
};
struct AllWalksTruncatedError : GraphError {
    AllWalksTruncatedError() : GraphError("every walk hit the step cap") {}
};

struct WalkConfig {
    std::uint64_t seed = 1;
    long long max_steps = 10000000;
    long long samples = 10000;
    bool unit_weights = false;  // override graph weights with 1
    unsigned threads = 0;       // 0: default_thread_count()
};

struct Estimate {
    double value = 0.0;
    double ci_half_width = 0.0;  // 95%, normal approximation
    long long n = 0;
    long long truncated = 0;
};

struct ExitStats {
    long long n = 0;          // completed walks
    long long truncated = 0;  // excluded from every estimate, never dropped silently
    Estimate arc_probability; // for the interval passed to run_to_exit, if any
    Estimate time_functional; // E sum of r^2_{X_t}, t = 0..T_r inclusive
    std::vector<long long> exit_arg_histogram;
    double histogram_bin_width = 0.0;
};

/// Weighted random walk sampler. Neighbor selection is a binary search in
/// the per-vertex cumulative weights; every sample gets its own counter-based
/// stream so results do not depend on the worker count.
class WalkEngine {
public:
    explicit WalkEngine(const EmbeddedGraph& g, bool unit_weights = false) : g_(g) {
        cum_.resize(g.vertex_count());
        for (VertexId v = 0; v < g.vertex_count(); ++v) {
            double acc = 0.0;
            auto es = g.incident_edges(v);
            cum_[v].reserve(es.size());
            for (EdgeId e : es) {
                acc += unit_weights ? 1.0 : g.edge(e).weight;
                cum_[v].push_back(acc);
            }
        }
    }

    const EmbeddedGraph& graph() const { return g_; }

    VertexId step(VertexId v, RngStream& rng) const {
        const auto& c = cum_[v];
        if (c.empty()) throw IsolatedVertexError();
        double x = rng.next_double() * c.back();
        std::size_t i = std::lower_bound(c.begin(), c.end(), x) - c.begin();
        if (i >= c.size()) i = c.size() - 1;
        return g_.neighbors(v)[i];
    }

private:
    const EmbeddedGraph& g_;
    std::vector<std::vector<double>> cum_;
};

namespace walk {

inline double proportion_ci(double p, long long n) {
    return n > 0 ? 1.96 * std::sqrt(std::max(p * (1.0 - p), 0.0) / n) : 0.0;
}
inline double mean_ci(double sum, double sumsq, long long n) {
    if (n < 2) return 0.0;
    double mean = sum / n;
    double var = std::max(sumsq / n - mean * mean, 0.0);
    return 1.96 * std::sqrt(var / n);
}

/// Runs cfg.samples walks from u until the first vertex outside
/// B_euc(u, r); records exit arguments and the exit-time functional.
inline ExitStats run_to_exit(const EmbeddedGraph& g, VertexId u, double r,
                             const WalkConfig& cfg,
                             const std::optional<AngleInterval>& interval = std::nullopt,
                             int hist_bins = 72) {
    if (!g.disc_in_carrier(g.position(u), r)) throw BallEscapesCarrierError();
    bool somebody_out = false;
    for (VertexId v = 0; v < g.vertex_count() && !somebody_out; ++v)
        somebody_out = distance(g.position(v), g.position(u)) > r;
    if (!somebody_out) throw GraphError("V_euc(u,r) is the whole vertex set");

    WalkEngine eng(g, cfg.unit_weights);
    const std::vector<double>& iso = g.isolation_radii();
    std::vector<double> iso2(iso.size());
    for (std::size_t i = 0; i < iso.size(); ++i) iso2[i] = iso[i] * iso[i];
    const Vec2 up = g.position(u);

    struct Block {
        long long n = 0, truncated = 0, hits = 0;
        double fsum = 0.0, fsumsq = 0.0;
        std::vector<long long> hist;
    };
    const std::size_t block_size = 1024;
    const std::size_t nsamples = static_cast<std::size_t>(cfg.samples);
    std::vector<Block> blocks((nsamples + block_size - 1) / block_size);
    unsigned threads = cfg.threads ? cfg.threads : default_thread_count();

    parallel_blocks(nsamples, block_size, threads, [&](std::size_t bi, std::size_t lo, std::size_t hi) {
        Block& blk = blocks[bi];
        blk.hist.assign(hist_bins, 0);
        for (std::size_t s = lo; s < hi; ++s) {
            RngStream rng(cfg.seed, s);
            VertexId x = u;
            double functional = iso2[x];
            long long steps = 0;
            bool ok = true;
            while (true) {
                if (steps++ >= cfg.max_steps) {
                    ok = false;
                    break;
                }
                x = eng.step(x, rng);
                functional += iso2[x];
                if (distance(g.position(x), up) > r) break;
            }
            if (!ok) {
                ++blk.truncated;
                continue;
            }
            ++blk.n;
            blk.fsum += functional;
            blk.fsumsq += functional * functional;
            double a = normalize_angle(arg(g.position(x) - up));
            int bin = std::min(hist_bins - 1, static_cast<int>(a / kTwoPi * hist_bins));
            blk.hist[bin]++;
            if (interval && interval->contains(a)) ++blk.hits;
        }
    });

    ExitStats st;
    st.exit_arg_histogram.assign(hist_bins, 0);
    st.histogram_bin_width = kTwoPi / hist_bins;
    double fsum = 0.0, fsumsq = 0.0;
    long long hits = 0;
    for (const Block& b : blocks) {
        st.n += b.n;
        st.truncated += b.truncated;
        fsum += b.fsum;
        fsumsq += b.fsumsq;
        hits += b.hits;
        for (int i = 0; i < hist_bins; ++i) st.exit_arg_histogram[i] += b.hist[i];
    }
    if (st.n == 0) throw AllWalksTruncatedError();
    st.time_functional = {fsum / st.n, mean_ci(fsum, fsumsq, st.n), st.n, st.truncated};
    if (interval) {
        double p = double(hits) / double(st.n);
        st.arc_probability = {p, proportion_ci(p, st.n), st.n, st.truncated};
    }
    return st;
}

inline Estimate exit_arc_probability(const EmbeddedGraph& g, VertexId u, double r,
                                     const AngleInterval& I, const WalkConfig& cfg) {
    return run_to_exit(g, u, r, cfg, I).arc_probability;
}

inline Estimate exit_time_functional(const EmbeddedGraph& g, VertexId u, double r,
                                     const WalkConfig& cfg) {
    return run_to_exit(g, u, r, cfg).time_functional;
}

/// P_u(hit S before leaving B_euc(u,2r)) with
/// S = V  ∩ Cone(u,r,I) minus B_euc(u, clearance*r).
inline Estimate cone_hitting_probability(const EmbeddedGraph& g, VertexId u, double r,
                                         const AngleInterval& I, const WalkConfig& cfg,
                                         double clearance = 0.125) {
    if (!g.disc_in_carrier(g.position(u), 2.0 * r)) throw BallEscapesCarrierError();
    const Vec2 up = g.position(u);
    enum : char { kNeutral = 0, kTarget = 1, kOut = 2 };
    std::vector<char> status(g.vertex_count(), kNeutral);
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        double d = distance(g.position(v), up);
        if (d > 2.0 * r)
            status[v] = kOut;
        else if (v != u && d <= r && d > clearance * r && I.contains(arg(g.position(v) - up)))
            status[v] = kTarget;
    }
    WalkEngine eng(g, cfg.unit_weights);
    const std::size_t nsamples = static_cast<std::size_t>(cfg.samples);
    const std::size_t block_size = 1024;
    struct Block {
        long long n = 0, truncated = 0, hits = 0;
    };
    std::vector<Block> blocks((nsamples + block_size - 1) / block_size);
    unsigned threads = cfg.threads ? cfg.threads : default_thread_count();
    parallel_blocks(nsamples, block_size, threads, [&](std::size_t bi, std::size_t lo, std::size_t hi) {
        Block& blk = blocks[bi];
        for (std::size_t s = lo; s < hi; ++s) {
            RngStream rng(cfg.seed, s);
            VertexId x = u;
            long long steps = 0;
            int outcome = -1;
            while (outcome < 0) {
                if (steps++ >= cfg.max_steps) break;
                x = eng.step(x, rng);
                if (status[x] == kTarget) outcome = 1;
                else if (status[x] == kOut) outcome = 0;
            }
            if (outcome < 0)
                ++blk.truncated;
            else {
                ++blk.n;
                blk.hits += outcome;
            }
        }
    });
    long long n = 0, truncated = 0, hits = 0;
    for (const Block& b : blocks) {
        n += b.n;
        truncated += b.truncated;
        hits += b.hits;
    }
    if (n == 0) throw AllWalksTruncatedError();
    double p = double(hits) / double(n);
    return {p, proportion_ci(p, n), n, truncated};
}

struct BoundaryWalkResult {
    std::vector<double> angles;  // one per completed walk, in sample order
    long long truncated = 0;
};

/// Walks on a packed graph until within stop_radius (Euclidean) of the unit
/// circle; the recorded angles sample harmonic measure from u.
inline BoundaryWalkResult walk_to_boundary(const EmbeddedGraph& g, VertexId u,
                                           double stop_radius, const WalkConfig& cfg) {
    std::vector<char> stop(g.vertex_count(), 0);
    bool any = false;
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        stop[v] = 1.0 - norm(g.position(v)) <= stop_radius;
        any |= stop[v];
    }
    if (!any) throw AllWalksTruncatedError();
    WalkEngine eng(g, cfg.unit_weights);
    const std::size_t nsamples = static_cast<std::size_t>(cfg.samples);
    const std::size_t block_size = 1024;
    struct Block {
        std::vector<double> angles;
        long long truncated = 0;
    };
    std::vector<Block> blocks((nsamples + block_size - 1) / block_size);
    unsigned threads = cfg.threads ? cfg.threads : default_thread_count();
    parallel_blocks(nsamples, block_size, threads, [&](std::size_t bi, std::size_t lo, std::size_t hi) {
        Block& blk = blocks[bi];
        for (std::size_t s = lo; s < hi; ++s) {
            RngStream rng(cfg.seed, s);
            VertexId x = u;
            long long steps = 0;
            bool done = stop[x];
            while (!done) {
                if (steps++ >= cfg.max_steps) break;
                x = eng.step(x, rng);
                done = stop[x];
            }
            if (done)
                blk.angles.push_back(normalize_angle(arg(g.position(x))));
            else
                ++blk.truncated;
        }
    });
    BoundaryWalkResult out;
    for (Block& b : blocks) {
        out.truncated += b.truncated;
        out.angles.insert(out.angles.end(), b.angles.begin(), b.angles.end());
    }
    if (out.angles.empty()) throw AllWalksTruncatedError();
    return out;
}

struct AtomProbeResult {
    std::vector<double> radii;
    std::vector<Estimate> visit_probability;  // coupled samples: exactly nonincreasing
    double fitted_c = 0.0;                    // max over radii of p * |log r|
};

/// For each r, the probability that the walk visits V_euc(xi_point, r)
/// before the stopping annulus. One walk serves every radius, so the
/// estimates are monotone by construction.
inline AtomProbeResult atom_probe(const EmbeddedGraph& g, VertexId u, double xi_angle,
                                  std::vector<double> radii, double stop_radius,
                                  const WalkConfig& cfg) {
    std::sort(radii.begin(), radii.end(), std::greater<>());
    const Vec2 xi = unit_from_angle(xi_angle);
    if (distance(g.position(u), xi) <= radii.front())
        throw GraphError("start vertex inside the largest probe ball");
    std::vector<char> stop(g.vertex_count(), 0);
    std::vector<double> dist_xi(g.vertex_count());
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        stop[v] = 1.0 - norm(g.position(v)) <= stop_radius;
        dist_xi[v] = distance(g.position(v), xi);
    }
    WalkEngine eng(g, cfg.unit_weights);
    const std::size_t nsamples = static_cast<std::size_t>(cfg.samples);
    const std::size_t block_size = 1024;
    struct Block {
        std::vector<long long> hits;  // per radius
        long long n = 0, truncated = 0;
    };
    std::vector<Block> blocks((nsamples + block_size - 1) / block_size);
    unsigned threads = cfg.threads ? cfg.threads : default_thread_count();
    parallel_blocks(nsamples, block_size, threads, [&](std::size_t bi, std::size_t lo, std::size_t hi) {
        Block& blk = blocks[bi];
        blk.hits.assign(radii.size(), 0);
        for (std::size_t s = lo; s < hi; ++s) {
            RngStream rng(cfg.seed, s);
            VertexId x = u;
            double closest = dist_xi[x];
            long long steps = 0;
            bool done = stop[x];
            while (!done) {
                if (steps++ >= cfg.max_steps) break;
                x = eng.step(x, rng);
                closest = std::min(closest, dist_xi[x]);
                done = stop[x];
            }
            if (!done) {
                ++blk.truncated;
                continue;
            }
            ++blk.n;
            for (std::size_t k = 0; k < radii.size(); ++k)
                if (closest <= radii[k]) ++blk.hits[k];
        }
    });
    AtomProbeResult out;
    out.radii = radii;
    long long n = 0, truncated = 0;
    std::vector<long long> hits(radii.size(), 0);
    for (const Block& b : blocks) {
        n += b.n;
        truncated += b.truncated;
        for (std::size_t k = 0; k < radii.size(); ++k) hits[k] += b.hits[k];
    }
    if (n == 0) throw AllWalksTruncatedError();
    for (std::size_t k = 0; k < radii.size(); ++k) {
        double p = double(hits[k]) / double(n);
        out.visit_probability.push_back({p, proportion_ci(p, n), n, truncated});
        out.fitted_c = std::max(out.fitted_c, p * std::abs(std::log(radii[k])));
    }
    return out;
}

}  // namespace walk
}  // namespace carrier
