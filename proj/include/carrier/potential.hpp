#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <memory>
#include <optional>
#include <queue>
#include <vector>

#include "carrier/cable.hpp"
#include "carrier/graph.hpp"

namespace carrier {

struct EmptyLiveSetError : GraphError {
    EmptyLiveSetError() : GraphError("exhaustion live set is empty") {}
};
struct DisconnectedLiveSetError : GraphError {
    DisconnectedLiveSetError() : GraphError("exhaustion live set is disconnected") {}
};
struct SolverFailureError : GraphError {
    using GraphError::GraphError;
};
struct ZeroDenominatorError : GraphError {
    ZeroDenominatorError() : GraphError("Green value at the root vanishes") {}
};
struct PolesTooCloseError : GraphError {
    PolesTooCloseError() : GraphError("Green poles intrude into the boundary ball") {}
};
struct DomainViolationError : GraphError {
    using GraphError::GraphError;
};
struct EmptyAnnulusSideError : GraphError {
    EmptyAnnulusSideError() : GraphError("annulus side holds no vertices") {}
};

/// G_eps: live vertices |v| <= 1-eps with the external vertex boundary
/// absorbing. Holds one Cholesky factorization of the absorbing Laplacian,
/// reused by every solve.
class Exhaustion {
public:
    static Exhaustion from_epsilon(const EmbeddedGraph& g, double eps) {
        std::vector<char> mask(g.vertex_count(), 0);
        bool any = false;
        for (VertexId v = 0; v < g.vertex_count(); ++v) {
            mask[v] = norm(g.position(v)) <= 1.0 - eps;
            any |= mask[v];
        }
        if (!any) throw EmptyLiveSetError();
        return Exhaustion(g, std::move(mask), eps);
    }

    static Exhaustion from_live_mask(const EmbeddedGraph& g, std::vector<char> mask,
                                     double eps = 0.0) {
        return Exhaustion(g, std::move(mask), eps);
    }

    const EmbeddedGraph& graph() const { return *g_; }
    double epsilon() const { return eps_; }
    const std::vector<VertexId>& live() const { return live_; }
    const std::vector<VertexId>& absorbing() const { return absorbing_; }
    bool is_live(VertexId v) const { return live_index_[v] >= 0; }
    int live_index(VertexId v) const { return live_index_[v]; }

    /// Green column G(., y): expected visits to y before absorption. Indexed
    /// like live(); zero at absorbing vertices by convention.
    std::vector<double> green_column(VertexId y) const {
        require_factor();
        if (!is_live(y)) throw GraphError("green pole must be live");
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(live_.size());
        rhs[live_index_[y]] = g_->vertex_weight(y);
        Eigen::VectorXd sol = factor_->solve(rhs);
        if (factor_->info() != Eigen::Success) throw SolverFailureError("green solve failed");
        return {sol.data(), sol.data() + sol.size()};
    }

    /// Martin kernel M(., y) = G(., y)/G(x0, y), indexed like live().
    std::vector<double> martin_column(VertexId x0, VertexId y) const {
        std::vector<double> g = green_column(y);
        double denom = g[live_index(x0)];
        if (!(denom > 0.0)) throw ZeroDenominatorError();
        for (double& v : g) v /= denom;
        return g;
    }

    /// Harmonic on live with prescribed values on absorbing() (same order).
    std::vector<double> dirichlet(const std::vector<double>& absorbing_values) const {
        require_factor();
        if (absorbing_values.size() != absorbing_.size())
            throw GraphError("dirichlet boundary values misaligned");
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(live_.size());
        for (std::size_t a = 0; a < absorbing_.size(); ++a) {
            VertexId av = absorbing_[a];
            for (std::size_t i = 0; i < g_->neighbors(av).size(); ++i) {
                VertexId u = g_->neighbors(av)[i];
                if (!is_live(u)) continue;
                double w = g_->edge(g_->incident_edges(av)[i]).weight;
                rhs[live_index_[u]] += w * absorbing_values[a];
            }
        }
        Eigen::VectorXd sol = factor_->solve(rhs);
        if (factor_->info() != Eigen::Success) throw SolverFailureError("dirichlet solve failed");
        return {sol.data(), sol.data() + sol.size()};
    }

    /// max_v |h(v) - weighted neighbor average| over live, given live values
    /// and absorbing values; poles may be excluded.
    double harmonicity_residual(const std::vector<double>& live_values,
                                const std::vector<double>& absorbing_values,
                                std::optional<VertexId> skip = std::nullopt) const {
        double worst = 0.0;
        for (std::size_t i = 0; i < live_.size(); ++i) {
            VertexId v = live_[i];
            if (skip && *skip == v) continue;
            double acc = 0.0;
            auto ns = g_->neighbors(v);
            auto es = g_->incident_edges(v);
            for (std::size_t k = 0; k < ns.size(); ++k) {
                double w = g_->edge(es[k]).weight;
                double hval;
                if (is_live(ns[k]))
                    hval = live_values[live_index_[ns[k]]];
                else
                    hval = absorbing_values[absorbing_pos(ns[k])];
                acc += w * hval;
            }
            worst = std::max(worst, std::abs(live_values[i] - acc / g_->vertex_weight(v)));
        }
        return worst;
    }

    std::size_t absorbing_pos(VertexId v) const {
        auto it = std::lower_bound(absorbing_.begin(), absorbing_.end(), v);
        return static_cast<std::size_t>(it - absorbing_.begin());
    }

    /// Exit distribution over absorbing() for the walk started at `start`:
    /// hitting probabilities from one factorization, one solve per column of
    /// the absorbing indicator basis.
    std::vector<double> exit_distribution(VertexId start) const {
        std::vector<double> law(absorbing_.size(), 0.0);
        for (std::size_t a = 0; a < absorbing_.size(); ++a) {
            std::vector<double> indicator(absorbing_.size(), 0.0);
            indicator[a] = 1.0;
            law[a] = dirichlet(indicator)[live_index(start)];
        }
        return law;
    }

private:
    Exhaustion(const EmbeddedGraph& g, std::vector<char> mask, double eps)
        : g_(&g), eps_(eps) {
        live_index_.assign(g.vertex_count(), -1);
        for (VertexId v = 0; v < g.vertex_count(); ++v)
            if (mask[v]) {
                live_index_[v] = static_cast<int>(live_.size());
                live_.push_back(v);
            }
        if (live_.empty()) throw EmptyLiveSetError();
        absorbing_ = g.vertex_boundary(live_);
        check_connected();
        build_factor();
    }

    void check_connected() const {
        std::vector<char> seen(g_->vertex_count(), 0);
        std::queue<VertexId> q;
        q.push(live_.front());
        seen[live_.front()] = 1;
        std::size_t visited = 1;
        while (!q.empty()) {
            VertexId v = q.front();
            q.pop();
            for (VertexId u : g_->neighbors(v))
                if (is_live(u) && !seen[u]) {
                    seen[u] = 1;
                    ++visited;
                    q.push(u);
                }
        }
        if (visited != live_.size()) throw DisconnectedLiveSetError();
    }

    void build_factor() {
        const int n = static_cast<int>(live_.size());
        std::vector<Eigen::Triplet<double>> trips;
        for (int i = 0; i < n; ++i) {
            VertexId v = live_[i];
            trips.push_back({i, i, g_->vertex_weight(v)});
            auto ns = g_->neighbors(v);
            auto es = g_->incident_edges(v);
            for (std::size_t k = 0; k < ns.size(); ++k)
                if (is_live(ns[k]))
                    trips.push_back({i, live_index_[ns[k]], -g_->edge(es[k]).weight});
        }
        laplacian_.resize(n, n);
        laplacian_.setFromTriplets(trips.begin(), trips.end());
        if (!absorbing_.empty()) {
            factor_ = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
            factor_->compute(laplacian_);
            if (factor_->info() != Eigen::Success)
                factor_ = nullptr;  // flagged on first use
        }
    }

    void require_factor() const {
        if (!factor_)
            throw SolverFailureError(absorbing_.empty()
                                         ? "no absorbing boundary: Green function undefined"
                                         : "Laplacian factorization failed");
    }

    const EmbeddedGraph* g_;
    double eps_;
    std::vector<VertexId> live_, absorbing_;
    std::vector<int> live_index_;
    Eigen::SparseMatrix<double> laplacian_;
    std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> factor_;
};

inline Exhaustion exhaust(const EmbeddedGraph& g, double eps) {
    return Exhaustion::from_epsilon(g, eps);
}

namespace potential {

/// Effective resistance between disjoint vertex sets in the subgraph induced
/// by `mask` (conductances = edge weights): R = 1/energy of the unit
/// potential. Components not touching A or Z float at zero energy.
inline double effective_resistance(const EmbeddedGraph& g, const std::vector<char>& mask,
                                   const std::vector<VertexId>& A,
                                   const std::vector<VertexId>& Z) {
    if (A.empty() || Z.empty()) throw EmptyAnnulusSideError();
    const int n = g.vertex_count();
    std::vector<int> role(n, 0);  // 0 free, 1 source, 2 sink, -1 outside
    for (VertexId v = 0; v < n; ++v)
        if (!mask[v]) role[v] = -1;
    for (VertexId v : A) {
        if (role[v] == -1) throw GraphError("source vertex outside the induced graph");
        role[v] = 1;
    }
    for (VertexId v : Z) {
        if (role[v] == 1) throw GraphError("resistance endpoints overlap");
        if (role[v] == -1) throw GraphError("sink vertex outside the induced graph");
        role[v] = 2;
    }
    // restrict to the region reached from A u Z
    std::vector<char> reach(n, 0);
    std::queue<VertexId> q;
    for (VertexId v : A) { reach[v] = 1; q.push(v); }
    for (VertexId v : Z) { reach[v] = 1; q.push(v); }
    while (!q.empty()) {
        VertexId v = q.front();
        q.pop();
        for (VertexId u : g.neighbors(v))
            if (role[u] != -1 && !reach[u]) {
                reach[u] = 1;
                q.push(u);
            }
    }
    std::vector<int> idx(n, -1);
    std::vector<VertexId> unknown;
    for (VertexId v = 0; v < n; ++v)
        if (reach[v] && role[v] == 0) {
            idx[v] = static_cast<int>(unknown.size());
            unknown.push_back(v);
        }
    std::vector<double> h(n, 0.0);
    for (VertexId v : A) h[v] = 1.0;
    if (!unknown.empty()) {
        std::vector<Eigen::Triplet<double>> trips;
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(unknown.size());
        for (std::size_t i = 0; i < unknown.size(); ++i) {
            VertexId v = unknown[i];
            double diag = 0.0;
            auto ns = g.neighbors(v);
            auto es = g.incident_edges(v);
            for (std::size_t k = 0; k < ns.size(); ++k) {
                VertexId u = ns[k];
                if (role[u] == -1) continue;  // edge leaves the induced graph
                double w = g.edge(es[k]).weight;
                diag += w;
                if (role[u] == 0 && reach[u])
                    trips.push_back({static_cast<int>(i), idx[u], -w});
                else if (role[u] == 1)
                    rhs[i] += w;
            }
            trips.push_back({static_cast<int>(i), static_cast<int>(i), diag});
        }
        Eigen::SparseMatrix<double> L(unknown.size(), unknown.size());
        L.setFromTriplets(trips.begin(), trips.end());
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(L);
        if (chol.info() != Eigen::Success)
            throw SolverFailureError("resistance factorization failed");
        Eigen::VectorXd sol = chol.solve(rhs);
        if (chol.info() != Eigen::Success) throw SolverFailureError("resistance solve failed");
        for (std::size_t i = 0; i < unknown.size(); ++i) h[unknown[i]] = sol[i];
    }
    double energy = 0.0;
    for (const EdgeRec& e : g.edges()) {
        if (role[e.u] == -1 || role[e.v] == -1) continue;
        double dh = h[e.u] - h[e.v];
        energy += e.weight * dh * dh;
    }
    if (!(energy > 0.0)) throw SolverFailureError("degenerate resistance (zero energy)");
    return 1.0 / energy;
}

inline double effective_resistance(const EmbeddedGraph& g, const std::vector<VertexId>& A,
                                   const std::vector<VertexId>& Z) {
    return effective_resistance(g, std::vector<char>(g.vertex_count(), 1), A, Z);
}

inline std::vector<char> live_mask(const Exhaustion& ex) {
    std::vector<char> mask(ex.graph().vertex_count(), 0);
    for (VertexId v : ex.live()) mask[v] = 1;
    return mask;
}

struct AnnulusResistance {
    double measured = 0.0;
    double variational_lower = 0.0;  // 1/E(f) for the radial Lipschitz profile
    double test_energy = 0.0;
    int inner_count = 0, outer_count = 0;
};

/// Resistance across the annulus r..2r around the boundary point at angle
/// xi, inside G_eps, against the explicit test function
/// f = clamp((|x-xi|-r)/r, 0, 1).
inline AnnulusResistance resistance_annulus_bound(const Exhaustion& ex, double xi_angle,
                                                  double r) {
    const EmbeddedGraph& g = ex.graph();
    const Vec2 xi = unit_from_angle(xi_angle);
    std::vector<VertexId> A, Z;
    for (VertexId v : ex.live()) {
        double d = distance(g.position(v), xi);
        if (d <= r) A.push_back(v);
        else if (d > 2.0 * r) Z.push_back(v);
    }
    if (A.empty() || Z.empty()) throw EmptyAnnulusSideError();
    AnnulusResistance out;
    out.inner_count = static_cast<int>(A.size());
    out.outer_count = static_cast<int>(Z.size());
    std::vector<char> mask = live_mask(ex);
    out.measured = effective_resistance(g, mask, A, Z);
    auto f = [&](VertexId v) {
        double d = distance(g.position(v), xi);
        return std::clamp((d - r) / r, 0.0, 1.0);
    };
    for (const EdgeRec& e : g.edges()) {
        if (!mask[e.u] || !mask[e.v]) continue;
        double df = f(e.u) - f(e.v);
        out.test_energy += e.weight * df * df;
    }
    if (!(out.test_energy > 0.0)) throw EmptyAnnulusSideError();
    out.variational_lower = 1.0 / out.test_energy;
    return out;
}

struct ResistanceGrowth {
    std::vector<double> ratios;       // R/r ladder
    std::vector<double> resistance;   // measured values
    double slope = 0.0;               // least-squares fit against log(R/r)
    double contracted_lower = 0.0;    // resistance after contracting even shells
};

/// Resistance from V_euc(xi,r) to the complement of V_euc(xi,R) for a
/// geometric ladder of R, with the shell-contraction lower bound.
inline ResistanceGrowth resistance_log_growth(const Exhaustion& ex, double xi_angle, double r,
                                              const std::vector<double>& ratios) {
    const EmbeddedGraph& g = ex.graph();
    const Vec2 xi = unit_from_angle(xi_angle);
    std::vector<char> mask = live_mask(ex);
    ResistanceGrowth out;
    out.ratios = ratios;
    std::vector<VertexId> A;
    for (VertexId v : ex.live())
        if (distance(g.position(v), xi) <= r) A.push_back(v);
    if (A.empty()) throw EmptyAnnulusSideError();
    for (double q : ratios) {
        std::vector<VertexId> Z;
        for (VertexId v : ex.live())
            if (distance(g.position(v), xi) > q * r) Z.push_back(v);
        if (Z.empty()) throw EmptyAnnulusSideError();
        out.resistance.push_back(effective_resistance(g, mask, A, Z));
    }
    // least squares slope of resistance against log(ratio)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = static_cast<int>(ratios.size());
    for (int i = 0; i < n; ++i) {
        double x = std::log(ratios[i]);
        sx += x;
        sy += out.resistance[i];
        sxx += x * x;
        sxy += x * out.resistance[i];
    }
    out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

    // contract every even shell [2^{2i-1} r, 2^{2i} r): a quotient network
    // whose resistance can only drop (Rayleigh)
    double Rmax = ratios.back() * r;
    const int n_orig = g.vertex_count();
    std::vector<int> super(n_orig, -1);
    int next_super = 0;
    auto shell_of = [&](double d) { return static_cast<int>(std::floor(std::log2(d / r))); };
    std::map<int, int> contracted_shell_node;
    for (VertexId v = 0; v < n_orig; ++v) {
        if (!mask[v]) continue;
        double d = distance(g.position(v), xi);
        if (d > r && d <= Rmax) {
            int sh = shell_of(d);
            if (sh >= 0 && (sh % 2) == 1) {  // contract odd log2-shells
                auto [it, fresh] = contracted_shell_node.try_emplace(sh, -1);
                if (fresh) it->second = next_super++;
                super[v] = it->second;
                continue;
            }
        }
        super[v] = next_super++;
    }
    std::map<std::pair<int, int>, double> qedges;
    for (const EdgeRec& e : g.edges()) {
        if (!mask[e.u] || !mask[e.v]) continue;
        int a = super[e.u], b = super[e.v];
        if (a == b) continue;
        qedges[{std::min(a, b), std::max(a, b)}] += e.weight;
    }
    // quotient resistance by direct solve on the contracted network
    {
        const int qn = next_super;
        std::vector<VertexId> QA, QZ;
        std::vector<char> qa(qn, 0), qz(qn, 0);
        for (VertexId v = 0; v < n_orig; ++v) {
            if (!mask[v]) continue;
            double d = distance(g.position(v), xi);
            if (d <= r && !qa[super[v]]) { qa[super[v]] = 1; QA.push_back(super[v]); }
            if (d > Rmax && !qz[super[v]]) { qz[super[v]] = 1; QZ.push_back(super[v]); }
        }
        std::vector<int> role(qn, 0);
        for (int v : QA) role[v] = 1;
        for (int v : QZ) role[v] = 2;
        std::vector<int> idx(qn, -1);
        int m = 0;
        for (int v = 0; v < qn; ++v)
            if (role[v] == 0) idx[v] = m++;
        std::vector<Eigen::Triplet<double>> trips;
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
        std::vector<double> diag(m, 0.0);
        for (auto& [ab, w] : qedges) {
            auto [a, b] = ab;
            for (int pass = 0; pass < 2; ++pass) {
                int s = pass ? b : a, t = pass ? a : b;
                if (role[s] != 0) continue;
                diag[idx[s]] += w;
                if (role[t] == 0)
                    trips.push_back({idx[s], idx[t], -w});
                else if (role[t] == 1)
                    rhs[idx[s]] += w;
            }
        }
        for (int i = 0; i < m; ++i) trips.push_back({i, i, diag[i]});
        std::vector<double> h(qn, 0.0);
        for (int v : QA) h[v] = 1.0;
        if (m > 0) {
            Eigen::SparseMatrix<double> L(m, m);
            L.setFromTriplets(trips.begin(), trips.end());
            Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(L);
            Eigen::VectorXd sol = chol.solve(rhs);
            if (chol.info() != Eigen::Success)
                throw SolverFailureError("contracted-network solve failed");
            for (int v = 0; v < qn; ++v)
                if (role[v] == 0) h[v] = sol[idx[v]];
        }
        double energy = 0.0;
        for (auto& [ab, w] : qedges) {
            double dh = h[ab.first] - h[ab.second];
            energy += w * dh * dh;
        }
        out.contracted_lower = energy > 0.0 ? 1.0 / energy : 0.0;
    }
    return out;
}

/// max h / min h over vertices within d0-distance r of x, for h a Green
/// column G(., pole); the pole and the absorbing set must stay outside the
/// A*r ball.
inline double harnack_ratio(const Exhaustion& ex, VertexId pole, const CablePoint& x, double r,
                            double A) {
    const EmbeddedGraph& g = ex.graph();
    std::vector<double> dist = cable::vertex_distances(g, x);
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        if (dist[v] > A * r) continue;
        if (!ex.is_live(v))
            throw DomainViolationError("absorbing vertex inside the Harnack domain");
        if (v == pole) throw DomainViolationError("Green pole inside the Harnack domain");
    }
    std::vector<double> h = ex.green_column(pole);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    int count = 0;
    for (VertexId v : ex.live()) {
        if (dist[v] > r) continue;
        double val = h[ex.live_index(v)];
        lo = std::min(lo, val);
        hi = std::max(hi, val);
        ++count;
    }
    if (count == 0) throw DomainViolationError("no vertices in the Harnack ball");
    if (!(lo > 0.0)) throw DomainViolationError("Green column not positive on the ball");
    return hi / lo;
}

/// Boundary Harnack double ratio for h1 = G(., pole1), h2 = G(., pole2) over
/// the live part of B_euc(xi, r).
inline double boundary_harnack_ratio(const Exhaustion& ex, double xi_angle, double r,
                                     VertexId pole1, VertexId pole2, double A0 = 4.0) {
    const EmbeddedGraph& g = ex.graph();
    const Vec2 xi = unit_from_angle(xi_angle);
    if (distance(g.position(pole1), xi) <= A0 * r ||
        distance(g.position(pole2), xi) <= A0 * r)
        throw PolesTooCloseError();
    std::vector<double> h1 = ex.green_column(pole1);
    std::vector<double> h2 = ex.green_column(pole2);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    int count = 0;
    for (VertexId v : ex.live()) {
        if (distance(g.position(v), xi) > r) continue;
        double d = h2[ex.live_index(v)];
        if (!(d > 0.0)) throw ZeroDenominatorError();
        double q = h1[ex.live_index(v)] / d;
        lo = std::min(lo, q);
        hi = std::max(hi, q);
        ++count;
    }
    if (count == 0) throw EmptyAnnulusSideError();
    return hi / lo;
}

inline VertexId nearest_live_vertex(const Exhaustion& ex, const Vec2& target) {
    VertexId best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (VertexId v : ex.live()) {
        double d = distance(ex.graph().position(v), target);
        if (d < bd) {
            bd = d;
            best = v;
        }
    }
    return best;
}

/// Martin kernel values on a probe set (vertex ids), for the pole nearest to
/// the boundary point at angle xi in this exhaustion.
inline std::vector<double> martin_probe(const Exhaustion& ex, VertexId x0, double xi_angle,
                                        const std::vector<VertexId>& probes,
                                        VertexId* chosen = nullptr, int rank = 0) {
    const Vec2 target = unit_from_angle(xi_angle);
    VertexId y = -1;
    if (rank == 0) {
        y = nearest_live_vertex(ex, target);
    } else {
        std::vector<std::pair<double, VertexId>> order;
        for (VertexId v : ex.live())
            order.push_back({distance(ex.graph().position(v), target), v});
        std::sort(order.begin(), order.end());
        y = order[std::min<std::size_t>(rank, order.size() - 1)].second;
    }
    if (chosen) *chosen = y;
    std::vector<double> column = ex.martin_column(x0, y);
    std::vector<double> out;
    out.reserve(probes.size());
    for (VertexId p : probes) out.push_back(column[ex.live_index(p)]);
    return out;
}

}  // namespace potential
}  // namespace carrier
