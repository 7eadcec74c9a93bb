#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "carrier/generators.hpp"
#include "carrier/goodness.hpp"
#include "carrier/packing.hpp"

using namespace carrier;

namespace {

// Closed-form maximal packing of the k-wheel, solved from the tangency
// system: with s = sin(pi/k), hub radius (1-s)/(1+s), rim radii s/(1+s),
// rim centers at distance 1/(1+s) from the origin.
struct WheelSolution {
    double hub, rim, rim_center_dist;
};
WheelSolution wheel_solution(int k) {
    double s = std::sin(kPi / k);
    return {(1.0 - s) / (1.0 + s), s / (1.0 + s), 1.0 / (1.0 + s)};
}

}  // namespace

TEST_CASE("K4 maximal packing matches the symmetric tangency solution") {
    Triangulation t = make_wheel(3);
    PackingResult p = pack_maximal(t, 1e-10);
    REQUIRE(p.converged);
    WheelSolution w = wheel_solution(3);
    REQUIRE(w.rim == Catch::Approx(2.0 * std::sqrt(3.0) - 3.0).epsilon(1e-12));
    REQUIRE(w.hub == Catch::Approx(7.0 - 4.0 * std::sqrt(3.0)).epsilon(1e-12));
    REQUIRE(std::abs(p.radius[0] - w.hub) < 1e-8);
    for (VertexId v = 1; v <= 3; ++v) REQUIRE(std::abs(p.radius[v] - w.rim) < 1e-8);
    // gauge: hub at origin, first rim neighbor on the positive real axis
    REQUIRE(norm(p.center[0]) < 1e-9);
    REQUIRE(p.center[1].y == Catch::Approx(0.0).margin(1e-9));
    REQUIRE(p.center[1].x == Catch::Approx(w.rim_center_dist).margin(1e-8));
    REQUIRE(p.angle_residual <= 1e-10);
    REQUIRE(p.tangency_residual <= 1e-8);
    REQUIRE(p.boundary_residual <= 1e-8);
}

TEST_CASE("wheel packings for k=7 and k=8") {
    for (int k : {7, 8}) {
        Triangulation t = make_wheel(k);
        PackingResult p = pack_maximal(t, 1e-10);
        REQUIRE(p.converged);
        WheelSolution w = wheel_solution(k);
        REQUIRE(std::abs(p.radius[0] - w.hub) < 1e-8);
        for (int v = 1; v <= k; ++v) REQUIRE(std::abs(p.radius[v] - w.rim) < 1e-8);
        double sum = packing::angle_sum_euclidean(t, p.radius, 0);
        REQUIRE(sum == Catch::Approx(kTwoPi).margin(1e-8));
    }
}

TEST_CASE("euclidean angle sums") {
    Triangulation hex = generate_hyperbolic(7, 2);
    // all radii equal at an interior degree-7 vertex: 7 * pi/3
    std::vector<double> radii(hex.n, 1.0);
    REQUIRE(packing::angle_sum_euclidean(hex, radii, 0) == Catch::Approx(7.0 * kPi / 3.0));

    // random radii match an independent law-of-cosines evaluation
    std::vector<double> r2(hex.n);
    for (int i = 0; i < hex.n; ++i) r2[i] = 0.5 + 0.13 * ((i * 2654435761u) % 97) / 97.0;
    VertexId v = 3;
    double direct = 0.0;
    const auto& ring = hex.rot[v];
    for (std::size_t i = 0; i < ring.size(); ++i) {
        VertexId u = ring[i], w = ring[(i + 1) % ring.size()];
        double a = r2[v] + r2[u], b = r2[v] + r2[w], c = r2[u] + r2[w];
        direct += std::acos((a * a + b * b - c * c) / (2.0 * a * b));
    }
    REQUIRE(packing::angle_sum_euclidean(hex, r2, v) == Catch::Approx(direct).epsilon(1e-12));
}

TEST_CASE("hyperbolic ball packings converge with small residuals") {
    for (int depth : {2, 3, 4}) {
        Triangulation t = generate_hyperbolic(7, depth);
        PackingResult p = pack_maximal(t, 1e-9);
        INFO("depth " << depth << " iterations " << p.iterations);
        REQUIRE(p.converged);
        REQUIRE(p.angle_residual <= 1e-9);
        REQUIRE(p.tangency_residual <= 1e-8);
        REQUIRE(p.boundary_residual <= 1e-7);
        REQUIRE(p.layout_consistency <= 1e-8);
    }
}

TEST_CASE("packed triangulation embeds and passes goodness validation") {
    Triangulation t = generate_hyperbolic(7, 3);
    PackingResult p = pack_maximal(t, 1e-9);
    EmbeddedGraph g = to_embedded_graph(p, t);
    int V = g.vertex_count(), E = g.edge_count(), F = static_cast<int>(g.faces().size());
    REQUIRE(V - E + F == 2);
    auto [d_req, eta] = goodness::tightest_parameters(g);
    GoodnessReport rep = goodness::validate(g, d_req * (1.0 + 1e-9), eta * (1.0 - 1e-9));
    REQUIRE(rep.passed());
}

TEST_CASE("ring constants") {
    SECTION("7-wheel rim is symmetric") {
        Triangulation t = make_wheel(7);
        PackingResult p = pack_maximal(t, 1e-10);
        double lo = 1e9, hi = 0.0;
        for (int v = 1; v <= 7; ++v) {
            lo = std::min(lo, p.radius[v]);
            hi = std::max(hi, p.radius[v]);
        }
        REQUIRE(hi / lo == Catch::Approx(1.0).epsilon(1e-8));
    }
    SECTION("K4 hub/rim ratio has closed form 3 + 2*sqrt(3)") {
        Triangulation t = make_wheel(3);
        PackingResult p = pack_maximal(t, 1e-10);
        RingReport r = ring_constant(p, t);
        REQUIRE(r.max_ratio_all == Catch::Approx(3.0 + 2.0 * std::sqrt(3.0)).epsilon(1e-7));
    }
    SECTION("hex7 interior ratios are finite and reported per degree") {
        Triangulation t = generate_hyperbolic(7, 4);
        PackingResult p = pack_maximal(t, 1e-9);
        RingReport r = ring_constant(p, t);
        REQUIRE(r.max_ratio_interior >= 1.0);
        REQUIRE(r.max_ratio_interior < 100.0);
        REQUIRE_FALSE(r.per_degree.empty());
    }
}

TEST_CASE("gauge changes rotate but do not rescale the wheel") {
    Triangulation t = make_wheel(3);
    PackingResult a = pack_maximal(t, 1e-10);
    PackOptions alt;
    alt.axis = t.rot[0][1];
    PackingResult b = pack_maximal(t, 1e-10, alt);
    std::vector<double> ra = a.radius, rb = b.radius;
    std::sort(ra.begin(), ra.end());
    std::sort(rb.begin(), rb.end());
    for (std::size_t i = 0; i < ra.size(); ++i)
        REQUIRE(ra[i] == Catch::Approx(rb[i]).margin(1e-9));
    REQUIRE(std::abs(distance(a.center[1], a.center[0]) -
                     distance(b.center[1], b.center[0])) < 1e-9);
}

TEST_CASE("packing rejects bad inputs") {
    Triangulation bad = make_wheel(3);
    bad.faces.pop_back();
    REQUIRE_THROWS_AS(pack_maximal(bad, 1e-9), NotATriangulationError);

    // strip interior: a single triangle face with 3 boundary vertices
    Triangulation tri;
    tri.n = 4;
    REQUIRE_THROWS_AS(pack_maximal(tri, 1e-9), NotATriangulationError);
}
