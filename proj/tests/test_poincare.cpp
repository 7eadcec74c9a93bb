#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "carrier/generators.hpp"
#include "carrier/packing.hpp"
#include "carrier/poincare.hpp"

using namespace carrier;

TEST_CASE("single edge reproduces the 1-d Neumann gap") {
    // Neumann eigenvalue on [0,L] is (pi/L)^2, so the best constant obeys
    // kappa r^2 = L^2/pi^2. Discretized at h = L/64 this lands within 1%.
    const double L = 2.0;
    EmbeddedGraph g = EmbeddedGraph::build({{0, 0}, {L, 0}}, {{0, 1, 1.0}});
    PoincareOptions opts;
    opts.blowup = 1.0;
    opts.h_divisor = 64.0;
    opts.check_carrier = false;
    PoincareResult res = poincare_constant(g, CablePoint{0, 0.5}, L / 2.0, opts);
    double want = L * L / (kPi * kPi);
    REQUIRE(res.mu == Catch::Approx(want).epsilon(0.01));
    REQUIRE(res.kappa == Catch::Approx(want / (L * L / 4.0)).epsilon(0.01));
}

TEST_CASE("discretization refinement converges quadratically-ish") {
    const double L = 1.0;
    EmbeddedGraph g = EmbeddedGraph::build({{0, 0}, {L, 0}}, {{0, 1, 1.0}});
    double want = L * L / (kPi * kPi);
    double err_coarse = 0.0, err_fine = 0.0;
    for (double div : {8.0, 32.0}) {
        PoincareOptions opts;
        opts.blowup = 1.0;
        opts.h_divisor = div;
        opts.check_carrier = false;
        double mu = poincare_constant(g, CablePoint{0, 0.5}, L / 2.0, opts).mu;
        (div == 8.0 ? err_coarse : err_fine) = std::abs(mu - want);
    }
    REQUIRE(err_fine < err_coarse);
    REQUIRE(err_fine < 0.002 * want);
}

TEST_CASE("poincare constant on a lattice ball is positive and finite") {
    EmbeddedGraph tl = make_tri_lattice_disc(14.0);
    VertexId center = 0;
    for (VertexId v = 0; v < tl.vertex_count(); ++v)
        if (norm(tl.position(v)) < 1e-9) center = v;
    PoincareResult res = poincare_constant(tl, cable_at_vertex(tl, center), 3.0);
    REQUIRE(res.kappa > 0.0);
    REQUIRE(std::isfinite(res.kappa));
    REQUIRE(res.nodes > 50);
}

TEST_CASE("poincare sweep values cluster on a packing") {
    Triangulation t = generate_hyperbolic(7, 4);
    PackingResult p = pack_maximal(t, 1e-9);
    EmbeddedGraph g = to_embedded_graph(p, t);
    std::vector<double> kappas;
    for (VertexId v : {0, 1, 3, 5, 8, 12}) {
        double clearance = g.carrier_clearance(g.position(v));
        if (clearance <= 0.0) continue;
        double r = 0.9 * clearance / 4.0;  // blowup ball stays inside
        kappas.push_back(poincare_constant(g, cable_at_vertex(g, v), r).kappa);
    }
    REQUIRE(kappas.size() >= 3);
    double lo = *std::min_element(kappas.begin(), kappas.end());
    double hi = *std::max_element(kappas.begin(), kappas.end());
    REQUIRE(hi / lo < 4.0);
}

TEST_CASE("carrier escape raises") {
    EmbeddedGraph grid = make_square_grid(3, 3);
    REQUIRE_THROWS_AS(poincare_constant(grid, cable_at_vertex(grid, 0), 1.0),
                      BallEscapesCarrierError);
}
