#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "carrier/cable.hpp"
#include "carrier/generators.hpp"
#include "carrier/packing.hpp"
#include "carrier/rng.hpp"
#include "support/oracles.hpp"

using namespace carrier;

namespace {

EmbeddedGraph make_unit_square_cycle() {
    std::vector<Vec2> pos{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    return EmbeddedGraph::build(pos, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 0, 1}});
}

EmbeddedGraph packed_hex7(int depth) {
    Triangulation t = generate_hyperbolic(7, depth);
    PackingResult p = pack_maximal(t, 1e-10);
    return to_embedded_graph(p, t);
}

}  // namespace

TEST_CASE("d0 basics") {
    EmbeddedGraph tri = make_tri3();
    SECTION("same edge is the segment geodesic") {
        CablePoint a{0, 0.2}, b{0, 0.7};
        REQUIRE(cable::d0(tri, a, b) == Catch::Approx(0.5));
    }
    SECTION("opposite corners of a square face without diagonal") {
        EmbeddedGraph sq = make_unit_square_cycle();
        CablePoint x = cable_at_vertex(sq, 0), y = cable_at_vertex(sq, 2);
        REQUIRE(cable::d0(sq, x, y) == Catch::Approx(2.0));
    }
    SECTION("symmetry is exact") {
        CablePoint a{0, 0.33}, b{2, 0.71};
        REQUIRE(cable::d0(tri, a, b) == cable::d0(tri, b, a));
    }
}

TEST_CASE("d0 equals the split-vertex Dijkstra oracle on a packed graph") {
    EmbeddedGraph g = packed_hex7(3);
    RngStream rng(7, 0);
    for (int i = 0; i < 100; ++i) {
        CablePoint x{static_cast<EdgeId>(rng.next_below(g.edge_count())), rng.next_double()};
        CablePoint y{static_cast<EdgeId>(rng.next_below(g.edge_count())), rng.next_double()};
        double got = cable::d0(g, x, y);
        double want = oracles::split_graph_d0(g, x, y);
        REQUIRE(got == Catch::Approx(want).margin(1e-12));
        // Euclidean lower bound
        REQUIRE(got >= distance(cable_position(g, x), cable_position(g, y)) - 1e-12);
    }
}

TEST_CASE("d0 satisfies the triangle inequality on sampled triples") {
    EmbeddedGraph g = packed_hex7(2);
    RngStream rng(11, 0);
    for (int i = 0; i < 60; ++i) {
        CablePoint a{static_cast<EdgeId>(rng.next_below(g.edge_count())), rng.next_double()};
        CablePoint b{static_cast<EdgeId>(rng.next_below(g.edge_count())), rng.next_double()};
        CablePoint c{static_cast<EdgeId>(rng.next_below(g.edge_count())), rng.next_double()};
        double ab = cable::d0(g, a, b), bc = cable::d0(g, b, c), ac = cable::d0(g, a, c);
        REQUIRE(ac <= ab + bc + 1e-12);
    }
}

TEST_CASE("cable balls") {
    EmbeddedGraph tri = make_tri3();
    SECTION("vertex ball of radius 1/2 on unit edges") {
        CablePoint x = cable_at_vertex(tri, 0);
        CableBall b = cable::ball_d0(tri, x, 0.5);
        REQUIRE(b.measure == Catch::Approx(1.0));  // two half-edges, weight 1 each
        REQUIRE(b.pieces.size() == 2);
    }
    SECTION("radius zero has empty measure") {
        CablePoint x{0, 0.37};
        REQUIRE(cable::ball_d0(tri, x, 0.0).measure == Catch::Approx(0.0).margin(1e-15));
    }
    SECTION("measure is monotone in r and saturates") {
        CablePoint x{0, 0.5};
        double prev = 0.0;
        for (double r : {0.1, 0.3, 0.7, 1.2, 2.0, 5.0}) {
            double m = cable::ball_d0(tri, x, r).measure;
            REQUIRE(m >= prev);
            prev = m;
        }
        REQUIRE(prev == Catch::Approx(3.0));  // all of X: 3 unit edges
    }
    SECTION("measure matches fine-discretization integration on a packing") {
        EmbeddedGraph g = packed_hex7(2);
        RngStream rng(3, 0);
        for (int trial = 0; trial < 5; ++trial) {
            CablePoint x{static_cast<EdgeId>(rng.next_below(g.edge_count())), rng.next_double()};
            double r = 0.05 + 0.35 * rng.next_double();
            CableBall ball = cable::ball_d0(g, x, r);
            double riemann = 0.0;
            const int steps = 1000;
            for (EdgeId e = 0; e < g.edge_count(); ++e) {
                double len = g.edge(e).length;
                for (int k = 0; k < steps; ++k) {
                    CablePoint p{e, (k + 0.5) / steps};
                    if (cable::d0(g, x, p) <= r) riemann += len * len / steps;
                }
            }
            REQUIRE(ball.measure == Catch::Approx(riemann).epsilon(0.02).margin(1e-4));
        }
    }
}

TEST_CASE("doubling ratios") {
    SECTION("small radius at a vertex doubles linearly") {
        EmbeddedGraph grid = make_square_grid(3, 3);
        CablePoint center = cable_at_vertex(grid, 4);
        REQUIRE(cable::doubling_ratio(grid, center, 0.2) == Catch::Approx(2.0).margin(1e-12));
    }
    SECTION("large radius on the triangular lattice doubles like area") {
        EmbeddedGraph tl = make_tri_lattice_disc(18.0);
        VertexId center = 0;
        for (VertexId v = 0; v < tl.vertex_count(); ++v)
            if (norm(tl.position(v)) < 1e-9) center = v;
        CablePoint x = cable_at_vertex(tl, center);
        double ratio = cable::doubling_ratio(tl, x, 8.0);
        REQUIRE(ratio > 3.4);
        REQUIRE(ratio < 4.6);
    }
    SECTION("escaping the carrier is an error") {
        EmbeddedGraph grid = make_square_grid(3, 3);
        CablePoint corner = cable_at_vertex(grid, 0);
        REQUIRE_THROWS_AS(cable::doubling_ratio(grid, corner, 0.5), BallEscapesCarrierError);
    }
}

TEST_CASE("cones") {
    EmbeddedGraph tri = make_tri3();
    SECTION("full circle degenerates to the euclidean-ball clip") {
        EmbeddedGraph g = packed_hex7(2);
        VertexId u = 0;
        double r = 0.4;
        CableBall full = cable::cone(g, u, r, AngleInterval{0.0, kTwoPi});
        // direct clip: per edge, the radial sub-interval
        double want = 0.0;
        for (EdgeId e = 0; e < g.edge_count(); ++e) {
            const EdgeRec& er = g.edge(e);
            Vec2 a = g.position(er.u), b = g.position(er.v);
            const int steps = 4000;
            for (int k = 0; k < steps; ++k) {
                Vec2 p = a + (b - a) * ((k + 0.5) / steps);
                if (distance(p, g.position(u)) <= r) want += er.length * er.length / steps;
            }
        }
        REQUIRE(full.measure == Catch::Approx(want).epsilon(0.01));
    }
    SECTION("narrow cone towards a single edge") {
        CableBall c = cable::cone(tri, 0, 2.0, AngleInterval{-0.1, 0.2});
        // the edge to (1,0) in full, plus the sliver of the far edge whose
        // argument from the apex stays within 0.1
        double s_star = std::tan(0.1) / (std::sqrt(3.0) / 2.0 + std::tan(0.1) / 2.0);
        REQUIRE(c.measure == Catch::Approx(1.0 + s_star).epsilon(1e-6));
        bool has_full_edge = false;
        for (const CablePiece& p : c.pieces)
            has_full_edge |= (p.lo == Catch::Approx(0.0).margin(1e-12) &&
                              p.hi == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(has_full_edge);
    }
    SECTION("cone measure is additive against its complement") {
        EmbeddedGraph g = packed_hex7(2);
        AngleInterval I{0.7, kPi - 0.8};
        double r = 0.5;
        double a = cable::cone(g, 0, r, I).measure;
        double b = cable::cone(g, 0, r, I.complement()).measure;
        double whole = cable::cone(g, 0, r, AngleInterval{0.0, kTwoPi}).measure;
        REQUIRE(a + b == Catch::Approx(whole).epsilon(1e-9));
    }
}

TEST_CASE("bilipschitz constants") {
    SECTION("grid diagonal pair realizes sqrt(2)") {
        EmbeddedGraph grid = make_square_grid(3, 3);
        CablePoint x = cable_at_vertex(grid, 0);
        CablePoint y = cable_at_vertex(grid, 4);
        double ratio = cable::d0(grid, x, y) / distance(grid.position(0), grid.position(4));
        REQUIRE(ratio == Catch::Approx(std::sqrt(2.0)));
    }
    SECTION("triangle stays at most 2") {
        EmbeddedGraph tri = make_tri3();
        double c = cable::bilipschitz_constant(tri, 20000, 5);
        REQUIRE(c <= 2.0 + 1e-9);
        REQUIRE(c > 1.5);
    }
    SECTION("stable under doubling the sample count") {
        EmbeddedGraph g = packed_hex7(3);
        double c1 = cable::bilipschitz_constant(g, 10000, 9);
        double c2 = cable::bilipschitz_constant(g, 20000, 9);
        REQUIRE(c2 >= c1);  // nested samples
        REQUIRE((c2 - c1) / c1 <= 0.10);
    }
}
