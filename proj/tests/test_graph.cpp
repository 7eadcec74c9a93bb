#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "carrier/generators.hpp"
#include "carrier/graph.hpp"

using namespace carrier;

namespace {

int bounded_face_count(const EmbeddedGraph& g) {
    int k = 0;
    for (const Face& f : g.faces()) k += f.bounded;
    return k;
}

void check_euler(const EmbeddedGraph& g) {
    int V = g.vertex_count();
    int E = g.edge_count();
    int F = static_cast<int>(g.faces().size());
    REQUIRE(V - E + F == 2);
}

}  // namespace

TEST_CASE("tri3 builds with one bounded and one unbounded face") {
    EmbeddedGraph g = make_tri3();
    REQUIRE(g.vertex_count() == 3);
    REQUIRE(g.faces().size() == 2);
    REQUIRE(bounded_face_count(g) == 1);
    check_euler(g);
    for (const Face& f : g.faces()) {
        if (!f.bounded) continue;
        REQUIRE(f.boundary.size() == 3);
        REQUIRE(f.area == Catch::Approx(std::sqrt(3.0) / 4.0));
        REQUIRE(f.diameter == Catch::Approx(1.0));
    }
}

TEST_CASE("crossing edges are rejected") {
    SECTION("square with both diagonals") {
        std::vector<Vec2> pos{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
        std::vector<EmbeddedGraph::EdgeInput> edges{
            {0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 0, 1}, {0, 2, 1}, {1, 3, 1}};
        REQUIRE_THROWS_AS(EmbeddedGraph::build(pos, edges), EdgeCrossingError);
    }
    SECTION("chord duplicating an edge direction through its interior") {
        std::vector<Vec2> pos{{0, 0}, {1, 0}, {2, 0}, {1, 1}};
        std::vector<EmbeddedGraph::EdgeInput> edges{
            {0, 1, 1}, {1, 2, 1}, {0, 3, 1}, {1, 3, 1}, {2, 3, 1}, {0, 2, 1}};
        REQUIRE_THROWS_AS(EmbeddedGraph::build(pos, edges), EdgeCrossingError);
    }
    SECTION("vertex resting on a non-incident edge") {
        std::vector<Vec2> pos{{0, 0}, {2, 0}, {1, 0}, {1, -1}};
        std::vector<EmbeddedGraph::EdgeInput> edges{{0, 1, 1}, {2, 3, 1}, {0, 3, 1}};
        REQUIRE_THROWS_AS(EmbeddedGraph::build(pos, edges), EdgeCrossingError);
    }
}

TEST_CASE("duplicate positions and disconnection are rejected") {
    std::vector<Vec2> dup{{0, 0}, {1, 0}, {1, 0}};
    REQUIRE_THROWS_AS(EmbeddedGraph::build(dup, {{0, 1, 1}, {1, 2, 1}}),
                      DuplicatePositionError);
    std::vector<Vec2> disc{{0, 0}, {1, 0}, {3, 0}, {4, 0}};
    REQUIRE_THROWS_AS(EmbeddedGraph::build(disc, {{0, 1, 1}, {2, 3, 1}}),
                      DisconnectedError);
    REQUIRE_THROWS_AS(EmbeddedGraph::build({{0, 0}, {1, 1}}, {{0, 0, 1}}), GraphError);
    REQUIRE_THROWS_AS(EmbeddedGraph::build({{0, 0}, {1, 1}}, {{0, 1, -2.0}}), GraphError);
}

TEST_CASE("3x3 grid faces") {
    EmbeddedGraph g = make_square_grid(3, 3);
    REQUIRE(g.vertex_count() == 9);
    REQUIRE(g.edge_count() == 12);
    REQUIRE(g.faces().size() == 5);
    REQUIRE(bounded_face_count(g) == 4);
    check_euler(g);
    for (const Face& f : g.faces()) {
        if (!f.bounded) continue;
        REQUIRE(f.area == Catch::Approx(1.0));
        REQUIRE(f.diameter == Catch::Approx(std::sqrt(2.0)));
    }
}

TEST_CASE("isolation radius and euclidean balls") {
    EmbeddedGraph tri = make_tri3();
    for (VertexId v = 0; v < 3; ++v) REQUIRE(tri.isolation_radius(v) == Catch::Approx(1.0));

    EmbeddedGraph grid = make_square_grid(3, 3);
    REQUIRE(grid.isolation_radius(0) == Catch::Approx(1.0));

    REQUIRE(tri.euclidean_ball_vertices({0, 0}, 0.5).size() == 1);
    REQUIRE(tri.euclidean_ball_vertices({0, 0}, 1.0).size() == 3);  // distance-1 ties included
    auto near_center = grid.euclidean_ball_vertices({1, 1}, 1.0);
    REQUIRE(near_center.size() == 5);

    // monotone in r, and everything for large r
    auto all = grid.euclidean_ball_vertices({1, 1}, 10.0);
    REQUIRE(static_cast<int>(all.size()) == grid.vertex_count());
}

TEST_CASE("vertex boundary") {
    EmbeddedGraph grid = make_square_grid(3, 3);
    std::vector<VertexId> everything(grid.vertex_count());
    for (int i = 0; i < grid.vertex_count(); ++i) everything[i] = i;
    REQUIRE(grid.vertex_boundary(everything).empty());

    std::vector<VertexId> center{4};
    auto b = grid.vertex_boundary(center);
    REQUIRE(b == std::vector<VertexId>{1, 3, 5, 7});

    // matches a direct adjacency scan on a bigger graph
    EmbeddedGraph tl = make_tri_lattice_disc(4.0);
    auto ball = tl.euclidean_ball_vertices({0.3, 0.1}, 2.0);
    auto got = tl.vertex_boundary(ball);
    std::set<VertexId> in(ball.begin(), ball.end()), expect;
    for (VertexId v : ball)
        for (VertexId u : tl.neighbors(v))
            if (!in.count(u)) expect.insert(u);
    REQUIRE(got == std::vector<VertexId>(expect.begin(), expect.end()));
}

TEST_CASE("rotation order is counterclockwise") {
    EmbeddedGraph grid = make_square_grid(3, 3);
    auto ns = grid.neighbors(4);  // center
    REQUIRE(ns.size() == 4);
    // sorted by angle: east(0), north(pi/2), west(pi), south(-pi/2 -> first)
    std::vector<double> angs;
    for (VertexId u : ns) angs.push_back(arg(grid.position(u) - grid.position(4)));
    REQUIRE(std::is_sorted(angs.begin(), angs.end()));
}

TEST_CASE("hyperbolic ball generator") {
    SECTION("depth 1 is the wheel") {
        Triangulation t = generate_hyperbolic(7, 1);
        REQUIRE(t.n == 8);
        REQUIRE(t.faces.size() == 7);
        REQUIRE(t.boundary.size() == 7);
        REQUIRE(t.interior_count() == 1);
        REQUIRE(t.rot[0].size() == 7);
    }
    SECTION("deg 8 wheel has 8 spokes") {
        Triangulation t = generate_hyperbolic(8, 1);
        REQUIRE(t.n == 9);
        REQUIRE(t.rot[0].size() == 8);
    }
    SECTION("interior degrees are exactly deg") {
        for (int depth : {2, 3, 4}) {
            Triangulation t = generate_hyperbolic(7, depth);
            for (VertexId v = 0; v < t.n; ++v)
                if (t.interior[v]) REQUIRE(t.rot[v].size() == 7);
        }
    }
    SECTION("boundary is a single simple cycle") {
        Triangulation t = generate_hyperbolic(7, 3);
        std::set<VertexId> uniq(t.boundary.begin(), t.boundary.end());
        REQUIRE(uniq.size() == t.boundary.size());
        for (std::size_t i = 0; i < t.boundary.size(); ++i) {
            VertexId a = t.boundary[i], b = t.boundary[(i + 1) % t.boundary.size()];
            bool adjacent = false;
            for (VertexId u : t.rot[a]) adjacent |= (u == b);
            REQUIRE(adjacent);
        }
    }
    SECTION("combinatorial Euler formula") {
        Triangulation t = generate_hyperbolic(7, 2);
        int V = t.n;
        int E = static_cast<int>(t.edge_list().size());
        int F = static_cast<int>(t.faces.size()) + 1;  // plus outer
        REQUIRE(V - E + F == 2);
    }
    SECTION("size cap") {
        REQUIRE_THROWS_AS(generate_hyperbolic(7, 12, 1000), SizeCapExceededError);
    }
}

TEST_CASE("delaunay generator") {
    SECTION("n=3 gives a single triangle") {
        EmbeddedGraph g = generate_delaunay(3, 42);
        REQUIRE(g.vertex_count() == 3);
        REQUIRE(g.edge_count() == 3);
        REQUIRE(bounded_face_count(g) == 1);
    }
    SECTION("deterministic in seed") {
        EmbeddedGraph a = generate_delaunay(50, 1);
        EmbeddedGraph b = generate_delaunay(50, 1);
        REQUIRE(a.vertex_count() == b.vertex_count());
        for (VertexId v = 0; v < a.vertex_count(); ++v) {
            REQUIRE(a.position(v).x == b.position(v).x);
            REQUIRE(a.position(v).y == b.position(v).y);
        }
        REQUIRE(a.edge_count() == b.edge_count());
        for (EdgeId e = 0; e < a.edge_count(); ++e) {
            REQUIRE(a.edge(e).u == b.edge(e).u);
            REQUIRE(a.edge(e).v == b.edge(e).v);
        }
    }
    SECTION("every bounded face passes the empty-circumcircle test") {
        EmbeddedGraph g = generate_delaunay(50, 1);
        check_euler(g);
        for (const Face& f : g.faces()) {
            if (!f.bounded) continue;
            REQUIRE(f.boundary.size() == 3);
            auto cc = circumcircle(g.position(f.boundary[0]), g.position(f.boundary[1]),
                                   g.position(f.boundary[2]));
            REQUIRE(cc.has_value());
            for (VertexId v = 0; v < g.vertex_count(); ++v) {
                if (v == f.boundary[0] || v == f.boundary[1] || v == f.boundary[2]) continue;
                REQUIRE(norm2(g.position(v) - cc->center) >= cc->radius2 * (1.0 - 1e-9));
            }
        }
    }
}

TEST_CASE("carrier containment") {
    EmbeddedGraph g = make_square_grid(3, 3);
    REQUIRE(g.point_in_carrier({1.0, 1.0}));
    REQUIRE_FALSE(g.point_in_carrier({-0.5, 1.0}));
    REQUIRE(g.disc_in_carrier({1.0, 1.0}, 0.9));
    REQUIRE_FALSE(g.disc_in_carrier({1.0, 1.0}, 1.1));
}
