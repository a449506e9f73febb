#include <doctest.h>

#include <cmath>
#include <random>

#include "ctsim/errors.hpp"
#include "ctsim/map_model.hpp"

#include "../test_util.hpp"

using namespace cts;

TEST_CASE("parse_map accepts a minimal well-formed map") {
    const auto map = parse_map("node A 0 0 waypoint\n"
                               "node B 10 0 waypoint\n"
                               "edge A B 10 3\n");
    CHECK(map.graph.nodes().size() == 2);
    CHECK(map.graph.edges().size() == 1);
    CHECK(map.graph.node("A").position == Vec2{0.0, 0.0});
    CHECK(map.graph.edges()[0].length == 10.0);
}

TEST_CASE("parse_map handles comments, blank lines, stops and obstacles") {
    const auto map = parse_map("# a comment\n"
                               "\n"
                               "node A 0 0 station\n"
                               "node B 5 5 intersection  # trailing comment\n"
                               "edge A B 7.1 2.5\n"
                               "stop s1 2 2 30\n"
                               "obstacle 3 3 0.5 10\n"
                               "obstacle 4 4 0.5 10 20\n");
    CHECK(map.stops.size() == 1);
    CHECK(map.stops[0].stop_duration == 30.0);
    CHECK(map.obstacles.size() == 2);
    CHECK(std::isinf(map.obstacles[0].disappears_at));
    CHECK(map.obstacles[1].disappears_at == 20.0);
}

TEST_CASE("parse_map rejects malformed documents with line numbers") {
    CHECK_THROWS_AS(parse_map("node A 0 zero waypoint\n"), SyntaxError);
    CHECK_THROWS_AS(parse_map("street A B 1 1\n"), SyntaxError);
    CHECK_THROWS_AS(parse_map("node A 0 0\n"), SyntaxError);
    try {
        parse_map("node A 0 0 waypoint\nedge A B\n");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.line == 2);
    }
}

TEST_CASE("parse_map rejects dangling references naming the node") {
    try {
        parse_map("node A 0 0 waypoint\nedge A Z 5 1\n");
        FAIL("expected SemanticError");
    } catch (const SemanticError& e) {
        CHECK(std::string(e.what()).find("Z") != std::string::npos);
    }
}

TEST_CASE("parse_map rejects edges shorter than the euclidean distance") {
    // |AB| = 10 but the declared length is 5: recompute the distance from the
    // node coordinates and reject.
    const std::string doc =
        "node A 0 0 waypoint\nnode B 10 0 waypoint\nedge A B 5 3\n";
    CHECK_THROWS_AS(parse_map(doc), SemanticError);
    // The boundary case is accepted (within tolerance).
    CHECK_NOTHROW(parse_map("node A 0 0 waypoint\nnode B 10 0 waypoint\nedge A B 10 3\n"));
}

TEST_CASE("parse_map rejects duplicate ids, self loops and bad limits") {
    CHECK_THROWS_AS(parse_map("node A 0 0 waypoint\nnode A 1 1 waypoint\n"), SemanticError);
    CHECK_THROWS_AS(parse_map("node A 0 0 waypoint\nedge A A 1 1\n"), SemanticError);
    CHECK_THROWS_AS(
        parse_map("node A 0 0 waypoint\nnode B 1 0 waypoint\nedge A B 1 0\n"), SemanticError);
    CHECK_THROWS_AS(parse_map("node A 0 0 waypoint\nnode B 1 0 waypoint\n"
                              "edge A B 1 1\nedge A B 2 1\n"),
                    SemanticError);
    CHECK_THROWS_AS(parse_map("obstacle 0 0 0 5\n"), SemanticError);
    CHECK_THROWS_AS(parse_map("stop s 0 0 -1\n"), SemanticError);
}

TEST_CASE("parse_map rejects non-finite coordinates") {
    CHECK_THROWS_AS(parse_map("node A nan 0 waypoint\n"), SemanticError);
    CHECK_THROWS_AS(parse_map("node A inf 0 waypoint\n"), SemanticError);
    CHECK_THROWS_AS(parse_map("stop s1 0 nan 5\n"), SemanticError);
}

TEST_CASE("serialize round-trips arbitrary maps exactly") {
    std::mt19937_64 rng(0x5eed0002);
    for (int iter = 0; iter < 20; ++iter) {
        MapFile original;
        original.graph = testing::random_graph(rng, 12);
        original.stops.push_back({"s1", {1.25, -3.75}, 12.5});
        original.obstacles.push_back({{0.1, 0.2}, 0.7, 3.0, 9.0});

        const MapFile reparsed = parse_map(serialize(original));
        REQUIRE(reparsed.graph.nodes().size() == original.graph.nodes().size());
        REQUIRE(reparsed.graph.edges().size() == original.graph.edges().size());
        for (std::size_t i = 0; i < original.graph.nodes().size(); ++i) {
            CHECK(reparsed.graph.nodes()[i].id == original.graph.nodes()[i].id);
            CHECK(reparsed.graph.nodes()[i].position == original.graph.nodes()[i].position);
            CHECK(reparsed.graph.nodes()[i].kind == original.graph.nodes()[i].kind);
        }
        for (std::size_t i = 0; i < original.graph.edges().size(); ++i) {
            CHECK(reparsed.graph.edges()[i].length == original.graph.edges()[i].length);
            CHECK(reparsed.graph.edges()[i].speed_limit ==
                  original.graph.edges()[i].speed_limit);
        }
        CHECK(reparsed.stops[0].position == original.stops[0].position);
        CHECK(reparsed.obstacles[0].disappears_at == original.obstacles[0].disappears_at);
    }
}

TEST_CASE("nearest_node identity and tie-break") {
    const auto map = parse_map("node A 0 0 waypoint\n"
                               "node B 10 0 waypoint\n"
                               "edge A B 10 3\n");
    const auto on_node = nearest_node(map.graph, {0.0, 0.0});
    CHECK(on_node.id == "A");
    CHECK(on_node.distance == 0.0);

    // p is 5 m from both A and B: the lexicographically smallest id wins.
    const auto tie = nearest_node(map.graph, {5.0, 0.0});
    CHECK(tie.id == "A");
    CHECK(tie.distance == doctest::Approx(5.0));

    CHECK_THROWS_AS(nearest_node(MapGraph{}, {0.0, 0.0}), EmptyGraph);
}

TEST_CASE("nearest_node matches an exhaustive scan on random graphs") {
    std::mt19937_64 rng(0x5eed0003);
    std::uniform_real_distribution<double> coord(-50.0, 150.0);
    for (int iter = 0; iter < 50; ++iter) {
        const MapGraph g = testing::random_graph(rng, 10);
        const Vec2 p{coord(rng), coord(rng)};
        const auto got = nearest_node(g, p);

        double best = std::numeric_limits<double>::infinity();
        for (const MapNode& n : g.nodes()) {
            best = std::min(best, distance(n.position, p));
        }
        CHECK(got.distance == doctest::Approx(best).epsilon(1e-12));
        // The result distance is a lower bound over every node.
        for (const MapNode& n : g.nodes()) {
            CHECK(got.distance <= distance(n.position, p) + 1e-12);
        }
    }
}
