#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ctsim/geometry.hpp"

namespace cts {

enum class NodeKind { waypoint, intersection, roundabout_point, station };

NodeKind node_kind_from_name(std::string_view name);
std::string_view node_kind_name(NodeKind kind);

struct MapNode {
    std::string id;
    Vec2 position;
    NodeKind kind = NodeKind::waypoint;
};

struct MapEdge {
    std::string from;
    std::string to;
    double length = 0.0;       // meters, >= euclidean node distance
    double speed_limit = 0.0;  // m/s, > 0
};

/// Directed road network. Immutable after construction; the constructor
/// enforces the structural invariants (unique ids, resolvable endpoints,
/// length >= straight-line distance, no duplicate directed edges).
class MapGraph {
public:
    MapGraph() = default;
    MapGraph(std::vector<MapNode> nodes, std::vector<MapEdge> edges);

    const std::vector<MapNode>& nodes() const { return nodes_; }
    const std::vector<MapEdge>& edges() const { return edges_; }

    bool has_node(std::string_view id) const;
    std::size_t node_index(std::string_view id) const;  // throws SemanticError
    const MapNode& node(std::string_view id) const;

    /// Indices into edges() of the edges leaving the given node.
    const std::vector<std::size_t>& out_edges(std::size_t node_idx) const;

private:
    std::vector<MapNode> nodes_;
    std::vector<MapEdge> edges_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::vector<std::size_t>> adjacency_;
};

struct StopPointSpec {
    std::string id;
    Vec2 position;
    double stop_duration = 0.0;  // seconds, dwell time once stopped
};

struct ObstacleSpec {
    Vec2 position;
    double radius = 0.0;
    double appears_at = 0.0;
    double disappears_at = std::numeric_limits<double>::infinity();
};

/// Parsed map document: road graph plus the scheduled stops and scripted
/// obstacles defined alongside it.
struct MapFile {
    MapGraph graph;
    std::vector<StopPointSpec> stops;
    std::vector<ObstacleSpec> obstacles;
};

/// Parses the line-oriented map format:
///   node <id> <x> <y> <kind>
///   edge <from> <to> <length> <speed_limit>
///   stop <id> <x> <y> <duration_s>
///   obstacle <x> <y> <radius> <appears_at_s> [disappears_at_s]
/// '#' starts a comment; blank lines are ignored. Unknown record tags are
/// rejected. Throws SyntaxError (with line number) or SemanticError.
MapFile parse_map(std::string_view text);

MapFile load_map(const std::filesystem::path& path);

/// Inverse of parse_map; parse(serialize(m)) reproduces m exactly.
std::string serialize(const MapFile& map);

struct NearestNode {
    std::string id;
    double distance = 0.0;
};

/// Node minimizing euclidean distance to p; ties resolve to the
/// lexicographically smallest id. Throws EmptyGraph.
NearestNode nearest_node(const MapGraph& graph, Vec2 p);

}  // namespace cts
