#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ctsim/geometry.hpp"
#include "ctsim/map_model.hpp"

namespace cts {

/// Route over the road graph as a sequence of intersection points.
struct GlobalPath {
    std::vector<std::string> nodes;            // length >= 1
    std::vector<std::size_t> edge_indices;     // into graph.edges(), length = nodes-1
    std::vector<Vec2> node_positions;          // convenience copy, same length as nodes
    double total_length = 0.0;

    std::size_t segment_count() const { return nodes.empty() ? 0 : nodes.size() - 1; }
};

/// Shortest route (by total edge length) between the nodes nearest to start
/// and goal. Ties resolve to fewer edges, then to the lexicographically
/// smallest node-id sequence, so the result is deterministic.
/// Throws EmptyGraph or NoRoute.
GlobalPath plan_route(const MapGraph& graph, Vec2 start, Vec2 goal);

/// Index of the path segment (node i -> node i+1) closest to p; ties resolve
/// to the smallest index. Returns 0 for single-node paths.
std::size_t nearest_segment(const GlobalPath& path, Vec2 p);

}  // namespace cts
