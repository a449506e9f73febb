#include "ctsim/global_planner.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <queue>

#include "ctsim/errors.hpp"

namespace cts {

namespace {

// Dijkstra label carrying the full tie-break state. Appending an edge
// preserves the ordering (same suffix, equal-length sequences), so settling
// nodes in label order yields the unique minimal route.
struct Label {
    double dist = std::numeric_limits<double>::infinity();
    std::size_t hops = 0;
    std::vector<std::size_t> seq;  // node indices from the source

    bool operator<(const Label& o) const {
        if (dist != o.dist) return dist < o.dist;
        if (hops != o.hops) return hops < o.hops;
        return seq < o.seq;
    }
};

struct QueueEntry {
    Label label;
    std::size_t node;
    bool operator>(const QueueEntry& o) const { return o.label < label; }
};

}  // namespace

GlobalPath plan_route(const MapGraph& graph, Vec2 start, Vec2 goal) {
    if (graph.nodes().empty()) {
        throw EmptyGraph("plan_route on empty graph");
    }
    const std::size_t source = graph.node_index(nearest_node(graph, start).id);
    const std::size_t target = graph.node_index(nearest_node(graph, goal).id);

    // Node-index sequences must tie-break by id, not by index.
    std::vector<std::size_t> id_rank(graph.nodes().size());
    {
        std::vector<std::size_t> order(graph.nodes().size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return graph.nodes()[a].id < graph.nodes()[b].id;
        });
        for (std::size_t rank = 0; rank < order.size(); ++rank) id_rank[order[rank]] = rank;
    }

    std::vector<std::optional<Label>> settled(graph.nodes().size());
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> queue;
    queue.push({Label{0.0, 0, {id_rank[source]}}, source});

    std::vector<std::optional<Label>> best(graph.nodes().size());
    std::vector<std::size_t> via_edge(graph.nodes().size(), static_cast<std::size_t>(-1));
    std::vector<std::size_t> via_node(graph.nodes().size(), static_cast<std::size_t>(-1));

    while (!queue.empty()) {
        QueueEntry entry = queue.top();
        queue.pop();
        const std::size_t u = entry.node;
        if (settled[u]) {
            continue;
        }
        settled[u] = entry.label;
        if (u == target) {
            break;
        }
        for (const std::size_t e : graph.out_edges(u)) {
            const MapEdge& edge = graph.edges()[e];
            const std::size_t v = graph.node_index(edge.to);
            if (settled[v]) {
                continue;
            }
            Label cand;
            cand.dist = entry.label.dist + edge.length;
            cand.hops = entry.label.hops + 1;
            cand.seq = entry.label.seq;
            cand.seq.push_back(id_rank[v]);
            if (!best[v] || cand < *best[v]) {
                best[v] = cand;
                via_edge[v] = e;
                via_node[v] = u;
                queue.push({std::move(cand), v});
            }
        }
    }

    if (!settled[target]) {
        throw NoRoute("no route from '" + graph.nodes()[source].id + "' to '" +
                      graph.nodes()[target].id + "'");
    }

    GlobalPath path;
    std::vector<std::size_t> rev_nodes;
    std::vector<std::size_t> rev_edges;
    for (std::size_t n = target; n != source; n = via_node[n]) {
        rev_nodes.push_back(n);
        rev_edges.push_back(via_edge[n]);
    }
    rev_nodes.push_back(source);

    for (auto it = rev_nodes.rbegin(); it != rev_nodes.rend(); ++it) {
        path.nodes.push_back(graph.nodes()[*it].id);
        path.node_positions.push_back(graph.nodes()[*it].position);
    }
    for (auto it = rev_edges.rbegin(); it != rev_edges.rend(); ++it) {
        path.edge_indices.push_back(*it);
        path.total_length += graph.edges()[*it].length;
    }
    return path;
}

std::size_t nearest_segment(const GlobalPath& path, Vec2 p) {
    if (path.segment_count() == 0) {
        return 0;
    }
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < path.node_positions.size(); ++i) {
        const double d2 =
            project_on_segment(path.node_positions[i], path.node_positions[i + 1], p).dist2;
        if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
        }
    }
    return best;
}

}  // namespace cts
