#include "ctsim/map_model.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "ctsim/errors.hpp"

namespace cts {

namespace {

std::vector<std::string_view> tokenize(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
            ++i;
        }
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') {
            ++i;
        }
        if (i > start) {
            tokens.push_back(line.substr(start, i - start));
        }
    }
    return tokens;
}

double parse_double(std::string_view token, std::size_t line, std::string_view field) {
    double value = 0.0;
    const auto* begin = token.data();
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw SyntaxError(line, "invalid number '" + std::string(token) + "' for " +
                                    std::string(field));
    }
    return value;
}

void require_fields(const std::vector<std::string_view>& tokens, std::size_t n, std::size_t line) {
    if (tokens.size() != n) {
        throw SyntaxError(line, "expected " + std::to_string(n - 1) + " fields after '" +
                                    std::string(tokens[0]) + "', got " +
                                    std::to_string(tokens.size() - 1));
    }
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

NodeKind node_kind_from_name(std::string_view name) {
    if (name == "waypoint") return NodeKind::waypoint;
    if (name == "intersection") return NodeKind::intersection;
    if (name == "roundabout_point") return NodeKind::roundabout_point;
    if (name == "station") return NodeKind::station;
    throw SemanticError("unknown node kind '" + std::string(name) + "'");
}

std::string_view node_kind_name(NodeKind kind) {
    switch (kind) {
        case NodeKind::waypoint: return "waypoint";
        case NodeKind::intersection: return "intersection";
        case NodeKind::roundabout_point: return "roundabout_point";
        case NodeKind::station: return "station";
    }
    return "waypoint";
}

MapGraph::MapGraph(std::vector<MapNode> nodes, std::vector<MapEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
    index_.reserve(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const MapNode& n = nodes_[i];
        if (n.id.empty()) {
            throw SemanticError("node with empty id");
        }
        if (!std::isfinite(n.position.x) || !std::isfinite(n.position.y)) {
            throw SemanticError("node '" + n.id + "' has non-finite position");
        }
        if (!index_.emplace(n.id, i).second) {
            throw SemanticError("duplicate node id '" + n.id + "'");
        }
    }

    adjacency_.resize(nodes_.size());
    std::unordered_set<std::string> seen_pairs;
    seen_pairs.reserve(edges_.size());
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const MapEdge& edge = edges_[e];
        if (edge.from == edge.to) {
            throw SemanticError("edge '" + edge.from + "' -> '" + edge.to +
                                "' is a self loop");
        }
        const auto from_it = index_.find(edge.from);
        if (from_it == index_.end()) {
            throw SemanticError("edge references undefined node '" + edge.from + "'");
        }
        const auto to_it = index_.find(edge.to);
        if (to_it == index_.end()) {
            throw SemanticError("edge references undefined node '" + edge.to + "'");
        }
        if (!(edge.speed_limit > 0.0) || !std::isfinite(edge.speed_limit)) {
            throw SemanticError("edge '" + edge.from + "' -> '" + edge.to +
                                "' has non-positive speed limit");
        }
        const double straight =
            distance(nodes_[from_it->second].position, nodes_[to_it->second].position);
        if (!std::isfinite(edge.length) || edge.length < straight - 1e-9) {
            throw SemanticError("edge '" + edge.from + "' -> '" + edge.to + "' length " +
                                format_double(edge.length) +
                                " below straight-line distance " + format_double(straight));
        }
        if (!seen_pairs.insert(edge.from + "\x1f" + edge.to).second) {
            throw SemanticError("duplicate edge '" + edge.from + "' -> '" + edge.to + "'");
        }
        adjacency_[from_it->second].push_back(e);
    }
}

bool MapGraph::has_node(std::string_view id) const {
    return index_.find(std::string(id)) != index_.end();
}

std::size_t MapGraph::node_index(std::string_view id) const {
    const auto it = index_.find(std::string(id));
    if (it == index_.end()) {
        throw SemanticError("unknown node '" + std::string(id) + "'");
    }
    return it->second;
}

const MapNode& MapGraph::node(std::string_view id) const { return nodes_[node_index(id)]; }

const std::vector<std::size_t>& MapGraph::out_edges(std::size_t node_idx) const {
    return adjacency_.at(node_idx);
}

MapFile parse_map(std::string_view text) {
    std::vector<MapNode> nodes;
    std::vector<MapEdge> edges;
    std::vector<StopPointSpec> stops;
    std::vector<ObstacleSpec> obstacles;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                               : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        const auto tokens = tokenize(line);
        if (tokens.empty()) {
            continue;
        }

        const std::string_view tag = tokens[0];
        if (tag == "node") {
            require_fields(tokens, 5, line_no);
            MapNode n;
            n.id = std::string(tokens[1]);
            n.position.x = parse_double(tokens[2], line_no, "x");
            n.position.y = parse_double(tokens[3], line_no, "y");
            try {
                n.kind = node_kind_from_name(tokens[4]);
            } catch (const SemanticError& e) {
                throw SyntaxError(line_no, e.what());
            }
            nodes.push_back(std::move(n));
        } else if (tag == "edge") {
            require_fields(tokens, 5, line_no);
            MapEdge e;
            e.from = std::string(tokens[1]);
            e.to = std::string(tokens[2]);
            e.length = parse_double(tokens[3], line_no, "length");
            e.speed_limit = parse_double(tokens[4], line_no, "speed_limit");
            edges.push_back(std::move(e));
        } else if (tag == "stop") {
            require_fields(tokens, 5, line_no);
            StopPointSpec s;
            s.id = std::string(tokens[1]);
            s.position.x = parse_double(tokens[2], line_no, "x");
            s.position.y = parse_double(tokens[3], line_no, "y");
            s.stop_duration = parse_double(tokens[4], line_no, "duration_s");
            stops.push_back(std::move(s));
        } else if (tag == "obstacle") {
            if (tokens.size() != 5 && tokens.size() != 6) {
                throw SyntaxError(line_no, "expected 4 or 5 fields after 'obstacle'");
            }
            ObstacleSpec o;
            o.position.x = parse_double(tokens[1], line_no, "x");
            o.position.y = parse_double(tokens[2], line_no, "y");
            o.radius = parse_double(tokens[3], line_no, "radius");
            o.appears_at = parse_double(tokens[4], line_no, "appears_at_s");
            if (tokens.size() == 6) {
                o.disappears_at = parse_double(tokens[5], line_no, "disappears_at_s");
            }
            obstacles.push_back(o);
        } else {
            throw SyntaxError(line_no, "unknown record tag '" + std::string(tag) + "'");
        }
    }

    std::unordered_set<std::string> stop_ids;
    for (const StopPointSpec& s : stops) {
        if (!stop_ids.insert(s.id).second) {
            throw SemanticError("duplicate stop id '" + s.id + "'");
        }
        if (!std::isfinite(s.stop_duration) || s.stop_duration < 0.0) {
            throw SemanticError("stop '" + s.id + "' has invalid duration");
        }
        if (!std::isfinite(s.position.x) || !std::isfinite(s.position.y)) {
            throw SemanticError("stop '" + s.id + "' has non-finite position");
        }
    }
    for (const ObstacleSpec& o : obstacles) {
        if (!(o.radius > 0.0) || !std::isfinite(o.radius)) {
            throw SemanticError("obstacle radius must be > 0");
        }
        if (o.appears_at < 0.0 || !std::isfinite(o.appears_at)) {
            throw SemanticError("obstacle appears_at must be >= 0");
        }
        if (o.disappears_at <= o.appears_at) {
            throw SemanticError("obstacle disappears_at must exceed appears_at");
        }
    }

    MapFile file;
    file.graph = MapGraph(std::move(nodes), std::move(edges));
    file.stops = std::move(stops);
    file.obstacles = std::move(obstacles);
    return file;
}

MapFile load_map(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open map file '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_map(buf.str());
}

std::string serialize(const MapFile& map) {
    std::ostringstream out;
    for (const MapNode& n : map.graph.nodes()) {
        out << "node " << n.id << ' ' << format_double(n.position.x) << ' '
            << format_double(n.position.y) << ' ' << node_kind_name(n.kind) << '\n';
    }
    for (const MapEdge& e : map.graph.edges()) {
        out << "edge " << e.from << ' ' << e.to << ' ' << format_double(e.length) << ' '
            << format_double(e.speed_limit) << '\n';
    }
    for (const StopPointSpec& s : map.stops) {
        out << "stop " << s.id << ' ' << format_double(s.position.x) << ' '
            << format_double(s.position.y) << ' ' << format_double(s.stop_duration) << '\n';
    }
    for (const ObstacleSpec& o : map.obstacles) {
        out << "obstacle " << format_double(o.position.x) << ' ' << format_double(o.position.y)
            << ' ' << format_double(o.radius) << ' ' << format_double(o.appears_at);
        if (std::isfinite(o.disappears_at)) {
            out << ' ' << format_double(o.disappears_at);
        }
        out << '\n';
    }
    return out.str();
}

NearestNode nearest_node(const MapGraph& graph, Vec2 p) {
    if (graph.nodes().empty()) {
        throw EmptyGraph("nearest_node on empty graph");
    }
    const MapNode* best = nullptr;
    double best_d2 = 0.0;
    for (const MapNode& n : graph.nodes()) {
        const double d2 = distance2(n.position, p);
        if (best == nullptr || d2 < best_d2 || (d2 == best_d2 && n.id < best->id)) {
            best = &n;
            best_d2 = d2;
        }
    }
    return {best->id, std::sqrt(best_d2)};
}

}  // namespace cts
