#pragma once
// Undirected weighted graph with node attributes, plus the traversal
// primitives the bridging analysis is built on: components, hop distances,
// articulation points and single-node removal deltas.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

#include "bridgenet/common.hpp"
#include "bridgenet/detail/io.hpp"

namespace bridgenet {

using NodeIndex = std::uint32_t;
using EdgeIndex = std::uint32_t;

enum class NodeKind : std::uint8_t { content, user };

inline constexpr std::string_view to_string(NodeKind k) noexcept { return k == NodeKind::content ? "content" : "user"; }

struct NodeAttributes {
    std::string id;
    NodeKind kind = NodeKind::content;
    std::optional<Platform> platform;
    std::optional<int> cluster;
    std::map<std::string, std::string> labels;

    bool operator==(const NodeAttributes&) const = default;
};

struct Edge {
    NodeIndex u = 0;  // u < v
    NodeIndex v = 0;
    double weight = 1.0;

    bool operator==(const Edge&) const = default;
};

struct Incidence {
    NodeIndex to = 0;
    EdgeIndex edge = 0;
};

class Graph {
public:
    Graph() = default;

    NodeIndex add_node(NodeAttributes attrs) {
        if (index_.contains(attrs.id)) throw Error("duplicate node id '" + attrs.id + "'");
        const auto idx = static_cast<NodeIndex>(nodes_.size());
        index_.emplace(attrs.id, idx);
        nodes_.push_back(std::move(attrs));
        adj_.emplace_back();
        return idx;
    }

    EdgeIndex add_edge(NodeIndex a, NodeIndex b, double weight = 1.0) {
        if (a >= n() || b >= n()) throw Error("edge endpoint out of range");
        if (a == b) throw Error("self-loop on node '" + nodes_[a].id + "'");
        if (has_edge(a, b)) throw Error("duplicate edge " + nodes_[a].id + " - " + nodes_[b].id);
        const auto e = static_cast<EdgeIndex>(edges_.size());
        edges_.push_back({std::min(a, b), std::max(a, b), weight});
        adj_[a].push_back({b, e});
        adj_[b].push_back({a, e});
        return e;
    }

    std::size_t n() const noexcept { return nodes_.size(); }
    std::size_t m() const noexcept { return edges_.size(); }

    const NodeAttributes& node(NodeIndex i) const { return nodes_.at(i); }
    NodeAttributes& node(NodeIndex i) { return nodes_.at(i); }
    std::span<const NodeAttributes> nodes() const noexcept { return nodes_; }
    std::span<const Edge> edges() const noexcept { return edges_; }
    std::span<const Incidence> neighbors(NodeIndex i) const { return adj_.at(i); }
    std::size_t degree(NodeIndex i) const { return adj_.at(i).size(); }

    std::optional<NodeIndex> find(std::string_view id) const {
        auto it = index_.find(std::string(id));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    NodeIndex index_of(std::string_view id) const {
        auto i = find(id);
        if (!i) throw Error("unknown node '" + std::string(id) + "'");
        return *i;
    }

    bool has_edge(NodeIndex a, NodeIndex b) const {
        const auto& small = adj_[a].size() <= adj_[b].size() ? adj_[a] : adj_[b];
        const NodeIndex other = adj_[a].size() <= adj_[b].size() ? b : a;
        return std::any_of(small.begin(), small.end(), [&](const Incidence& inc) { return inc.to == other; });
    }

    // Subgraph on `keep` (in the given order), attributes copied.
    Graph induced(std::span<const NodeIndex> keep) const {
        Graph out;
        std::vector<NodeIndex> remap(n(), std::numeric_limits<NodeIndex>::max());
        for (NodeIndex v : keep) remap[v] = out.add_node(nodes_.at(v));
        for (const auto& e : edges_)
            if (remap[e.u] != std::numeric_limits<NodeIndex>::max() && remap[e.v] != std::numeric_limits<NodeIndex>::max())
                out.add_edge(remap[e.u], remap[e.v], e.weight);
        return out;
    }

private:
    std::vector<NodeAttributes> nodes_;
    std::vector<Edge> edges_;
    std::vector<std::vector<Incidence>> adj_;
    std::unordered_map<std::string, NodeIndex> index_;
};

// ---------------------------------------------------------------------------
// Components and distances. `removed` masks nodes out without touching the graph.

struct ComponentLabeling {
    std::vector<int> component;  // -1 for masked-out nodes
    int count = 0;
};

inline ComponentLabeling connected_components(const Graph& g, std::span<const char> removed = {}) {
    ComponentLabeling out;
    out.component.assign(g.n(), -1);
    std::vector<NodeIndex> stack;
    for (NodeIndex s = 0; s < g.n(); ++s) {
        if (out.component[s] != -1 || (!removed.empty() && removed[s])) continue;
        const int id = out.count++;
        out.component[s] = id;
        stack.push_back(s);
        while (!stack.empty()) {
            const NodeIndex v = stack.back();
            stack.pop_back();
            for (const auto& inc : g.neighbors(v)) {
                if (out.component[inc.to] != -1 || (!removed.empty() && removed[inc.to])) continue;
                out.component[inc.to] = id;
                stack.push_back(inc.to);
            }
        }
    }
    return out;
}

inline constexpr int kUnreachable = -1;

// Hop distances from s; kUnreachable where no path exists.
inline std::vector<int> bfs_distances(const Graph& g, NodeIndex s, std::span<const char> removed = {}) {
    std::vector<int> dist(g.n(), kUnreachable);
    if (!removed.empty() && removed[s]) return dist;
    std::queue<NodeIndex> q;
    dist[s] = 0;
    q.push(s);
    while (!q.empty()) {
        const NodeIndex v = q.front();
        q.pop();
        for (const auto& inc : g.neighbors(v)) {
            if (dist[inc.to] != kUnreachable || (!removed.empty() && removed[inc.to])) continue;
            dist[inc.to] = dist[v] + 1;
            q.push(inc.to);
        }
    }
    return dist;
}

// nullopt means unreachable.
inline std::optional<std::size_t> shortest_path_len(const Graph& g, NodeIndex s, NodeIndex t) {
    if (s >= g.n() || t >= g.n()) throw Error("unknown node index");
    if (s == t) return 0;
    const int d = bfs_distances(g, s)[t];
    if (d == kUnreachable) return std::nullopt;
    return static_cast<std::size_t>(d);
}

inline std::optional<std::size_t> shortest_path_len(const Graph& g, std::string_view s, std::string_view t) {
    return shortest_path_len(g, g.index_of(s), g.index_of(t));
}

// Iterative DFS low-link; linear time. Result sorted by node index.
inline std::vector<NodeIndex> articulation_points(const Graph& g) {
    const std::size_t n = g.n();
    constexpr std::uint32_t kUnvisited = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> disc(n, kUnvisited), low(n, 0);
    std::vector<char> is_cut(n, 0);
    struct Frame {
        NodeIndex v;
        EdgeIndex parent_edge;
        std::size_t next;
    };
    std::vector<Frame> stack;
    std::uint32_t timer = 0;
    constexpr EdgeIndex kNoEdge = std::numeric_limits<EdgeIndex>::max();
    for (NodeIndex root = 0; root < n; ++root) {
        if (disc[root] != kUnvisited) continue;
        std::size_t root_children = 0;
        disc[root] = low[root] = timer++;
        stack.push_back({root, kNoEdge, 0});
        while (!stack.empty()) {
            Frame& f = stack.back();
            const auto nbrs = g.neighbors(f.v);
            if (f.next < nbrs.size()) {
                const Incidence inc = nbrs[f.next++];
                if (inc.edge == f.parent_edge) continue;
                if (disc[inc.to] == kUnvisited) {
                    disc[inc.to] = low[inc.to] = timer++;
                    if (f.v == root) ++root_children;
                    stack.push_back({inc.to, inc.edge, 0});
                } else {
                    low[f.v] = std::min(low[f.v], disc[inc.to]);
                }
                continue;
            }
            const NodeIndex child = f.v;
            stack.pop_back();
            if (stack.empty()) break;
            const NodeIndex parent = stack.back().v;
            low[parent] = std::min(low[parent], low[child]);
            if (parent != root && low[child] >= disc[parent]) is_cut[parent] = 1;
        }
        if (root_children >= 2) is_cut[root] = 1;
    }
    std::vector<NodeIndex> out;
    for (NodeIndex v = 0; v < n; ++v)
        if (is_cut[v]) out.push_back(v);
    return out;
}

struct PairDistance {
    NodeIndex a = 0;
    NodeIndex b = 0;
    std::size_t before = 0;
    std::optional<std::size_t> after;  // nullopt: unreachable once v is gone
};

struct RemovalDelta {
    int component_delta = 0;
    std::vector<PairDistance> neighbor_pairs;
};

inline int component_delta(const Graph& g, NodeIndex v, int base_count) {
    std::vector<char> removed(g.n(), 0);
    removed[v] = 1;
    return connected_components(g, removed).count - base_count;
}

// Effect of deleting v (and its edges) on the component count and on the hop
// distance of every unordered pair of v's neighbours.
inline RemovalDelta remove_node_delta(const Graph& g, NodeIndex v) {
    if (v >= g.n()) throw Error("unknown node index");
    RemovalDelta out;
    std::vector<char> removed(g.n(), 0);
    removed[v] = 1;
    out.component_delta = connected_components(g, removed).count - connected_components(g).count;

    std::vector<NodeIndex> nbrs;
    for (const auto& inc : g.neighbors(v)) nbrs.push_back(inc.to);
    std::sort(nbrs.begin(), nbrs.end());
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
        const auto before = bfs_distances(g, nbrs[i]);
        const auto after = bfs_distances(g, nbrs[i], removed);
        for (std::size_t j = i + 1; j < nbrs.size(); ++j) {
            PairDistance pd{nbrs[i], nbrs[j], static_cast<std::size_t>(before[nbrs[j]]), std::nullopt};
            if (after[nbrs[j]] != kUnreachable) pd.after = static_cast<std::size_t>(after[nbrs[j]]);
            out.neighbor_pairs.push_back(pd);
        }
    }
    return out;
}

inline RemovalDelta remove_node_delta(const Graph& g, std::string_view id) { return remove_node_delta(g, g.index_of(id)); }

// ---------------------------------------------------------------------------
// Graph files: `<path>` holds `id_a<TAB>id_b<TAB>weight` lines, `<path>.nodes.jsonl`
// holds one attribute object per node (isolated nodes survive the round trip).

inline std::filesystem::path node_sidecar_path(const std::filesystem::path& p) {
    auto s = p;
    s += ".nodes.jsonl";
    return s;
}

inline nlohmann::json to_json(const NodeAttributes& a) {
    nlohmann::json j{{"id", a.id}, {"kind", to_string(a.kind)}};
    j["platform"] = a.platform ? nlohmann::json(to_string(*a.platform)) : nlohmann::json(nullptr);
    j["cluster"] = a.cluster ? nlohmann::json(*a.cluster) : nlohmann::json(nullptr);
    j["labels"] = a.labels;
    return j;
}

inline NodeAttributes node_from_json(const nlohmann::json& j) {
    NodeAttributes a;
    a.id = j.at("id").get<std::string>();
    const auto kind = j.value("kind", std::string("content"));
    if (kind == "content") a.kind = NodeKind::content;
    else if (kind == "user") a.kind = NodeKind::user;
    else throw Error("unknown node kind '" + kind + "'");
    if (auto it = j.find("platform"); it != j.end() && !it->is_null()) {
        auto p = parse_platform(it->get<std::string>());
        if (!p) throw Error("unknown platform for node '" + a.id + "'");
        a.platform = *p;
    }
    if (auto it = j.find("cluster"); it != j.end() && !it->is_null()) a.cluster = it->get<int>();
    if (auto it = j.find("labels"); it != j.end()) a.labels = it->get<std::map<std::string, std::string>>();
    return a;
}

inline std::string edge_list_text(const Graph& g) {
    std::string out;
    for (const auto& e : g.edges()) {
        out += g.node(e.u).id;
        out += '\t';
        out += g.node(e.v).id;
        out += '\t';
        out += detail::format_double(e.weight);
        out += '\n';
    }
    return out;
}

inline std::string node_sidecar_text(const Graph& g) {
    std::string out;
    for (const auto& a : g.nodes()) {
        out += to_json(a).dump();
        out += '\n';
    }
    return out;
}

inline void write_graph(const std::filesystem::path& path, const Graph& g) {
    for (const auto& a : g.nodes())
        if (a.id.find_first_of("\t\n\r") != std::string::npos) throw Error("node id contains a tab or newline: " + a.id);
    detail::atomic_write(node_sidecar_path(path), node_sidecar_text(g));
    detail::atomic_write(path, edge_list_text(g));
}

inline Graph read_graph(const std::filesystem::path& path) {
    Graph g;
    {
        std::ifstream in(node_sidecar_path(path));
        if (!in) throw Error("missing node sidecar " + node_sidecar_path(path).string());
        std::string line;
        while (std::getline(in, line))
            if (line.find_first_not_of(" \t\r") != std::string::npos) g.add_node(node_from_json(nlohmann::json::parse(line)));
    }
    std::ifstream in(path);
    if (!in) throw Error("cannot open graph " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string::npos) throw Error(path.string() + ":" + std::to_string(lineno) + ": expected 3 tab-separated fields");
        const double w = std::stod(line.substr(t2 + 1));
        g.add_edge(g.index_of(line.substr(0, t1)), g.index_of(line.substr(t1 + 1, t2 - t1 - 1)), w);
    }
    return g;
}

}  // namespace bridgenet
