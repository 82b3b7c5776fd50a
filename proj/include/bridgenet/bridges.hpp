#pragma once
// Bridging-node detection.
//
// The pipeline route decomposes the graph into chains (DFS tree + one chain per
// back edge), ranks nodes by betweenness, and confirms each candidate with a
// removal test. The exact route takes articulation points directly; both
// attach the same removal evidence.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "bridgenet/centrality.hpp"
#include "bridgenet/common.hpp"
#include "bridgenet/detail/parallel.hpp"
#include "bridgenet/graph.hpp"

namespace bridgenet {

struct Chain {
    std::vector<NodeIndex> nodes;  // nodes.front() is the chain's first vertex
    std::vector<EdgeIndex> edges;
    bool is_cycle = false;
};

struct ChainDecomposition {
    std::vector<NodeIndex> dfs_order;                  // preorder over the DFS forest
    std::vector<std::optional<NodeIndex>> parent;      // nullopt for roots
    std::vector<int> component;                        // DFS tree id per node
    std::vector<Chain> chains;                         // in discovery order
    std::vector<EdgeIndex> bridge_edges;               // edges in no chain, ascending
    std::vector<NodeIndex> cut_vertices;               // derived from chains and bridges, ascending
    bool two_edge_connected = false;
};

// Chains are found by visiting vertices in DFS preorder; for each back edge
// leading down from v, walk from the descendant up the tree until an already
// visited vertex. Edges covered by no chain are exactly the bridges. A vertex
// is a cut vertex iff it has degree >= 2 and touches a bridge, or it starts a
// cycle chain other than the first chain of its tree.
inline ChainDecomposition chain_decompose(const Graph& g) {
    const std::size_t n = g.n();
    constexpr std::uint32_t kUnseen = std::numeric_limits<std::uint32_t>::max();
    ChainDecomposition out;
    out.parent.assign(n, std::nullopt);
    out.component.assign(n, -1);
    std::vector<std::uint32_t> pre(n, kUnseen);
    std::vector<EdgeIndex> parent_edge(n, std::numeric_limits<EdgeIndex>::max());
    std::vector<char> is_tree_edge(g.m(), 0);

    int trees = 0;
    std::vector<std::pair<NodeIndex, std::size_t>> stack;
    for (NodeIndex root = 0; root < n; ++root) {
        if (pre[root] != kUnseen) continue;
        const int tree = trees++;
        pre[root] = static_cast<std::uint32_t>(out.dfs_order.size());
        out.dfs_order.push_back(root);
        out.component[root] = tree;
        stack.emplace_back(root, 0);
        while (!stack.empty()) {
            auto& [v, next] = stack.back();
            const auto nbrs = g.neighbors(v);
            if (next == nbrs.size()) {
                stack.pop_back();
                continue;
            }
            const Incidence inc = nbrs[next++];
            if (pre[inc.to] != kUnseen) continue;
            pre[inc.to] = static_cast<std::uint32_t>(out.dfs_order.size());
            out.dfs_order.push_back(inc.to);
            out.component[inc.to] = tree;
            out.parent[inc.to] = v;
            parent_edge[inc.to] = inc.edge;
            is_tree_edge[inc.edge] = 1;
            stack.emplace_back(inc.to, 0);
        }
    }

    std::vector<char> visited(n, 0), in_chain(g.m(), 0);
    std::vector<int> first_chain_of_tree(trees, -1);
    std::vector<char> cut(n, 0);
    for (NodeIndex v : out.dfs_order) {
        for (const auto& inc : g.neighbors(v)) {
            // Back edges, oriented from the ancestor v down to descendant w.
            if (is_tree_edge[inc.edge] || pre[inc.to] < pre[v]) continue;
            visited[v] = 1;
            Chain chain;
            chain.nodes = {v, inc.to};
            chain.edges = {inc.edge};
            in_chain[inc.edge] = 1;
            NodeIndex x = inc.to;
            while (!visited[x]) {
                visited[x] = 1;
                in_chain[parent_edge[x]] = 1;
                chain.edges.push_back(parent_edge[x]);
                x = *out.parent[x];
                chain.nodes.push_back(x);
            }
            chain.is_cycle = x == v;
            const int tree = out.component[v];
            const int index = static_cast<int>(out.chains.size());
            if (first_chain_of_tree[tree] == -1) first_chain_of_tree[tree] = index;
            else if (chain.is_cycle) cut[v] = 1;
            out.chains.push_back(std::move(chain));
        }
    }
    for (EdgeIndex e = 0; e < g.m(); ++e) {
        if (in_chain[e]) continue;
        out.bridge_edges.push_back(e);
        const auto& edge = g.edges()[e];
        if (g.degree(edge.u) >= 2) cut[edge.u] = 1;
        if (g.degree(edge.v) >= 2) cut[edge.v] = 1;
    }
    for (NodeIndex v = 0; v < n; ++v)
        if (cut[v]) out.cut_vertices.push_back(v);
    out.two_edge_connected = trees == 1 && out.bridge_edges.empty();
    return out;
}

struct BridgeFinding {
    NodeIndex node = 0;
    std::string id;
    bool is_bridge = false;
    // False for nodes the pipeline route never put through the removal test.
    bool tested = true;
    double betweenness = 0.0;
    int component_delta = 0;
    std::size_t disconnected_pairs = 0;  // neighbour pairs left without a path
};

// Candidates ordered by descending betweenness (ties by node index): the top
// ceil(top_fraction * n) nodes with nonzero betweenness, plus every bridge-edge
// endpoint and chain-derived cut vertex.
inline std::vector<NodeIndex> candidate_bridging_nodes(const Graph& g, double top_fraction,
                                                       const ChainDecomposition& chains,
                                                       std::span<const double> betweenness_scores) {
    if (!(top_fraction > 0.0 && top_fraction <= 1.0)) throw ConfigError("top_fraction must lie in (0, 1]");
    std::vector<NodeIndex> by_rank(g.n());
    std::iota(by_rank.begin(), by_rank.end(), NodeIndex{0});
    auto before = [&](NodeIndex a, NodeIndex b) {
        return betweenness_scores[a] != betweenness_scores[b] ? betweenness_scores[a] > betweenness_scores[b] : a < b;
    };
    std::sort(by_rank.begin(), by_rank.end(), before);
    const auto quota = static_cast<std::size_t>(std::ceil(top_fraction * static_cast<double>(g.n()) - 1e-9));
    std::set<NodeIndex> picked;
    for (std::size_t i = 0; i < by_rank.size() && i < quota; ++i)
        if (betweenness_scores[by_rank[i]] > 0.0) picked.insert(by_rank[i]);
    for (EdgeIndex e : chains.bridge_edges) {
        picked.insert(g.edges()[e].u);
        picked.insert(g.edges()[e].v);
    }
    picked.insert(chains.cut_vertices.begin(), chains.cut_vertices.end());
    std::vector<NodeIndex> out(picked.begin(), picked.end());
    std::sort(out.begin(), out.end(), before);
    return out;
}

inline std::vector<NodeIndex> candidate_bridging_nodes(const Graph& g, double top_fraction) {
    return candidate_bridging_nodes(g, top_fraction, chain_decompose(g), betweenness(g));
}

namespace detail {

inline BridgeFinding removal_evidence(const Graph& g, NodeIndex v, int base_count) {
    BridgeFinding f;
    f.node = v;
    f.id = g.node(v).id;
    std::vector<char> removed(g.n(), 0);
    removed[v] = 1;
    const auto after = connected_components(g, removed);
    f.component_delta = after.count - base_count;
    f.is_bridge = f.component_delta > 0;
    // Neighbours were mutually reachable through v; pairs now in different
    // components lost every path.
    std::map<int, std::size_t> groups;
    for (const auto& inc : g.neighbors(v)) ++groups[after.component[inc.to]];
    const std::size_t d = g.degree(v);
    std::size_t same = 0;
    for (const auto& [_, k] : groups) same += k * (k - 1) / 2;
    f.disconnected_pairs = d * (d - 1) / 2 - same;
    return f;
}

}  // namespace detail

// Removal test per candidate; output sorted by node index.
inline std::vector<BridgeFinding> verify_bridging(const Graph& g, std::span<const NodeIndex> candidates,
                                                  unsigned threads = 1) {
    for (NodeIndex v : candidates)
        if (v >= g.n()) throw Error("verify_bridging: candidate out of range");
    std::vector<NodeIndex> sorted(candidates.begin(), candidates.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    const int base = connected_components(g).count;
    std::vector<BridgeFinding> out(sorted.size());
    detail::parallel_chunks(sorted.size(), threads, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) out[i] = detail::removal_evidence(g, sorted[i], base);
    });
    return out;
}

enum class BridgeMode { paper_pipeline, exact };

inline std::optional<BridgeMode> parse_bridge_mode(std::string_view s) {
    if (s == "paper-pipeline" || s == "pipeline") return BridgeMode::paper_pipeline;
    if (s == "exact") return BridgeMode::exact;
    return std::nullopt;
}

inline constexpr std::string_view to_string(BridgeMode m) noexcept {
    return m == BridgeMode::exact ? "exact" : "paper-pipeline";
}

struct BridgeOptions {
    BridgeMode mode = BridgeMode::paper_pipeline;
    double top_fraction = 0.1;
    // Test each cluster's induced subgraph separately (nodes need cluster ids).
    bool per_cluster = false;
    unsigned threads = 1;
};

struct BridgeReport {
    BridgeMode mode = BridgeMode::paper_pipeline;
    std::vector<BridgeFinding> findings;  // one per node, by node index
    std::size_t bridge_count = 0;
    double bridging_proportion = 0.0;     // bridges / n

    std::vector<NodeIndex> bridging_nodes() const {
        std::vector<NodeIndex> out;
        for (const auto& f : findings)
            if (f.is_bridge) out.push_back(f.node);
        return out;
    }
};

namespace detail {

inline std::vector<BridgeFinding> find_in_graph(const Graph& g, const BridgeOptions& opts) {
    const auto bc = betweenness(g, {.exact = true, .threads = opts.threads});
    std::vector<BridgeFinding> findings(g.n());
    for (NodeIndex v = 0; v < g.n(); ++v) {
        auto& f = findings[v];
        f.node = v;
        f.id = g.node(v).id;
        f.betweenness = bc[v];
        f.component_delta = g.degree(v) == 0 ? -1 : 0;
    }
    std::vector<NodeIndex> tested;
    if (opts.mode == BridgeMode::exact) {
        tested = articulation_points(g);
    } else {
        tested = candidate_bridging_nodes(g, opts.top_fraction, chain_decompose(g), bc);
        std::vector<char> is_candidate(g.n(), 0);
        for (NodeIndex v : tested) is_candidate[v] = 1;
        for (NodeIndex v = 0; v < g.n(); ++v) findings[v].tested = is_candidate[v] != 0;
    }
    for (auto& f : verify_bridging(g, tested, opts.threads)) {
        f.betweenness = bc[f.node];
        findings[f.node] = std::move(f);
    }
    return findings;
}

}  // namespace detail

inline BridgeReport find_bridging_nodes(const Graph& g, const BridgeOptions& opts = {}) {
    BridgeReport report;
    report.mode = opts.mode;
    if (!opts.per_cluster) {
        report.findings = detail::find_in_graph(g, opts);
    } else {
        report.findings.resize(g.n());
        std::map<int, std::vector<NodeIndex>> groups;
        int unclustered = -1;
        for (NodeIndex v = 0; v < g.n(); ++v) {
            const auto c = g.node(v).cluster;
            groups[c ? *c : unclustered--].push_back(v);
        }
        for (const auto& [_, members] : groups) {
            const Graph sub = g.induced(members);
            auto sub_findings = detail::find_in_graph(sub, opts);
            for (std::size_t i = 0; i < members.size(); ++i) {
                sub_findings[i].node = members[i];
                report.findings[members[i]] = std::move(sub_findings[i]);
            }
        }
    }
    for (const auto& f : report.findings) report.bridge_count += f.is_bridge ? 1 : 0;
    report.bridging_proportion = g.n() ? static_cast<double>(report.bridge_count) / static_cast<double>(g.n()) : 0.0;
    return report;
}

inline nlohmann::json to_json(const BridgeFinding& f) {
    return {{"node", f.id},
            {"is_bridge", f.is_bridge},
            {"tested", f.tested},
            {"betweenness", f.betweenness},
            {"component_delta", f.component_delta},
            {"disconnected_pairs", f.disconnected_pairs}};
}

inline nlohmann::json findings_json(const BridgeReport& r) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& f : r.findings) arr.push_back(to_json(f));
    return arr;
}

}  // namespace bridgenet
