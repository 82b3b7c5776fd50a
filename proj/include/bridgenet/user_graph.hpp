#pragma once
// Projection of the Content graph onto authors.

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

#include "bridgenet/common.hpp"
#include "bridgenet/graph.hpp"
#include "bridgenet/ingest.hpp"

namespace bridgenet {

struct Author {
    std::string user_id;
    Platform platform = Platform::X;
    std::string username;
};

// doc_id -> author
using AuthorshipMap = std::unordered_map<std::string, Author>;

// Accounts are platform-scoped: the same handle on two platforms is two users.
inline std::string user_key(Platform p, std::string_view user_id) {
    std::string k(to_string(p));
    k += ':';
    k += user_id;
    return k;
}

inline AuthorshipMap authorship_from(std::span<const Post> posts) {
    AuthorshipMap out;
    for (const auto& p : posts) out.emplace(p.doc_id, Author{p.user_id, p.platform, p.username});
    return out;
}

inline AuthorshipMap authorship_from(std::span<const DocRecord> docs) {
    AuthorshipMap out;
    for (const auto& d : docs) out.emplace(d.post.doc_id, Author{d.post.user_id, d.post.platform, d.post.username});
    return out;
}

struct UserGraphOptions {
    // Unit weights instead of similar-pair counts.
    bool binary = false;
};

// Users are linked when their documents are linked. The weight of (u, w) is
// the number of content edges between a document of u and a document of w,
// i.e. the off-diagonal of B S B^T. Same-author content edges are dropped.
inline Graph build_user_graph(const Graph& content, const AuthorshipMap& authors, const UserGraphOptions& opts = {}) {
    std::vector<std::string> orphans;
    for (const auto& node : content.nodes())
        if (!authors.contains(node.id)) orphans.push_back(node.id);
    if (!orphans.empty()) {
        std::string msg = "content nodes without an author:";
        for (std::size_t i = 0; i < orphans.size() && i < 20; ++i) msg += " " + orphans[i];
        if (orphans.size() > 20) msg += " ... (" + std::to_string(orphans.size()) + " total)";
        throw Error(msg);
    }

    Graph users;
    std::vector<NodeIndex> doc_user(content.n());
    for (NodeIndex d = 0; d < content.n(); ++d) {
        const Author& a = authors.at(content.node(d).id);
        const std::string key = user_key(a.platform, a.user_id);
        if (auto existing = users.find(key)) {
            doc_user[d] = *existing;
            continue;
        }
        NodeAttributes attrs;
        attrs.id = key;
        attrs.kind = NodeKind::user;
        attrs.platform = a.platform;
        attrs.labels = {{"user_id", a.user_id}, {"username", a.username}};
        doc_user[d] = users.add_node(std::move(attrs));
    }

    std::map<std::pair<NodeIndex, NodeIndex>, double> weights;
    for (const auto& e : content.edges()) {
        const NodeIndex a = doc_user[e.u];
        const NodeIndex b = doc_user[e.v];
        if (a == b) continue;
        weights[{std::min(a, b), std::max(a, b)}] += 1.0;
    }
    for (const auto& [key, w] : weights) users.add_edge(key.first, key.second, opts.binary ? 1.0 : w);
    return users;
}

struct GraphStats {
    std::size_t n = 0;
    std::size_t m = 0;
    double total_weight = 0.0;
    std::map<std::size_t, std::size_t> degree_histogram;  // degree -> node count
    std::map<std::string, std::size_t> platform_counts;   // platform name -> node count
    std::size_t isolated = 0;
};

inline GraphStats graph_stats(const Graph& g) {
    GraphStats s;
    s.n = g.n();
    s.m = g.m();
    for (const auto& e : g.edges()) s.total_weight += e.weight;
    for (NodeIndex v = 0; v < g.n(); ++v) {
        ++s.degree_histogram[g.degree(v)];
        if (g.degree(v) == 0) ++s.isolated;
        const auto& p = g.node(v).platform;
        ++s.platform_counts[p ? std::string(to_string(*p)) : std::string("unknown")];
    }
    return s;
}

inline GraphStats user_graph_stats(const Graph& g) { return graph_stats(g); }

inline nlohmann::json to_json(const GraphStats& s) {
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& [deg, count] : s.degree_histogram) hist.push_back({deg, count});
    return {{"n", s.n},
            {"m", s.m},
            {"total_weight", s.total_weight},
            {"isolated", s.isolated},
            {"degree_histogram", hist},
            {"platforms", s.platform_counts}};
}

}  // namespace bridgenet
