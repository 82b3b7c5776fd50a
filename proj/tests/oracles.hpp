#pragma once
// Independent brute-force references used by the unit and acceptance tests.
// Nothing here calls into the algorithms under test beyond the Graph container.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "bridgenet/graph.hpp"
#include "bridgenet/similarity.hpp"

namespace oracle {

using bridgenet::Graph;
using bridgenet::NodeIndex;

inline Graph make_graph(std::size_t n, const std::vector<std::pair<NodeIndex, NodeIndex>>& edges) {
    Graph g;
    for (std::size_t i = 0; i < n; ++i) g.add_node({.id = "v" + std::to_string(i)});
    for (auto [a, b] : edges) g.add_edge(a, b);
    return g;
}

inline Graph random_graph(std::size_t n, double p, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(p);
    std::vector<std::pair<NodeIndex, NodeIndex>> edges;
    for (NodeIndex a = 0; a < n; ++a)
        for (NodeIndex b = a + 1; b < n; ++b)
            if (coin(rng)) edges.emplace_back(a, b);
    return make_graph(n, edges);
}

inline Graph connected_random_graph(std::size_t n, double p, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(p);
    std::set<std::pair<NodeIndex, NodeIndex>> edges;
    for (NodeIndex v = 1; v < n; ++v) {
        std::uniform_int_distribution<NodeIndex> pick(0, v - 1);
        edges.emplace(pick(rng), v);
    }
    for (NodeIndex a = 0; a < n; ++a)
        for (NodeIndex b = a + 1; b < n; ++b)
            if (coin(rng)) edges.emplace(a, b);
    return make_graph(n, {edges.begin(), edges.end()});
}

// Union-find over all edges not touching a masked node or edge.
inline int component_count(const Graph& g, std::optional<NodeIndex> skip_node = {},
                           std::optional<std::size_t> skip_edge = {}) {
    std::vector<NodeIndex> parent(g.n());
    std::iota(parent.begin(), parent.end(), NodeIndex{0});
    std::function<NodeIndex(NodeIndex)> find = [&](NodeIndex x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (std::size_t e = 0; e < g.m(); ++e) {
        const auto& edge = g.edges()[e];
        if (skip_edge && *skip_edge == e) continue;
        if (skip_node && (edge.u == *skip_node || edge.v == *skip_node)) continue;
        parent[find(edge.u)] = find(edge.v);
    }
    int count = 0;
    for (NodeIndex v = 0; v < g.n(); ++v)
        if (v != skip_node && find(v) == v) ++count;
    return count;
}

inline std::set<NodeIndex> articulation_points(const Graph& g) {
    const int base = component_count(g);
    std::set<NodeIndex> out;
    for (NodeIndex v = 0; v < g.n(); ++v)
        if (component_count(g, v) > base) out.insert(v);
    return out;
}

inline std::set<std::size_t> bridge_edges(const Graph& g) {
    const int base = component_count(g);
    std::set<std::size_t> out;
    for (std::size_t e = 0; e < g.m(); ++e)
        if (component_count(g, std::nullopt, e) > base) out.insert(e);
    return out;
}

inline std::vector<std::vector<NodeIndex>> adjacency(const Graph& g) {
    std::vector<std::vector<NodeIndex>> adj(g.n());
    for (const auto& e : g.edges()) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    return adj;
}

inline std::vector<int> bfs(const std::vector<std::vector<NodeIndex>>& adj, NodeIndex s) {
    std::vector<int> d(adj.size(), -1);
    std::queue<NodeIndex> q;
    d[s] = 0;
    q.push(s);
    while (!q.empty()) {
        const NodeIndex v = q.front();
        q.pop();
        for (NodeIndex w : adj[v])
            if (d[w] < 0) {
                d[w] = d[v] + 1;
                q.push(w);
            }
    }
    return d;
}

// Enumerates every shortest s-t path explicitly and counts interior visits.
// Normalized like the library: ordered pairs divided by (n-1)(n-2).
inline std::vector<double> betweenness(const Graph& g) {
    const std::size_t n = g.n();
    const auto adj = adjacency(g);
    std::vector<std::vector<int>> dist(n);
    for (NodeIndex s = 0; s < n; ++s) dist[s] = bfs(adj, s);
    std::vector<double> bc(n, 0.0);
    for (NodeIndex s = 0; s < n; ++s) {
        for (NodeIndex t = 0; t < n; ++t) {
            if (s == t || dist[s][t] < 0) continue;
            std::vector<std::size_t> visits(n, 0);
            std::size_t paths = 0;
            std::vector<NodeIndex> path{s};
            std::function<void(NodeIndex)> walk = [&](NodeIndex v) {
                if (v == t) {
                    ++paths;
                    for (std::size_t i = 1; i + 1 < path.size(); ++i) ++visits[path[i]];
                    return;
                }
                for (NodeIndex w : adj[v]) {
                    if (dist[s][w] == dist[s][v] + 1 && dist[w][t] == dist[v][t] - 1) {
                        path.push_back(w);
                        walk(w);
                        path.pop_back();
                    }
                }
            };
            walk(s);
            for (NodeIndex v = 0; v < n; ++v) bc[v] += static_cast<double>(visits[v]) / static_cast<double>(paths);
        }
    }
    if (n > 2)
        for (double& b : bc) b /= static_cast<double>(n - 1) * static_cast<double>(n - 2);
    else
        std::fill(bc.begin(), bc.end(), 0.0);
    return bc;
}

// Newman modularity straight from the definition, sum over node pairs.
inline double modularity(const Graph& g, const std::vector<int>& membership, double gamma = 1.0) {
    const std::size_t n = g.n();
    std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
    for (const auto& e : g.edges()) A[e.u][e.v] = A[e.v][e.u] = e.weight;
    std::vector<double> k(n, 0.0);
    double two_m = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            k[i] += A[i][j];
            two_m += A[i][j];
        }
    if (two_m == 0.0) return 0.0;
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (membership[i] == membership[j]) q += A[i][j] - gamma * k[i] * k[j] / two_m;
    return q / two_m;
}

// Best partition over all set partitions (restricted growth strings).
inline std::pair<double, std::vector<int>> best_partition(const Graph& g, double gamma = 1.0) {
    const std::size_t n = g.n();
    std::vector<int> rgs(n, 0), best = rgs;
    double best_q = modularity(g, rgs, gamma);
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int max_label) {
        if (i == n) {
            const double q = modularity(g, rgs, gamma);
            if (q > best_q + 1e-12) {
                best_q = q;
                best = rgs;
            }
            return;
        }
        for (int c = 0; c <= max_label + 1; ++c) {
            rgs[i] = c;
            rec(i + 1, std::max(max_label, c));
        }
    };
    if (n > 0) {
        rgs[0] = 0;
        rec(1, 0);
    }
    return {best_q, best};
}

// Same clustering up to relabelling.
inline bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) return false;
    std::map<int, int> ab, ba;
    for (std::size_t i = 0; i < a.size(); ++i) {
        auto [x, xi] = ab.emplace(a[i], b[i]);
        auto [y, yi] = ba.emplace(b[i], a[i]);
        if (x->second != b[i] || y->second != a[i]) return false;
    }
    return true;
}

// Off-diagonal of B S B^T with dense matrices. B: users x docs incidence.
inline std::vector<std::vector<double>> projection(std::size_t users, const std::vector<std::size_t>& author_of,
                                                   const std::vector<std::vector<double>>& S) {
    const std::size_t docs = author_of.size();
    std::vector<std::vector<double>> B(users, std::vector<double>(docs, 0.0));
    for (std::size_t d = 0; d < docs; ++d) B[author_of[d]][d] = 1.0;
    std::vector<std::vector<double>> BS(users, std::vector<double>(docs, 0.0));
    for (std::size_t u = 0; u < users; ++u)
        for (std::size_t d = 0; d < docs; ++d)
            for (std::size_t e = 0; e < docs; ++e) BS[u][e] += B[u][d] * S[d][e];
    std::vector<std::vector<double>> W(users, std::vector<double>(users, 0.0));
    for (std::size_t u = 0; u < users; ++u)
        for (std::size_t w = 0; w < users; ++w) {
            if (u == w) continue;
            for (std::size_t e = 0; e < docs; ++e) W[u][w] += BS[u][e] * B[w][e];
        }
    return W;
}

// Double loop over all pairs.
inline std::set<std::pair<std::size_t, std::size_t>> similar_pairs(const bridgenet::EmbeddingMatrix& m, double theta) {
    std::set<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i + 1; j < m.rows(); ++j)
            if (bridgenet::cosine(m.row(i), m.row(j)) > theta) out.emplace(i, j);
    return out;
}

inline bridgenet::EmbeddingMatrix random_embeddings(std::size_t n, std::size_t dim, std::mt19937_64& rng,
                                                    std::size_t clusters = 4, double spread = 0.35) {
    std::normal_distribution<float> normal(0.0f, 1.0f);
    std::vector<std::vector<float>> centres(clusters, std::vector<float>(dim));
    for (auto& c : centres)
        for (auto& x : c) x = normal(rng);
    bridgenet::EmbeddingMatrix m;
    m.dim = dim;
    std::uniform_int_distribution<std::size_t> pick(0, clusters - 1);
    for (std::size_t i = 0; i < n; ++i) {
        m.ids.push_back("X:" + std::to_string(i));
        const auto& c = centres[pick(rng)];
        for (std::size_t k = 0; k < dim; ++k) m.data.push_back(c[k] + static_cast<float>(spread) * normal(rng));
    }
    m.degenerate.assign(n, 0);
    return m;
}

}  // namespace oracle
