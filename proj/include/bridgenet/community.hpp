#pragma once
// Leiden community detection (modularity with resolution) and cluster-size pruning.
//
// Each pass runs fast local moving, refines every community into well-connected
// sub-communities, and aggregates the graph on the refined partition while the
// unrefined partition seeds the next level. Passes repeat until the partition
// stops changing.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "bridgenet/common.hpp"
#include "bridgenet/detail/io.hpp"
#include "bridgenet/graph.hpp"

namespace bridgenet {

struct Partition {
    std::vector<int> membership;     // node -> cluster id, ids dense from 0
    std::vector<std::size_t> sizes;  // per cluster id
    double quality = 0.0;            // modularity at the resolution used
    double resolution = 1.0;

    std::size_t cluster_count() const noexcept { return sizes.size(); }
};

struct LeidenOptions {
    double resolution = 1.0;
    std::uint64_t seed = 0;
    // Temperature of the randomized merge choice during refinement.
    double randomness = 0.01;
    int max_passes = 10;
};

struct PruneConfig {
    // Clusters with at least this many nodes survive ("more than 10" -> 11).
    std::size_t min_cluster_size = 11;
};

// Q = 1/(2m) * sum_c [ in_c - resolution * K_c^2 / (2m) ], weighted.
inline double modularity(const Graph& g, std::span<const int> membership, double resolution = 1.0) {
    double two_m = 0.0;
    for (const auto& e : g.edges()) two_m += 2.0 * e.weight;
    if (two_m == 0.0) return 0.0;
    const int k = membership.empty() ? 0 : *std::max_element(membership.begin(), membership.end()) + 1;
    std::vector<double> in(k, 0.0), tot(k, 0.0);
    for (const auto& e : g.edges()) {
        tot[membership[e.u]] += e.weight;
        tot[membership[e.v]] += e.weight;
        if (membership[e.u] == membership[e.v]) in[membership[e.u]] += 2.0 * e.weight;
    }
    double q = 0.0;
    for (int c = 0; c < k; ++c) q += in[c] - resolution * tot[c] * tot[c] / two_m;
    return q / two_m;
}

namespace detail {

// Weighted graph at one aggregation level. Self-loop weight counts ordered
// pairs inside the aggregated node, so strength = self_loop + sum(adjacent).
struct LevelGraph {
    std::vector<std::vector<std::pair<int, double>>> adj;
    std::vector<double> self_loop;
    std::vector<double> strength;
    double two_m = 0.0;

    int size() const noexcept { return static_cast<int>(adj.size()); }
};

inline LevelGraph level_from(const Graph& g) {
    LevelGraph lg;
    lg.adj.resize(g.n());
    lg.self_loop.assign(g.n(), 0.0);
    lg.strength.assign(g.n(), 0.0);
    for (const auto& e : g.edges()) {
        lg.adj[e.u].emplace_back(static_cast<int>(e.v), e.weight);
        lg.adj[e.v].emplace_back(static_cast<int>(e.u), e.weight);
        lg.strength[e.u] += e.weight;
        lg.strength[e.v] += e.weight;
        lg.two_m += 2.0 * e.weight;
    }
    return lg;
}

inline LevelGraph aggregate(const LevelGraph& g, std::span<const int> group, int groups) {
    LevelGraph out;
    out.adj.resize(groups);
    out.self_loop.assign(groups, 0.0);
    out.strength.assign(groups, 0.0);
    out.two_m = g.two_m;
    std::vector<std::vector<int>> members(groups);
    for (int v = 0; v < g.size(); ++v) {
        members[group[v]].push_back(v);
        out.self_loop[group[v]] += g.self_loop[v];
        out.strength[group[v]] += g.strength[v];
    }
    std::vector<double> acc(groups, 0.0);
    std::vector<int> touched;
    for (int c = 0; c < groups; ++c) {
        for (int v : members[c]) {
            for (const auto& [u, w] : g.adj[v]) {
                const int d = group[u];
                if (d == c) {
                    out.self_loop[c] += w;
                    continue;
                }
                if (acc[d] == 0.0) touched.push_back(d);
                acc[d] += w;
            }
        }
        std::sort(touched.begin(), touched.end());
        for (int d : touched) {
            out.adj[c].emplace_back(d, acc[d]);
            acc[d] = 0.0;
        }
        touched.clear();
    }
    return out;
}

// Relabels ids densely in order of first appearance; returns the id count.
inline int renumber(std::vector<int>& ids) {
    std::vector<int> map;
    int next = 0;
    for (int& c : ids) {
        if (c >= static_cast<int>(map.size())) map.resize(c + 1, -1);
        if (map[c] == -1) map[c] = next++;
        c = map[c];
    }
    return next;
}

class LeidenRun {
public:
    LeidenRun(const LeidenOptions& opts, std::mt19937_64& rng) : opts_(opts), rng_(rng) {}

    // One pass over all levels starting from `initial` on the base graph.
    std::vector<int> pass(const LevelGraph& base, std::vector<int> initial) {
        LevelGraph g = base;
        std::vector<int> comm = std::move(initial);
        std::vector<int> base_to_level(base.size());
        std::iota(base_to_level.begin(), base_to_level.end(), 0);
        while (true) {
            move_nodes_fast(g, comm);
            const int communities = renumber(comm);
            if (communities == g.size()) break;
            std::vector<int> refined = refine(g, comm);
            const int refined_count = renumber(refined);
            // Community of each refined cluster in the unrefined partition.
            std::vector<int> next_comm(refined_count);
            for (int v = 0; v < g.size(); ++v) next_comm[refined[v]] = comm[v];
            for (int& x : base_to_level) x = refined[x];
            g = aggregate(g, refined, refined_count);
            comm = std::move(next_comm);
        }
        std::vector<int> out(base.size());
        for (int v = 0; v < base.size(); ++v) out[v] = comm[base_to_level[v]];
        renumber(out);
        return out;
    }

private:
    double gain(double w_to_c, double k_v, double k_c, double two_m) const {
        return w_to_c - opts_.resolution * k_v * k_c / two_m;
    }

    void move_nodes_fast(const LevelGraph& g, std::vector<int>& comm) {
        const int n = g.size();
        int slots = n;
        for (int c : comm) slots = std::max(slots, c + 1);
        std::vector<double> tot(slots, 0.0);
        std::vector<int> count(slots, 0);
        for (int v = 0; v < n; ++v) {
            tot[comm[v]] += g.strength[v];
            ++count[comm[v]];
        }
        std::vector<int> empty;
        for (int c = slots - 1; c >= 0; --c)
            if (count[c] == 0) empty.push_back(c);

        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng_);
        std::deque<int> queue(order.begin(), order.end());
        std::vector<char> queued(n, 1);

        std::vector<double> w_to(slots, 0.0);
        std::vector<int> seen;
        while (!queue.empty()) {
            const int v = queue.front();
            queue.pop_front();
            queued[v] = 0;
            const int old = comm[v];
            const double k_v = g.strength[v];

            for (const auto& [u, w] : g.adj[v]) {
                const int c = comm[u];
                if (w_to[c] == 0.0) seen.push_back(c);
                w_to[c] += w;
            }
            tot[old] -= k_v;
            --count[old];
            if (count[old] == 0) empty.push_back(old);

            int best = old;
            double best_gain = gain(w_to[old], k_v, tot[old], g.two_m);
            std::sort(seen.begin(), seen.end());
            for (int c : seen) {
                if (c == old) continue;
                const double gc = gain(w_to[c], k_v, tot[c], g.two_m);
                if (gc > best_gain || (gc == best_gain && best != old && c < best)) {
                    best = c;
                    best_gain = gc;
                }
            }
            if (count[old] != 0 && !empty.empty() && 0.0 > best_gain) best = empty.back();

            for (int c : seen) w_to[c] = 0.0;
            seen.clear();

            if (best == old && count[old] == 0) empty.pop_back();
            else if (count[best] == 0) empty.erase(std::find(empty.begin(), empty.end(), best));
            tot[best] += k_v;
            ++count[best];
            comm[v] = best;
            if (best != old) {
                for (const auto& [u, w] : g.adj[v]) {
                    if (!queued[u] && comm[u] != best) {
                        queued[u] = 1;
                        queue.push_back(u);
                    }
                }
            }
        }
    }

    // Splits each community into sub-clusters built by merging singletons into
    // well-connected neighbouring sub-clusters of the same community.
    std::vector<int> refine(const LevelGraph& g, std::span<const int> comm) {
        const int n = g.size();
        const double res = opts_.resolution;
        std::vector<int> refined(n);
        std::iota(refined.begin(), refined.end(), 0);
        std::vector<double> tot(g.strength);      // per refined cluster
        std::vector<int> size(n, 1);
        std::vector<double> external(n, 0.0);     // E(C, S - C) per refined cluster
        int communities = 0;
        for (int c : comm) communities = std::max(communities, c + 1);
        std::vector<double> comm_tot(communities, 0.0);
        std::vector<std::vector<int>> members(communities);
        for (int v = 0; v < n; ++v) {
            comm_tot[comm[v]] += g.strength[v];
            members[comm[v]].push_back(v);
            for (const auto& [u, w] : g.adj[v])
                if (comm[u] == comm[v]) external[v] += w;
        }

        std::vector<double> w_to(n, 0.0);
        std::vector<int> seen;
        std::vector<double> weights;
        for (int s = 0; s < communities; ++s) {
            auto& nodes = members[s];
            std::shuffle(nodes.begin(), nodes.end(), rng_);
            const double k_s = comm_tot[s];
            for (int v : nodes) {
                if (size[refined[v]] != 1) continue;
                const double k_v = g.strength[v];
                if (external[v] < res * k_v * (k_s - k_v) / g.two_m) continue;

                for (const auto& [u, w] : g.adj[v]) {
                    if (comm[u] != s || u == v) continue;
                    const int c = refined[u];
                    if (c == refined[v]) continue;
                    if (w_to[c] == 0.0) seen.push_back(c);
                    w_to[c] += w;
                }
                std::sort(seen.begin(), seen.end());
                std::vector<int> candidates;
                weights.clear();
                double best = -std::numeric_limits<double>::infinity();
                std::vector<double> gains;
                for (int c : seen) {
                    if (external[c] < res * tot[c] * (k_s - tot[c]) / g.two_m) continue;
                    const double gc = gain(w_to[c], k_v, tot[c], g.two_m);
                    if (gc < 0.0) continue;
                    candidates.push_back(c);
                    gains.push_back(gc);
                    best = std::max(best, gc);
                }
                int target = -1;
                if (!candidates.empty()) {
                    double total = 0.0;
                    for (double gc : gains) {
                        weights.push_back(std::exp((gc - best) / opts_.randomness));
                        total += weights.back();
                    }
                    std::uniform_real_distribution<double> pick(0.0, total);
                    double r = pick(rng_);
                    target = candidates.back();
                    for (std::size_t i = 0; i < candidates.size(); ++i) {
                        if (r < weights[i]) {
                            target = candidates[i];
                            break;
                        }
                        r -= weights[i];
                    }
                }
                if (target != -1) {
                    const int own = refined[v];
                    external[target] = external[target] + external[own] - 2.0 * w_to[target];
                    tot[target] += k_v;
                    size[target] += 1;
                    tot[own] = 0.0;
                    size[own] = 0;
                    refined[v] = target;
                }
                for (int c : seen) w_to[c] = 0.0;
                seen.clear();
            }
        }
        return refined;
    }

    const LeidenOptions& opts_;
    std::mt19937_64& rng_;
};

// Splits any cluster whose induced subgraph is disconnected; never lowers modularity.
inline void split_disconnected(const Graph& g, std::vector<int>& membership) {
    const std::size_t n = g.n();
    std::vector<int> out(n, -1);
    int next = 0;
    std::vector<NodeIndex> stack;
    for (NodeIndex s = 0; s < n; ++s) {
        if (out[s] != -1) continue;
        out[s] = next;
        stack.push_back(s);
        while (!stack.empty()) {
            const NodeIndex v = stack.back();
            stack.pop_back();
            for (const auto& inc : g.neighbors(v)) {
                if (out[inc.to] != -1 || membership[inc.to] != membership[v]) continue;
                out[inc.to] = next;
                stack.push_back(inc.to);
            }
        }
        ++next;
    }
    membership = std::move(out);
}

inline Partition make_partition(const Graph& g, std::vector<int> membership, double resolution) {
    Partition p;
    const int k = renumber(membership);
    p.sizes.assign(k, 0);
    for (int c : membership) ++p.sizes[c];
    p.membership = std::move(membership);
    p.resolution = resolution;
    p.quality = modularity(g, p.membership, resolution);
    return p;
}

}  // namespace detail

// Deterministic for a fixed seed. Cluster ids are ordered by their smallest node index.
inline Partition leiden(const Graph& g, const LeidenOptions& opts = {}) {
    if (g.n() == 0) throw Error("leiden: empty graph");
    if (!(opts.resolution >= 0.0)) throw ConfigError("leiden: resolution must be nonnegative");
    std::vector<int> membership(g.n());
    std::iota(membership.begin(), membership.end(), 0);
    if (g.m() == 0) return detail::make_partition(g, std::move(membership), opts.resolution);

    std::mt19937_64 rng(opts.seed);
    detail::LeidenRun run(opts, rng);
    const detail::LevelGraph base = detail::level_from(g);
    for (int pass = 0; pass < std::max(1, opts.max_passes); ++pass) {
        std::vector<int> next = run.pass(base, membership);
        const bool stable = next == membership;
        membership = std::move(next);
        if (stable) break;
    }
    detail::split_disconnected(g, membership);
    return detail::make_partition(g, std::move(membership), opts.resolution);
}

// Subgraph of nodes in clusters of at least min_cluster_size nodes, each
// stamped with its cluster id. Node order follows the input graph.
inline Graph prune(const Graph& g, const Partition& p, const PruneConfig& cfg = {}) {
    if (p.membership.size() != g.n()) throw Error("prune: partition does not cover the graph");
    if (cfg.min_cluster_size < 1) throw ConfigError("prune: min_cluster_size must be at least 1");
    std::vector<NodeIndex> keep;
    for (NodeIndex v = 0; v < g.n(); ++v)
        if (p.sizes[p.membership[v]] >= cfg.min_cluster_size) keep.push_back(v);
    Graph out = g.induced(keep);
    for (std::size_t i = 0; i < keep.size(); ++i) out.node(static_cast<NodeIndex>(i)).cluster = p.membership[keep[i]];
    return out;
}

// Writes the partition as clusters plus per-node membership in graph order.
inline nlohmann::json partition_json(const Graph& g, const Partition& p) {
    nlohmann::json clusters = nlohmann::json::array();
    for (std::size_t c = 0; c < p.sizes.size(); ++c) clusters.push_back({{"id", c}, {"size", p.sizes[c]}});
    nlohmann::json members = nlohmann::json::array();
    for (NodeIndex v = 0; v < g.n(); ++v) members.push_back({{"node", g.node(v).id}, {"cluster", p.membership[v]}});
    return {{"resolution", p.resolution}, {"modularity", p.quality}, {"clusters", clusters}, {"membership", members}};
}

inline Partition partition_from_json(const Graph& g, const nlohmann::json& j) {
    std::vector<int> membership(g.n(), -1);
    for (const auto& m : j.at("membership")) membership[g.index_of(m.at("node").get<std::string>())] = m.at("cluster").get<int>();
    for (NodeIndex v = 0; v < g.n(); ++v)
        if (membership[v] < 0) throw Error("partition is missing node '" + g.node(v).id + "'");
    Partition p;
    const int k = *std::max_element(membership.begin(), membership.end()) + 1;
    p.sizes.assign(k, 0);
    for (int c : membership) ++p.sizes[c];
    p.membership = std::move(membership);
    p.resolution = j.value("resolution", 1.0);
    p.quality = modularity(g, p.membership, p.resolution);
    return p;
}

}  // namespace bridgenet
