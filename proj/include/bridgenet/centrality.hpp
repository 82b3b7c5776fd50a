#pragma once
// Degree, eigenvector, HITS hub and betweenness centrality.
//
// Degree and betweenness use hop semantics (weights ignored); eigenvector and
// hub scores use edge weights.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <stack>
#include <string>
#include <vector>

#include "bridgenet/common.hpp"
#include "bridgenet/detail/parallel.hpp"
#include "bridgenet/graph.hpp"

namespace bridgenet {

class ConvergenceError : public Error {
public:
    ConvergenceError(std::string what, std::size_t iterations, double residual)
        : Error(std::move(what) + " did not converge after " + std::to_string(iterations) +
                " iterations (residual " + std::to_string(residual) + ")"),
          iterations_(iterations), residual_(residual) {}

    std::size_t iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    std::size_t iterations_;
    double residual_;
};

inline std::vector<double> degree_centrality(const Graph& g) {
    std::vector<double> out(g.n(), 0.0);
    if (g.n() < 2) return out;
    const double denom = static_cast<double>(g.n() - 1);
    for (NodeIndex v = 0; v < g.n(); ++v) out[v] = static_cast<double>(g.degree(v)) / denom;
    return out;
}

struct PowerIterationOptions {
    double tol = 1e-10;
    std::size_t max_iter = 1000;
};

namespace detail {

// y = (A + I) x restricted to `nodes`; the unit shift keeps the dominant
// eigenvector and breaks the +/- lambda tie on bipartite components.
inline void shifted_product(const Graph& g, std::span<const NodeIndex> nodes, const std::vector<double>& x,
                            std::vector<double>& y) {
    for (NodeIndex v : nodes) {
        double s = x[v];
        for (const auto& inc : g.neighbors(v)) s += g.edges()[inc.edge].weight * x[inc.to];
        y[v] = s;
    }
}

inline void normalize(std::span<const NodeIndex> nodes, std::vector<double>& x) {
    double norm = 0.0;
    for (NodeIndex v : nodes) norm += x[v] * x[v];
    norm = std::sqrt(norm);
    if (norm == 0.0) return;
    for (NodeIndex v : nodes) x[v] /= norm;
}

inline std::vector<std::vector<NodeIndex>> nontrivial_components(const Graph& g) {
    const auto cc = connected_components(g);
    std::vector<std::vector<NodeIndex>> comps(cc.count);
    for (NodeIndex v = 0; v < g.n(); ++v) comps[cc.component[v]].push_back(v);
    std::erase_if(comps, [](const auto& c) { return c.size() < 2; });
    return comps;
}

// Dominant eigenvector of each connected component (unit length within the
// component), then renormalized to unit length over the whole graph.
// `mutual` alternates two products per round, as hub/authority updates do.
inline std::vector<double> per_component_power(const Graph& g, const PowerIterationOptions& opts, bool mutual,
                                               const char* what) {
    std::vector<double> x(g.n(), 0.0), y(g.n(), 0.0), z(g.n(), 0.0);
    for (const auto& nodes : nontrivial_components(g)) {
        for (NodeIndex v : nodes) x[v] = 1.0;
        normalize(nodes, x);
        bool converged = false;
        double diff = 0.0;
        std::size_t it = 0;
        while (it < opts.max_iter) {
            ++it;
            if (mutual) {
                shifted_product(g, nodes, x, z);  // authority from hubs
                normalize(nodes, z);
                shifted_product(g, nodes, z, y);  // hubs from authorities
            } else {
                shifted_product(g, nodes, x, y);
            }
            normalize(nodes, y);
            diff = 0.0;
            for (NodeIndex v : nodes) diff = std::max(diff, std::abs(y[v] - x[v]));
            for (NodeIndex v : nodes) x[v] = y[v];
            if (diff < opts.tol) {
                converged = true;
                break;
            }
        }
        if (!converged) throw ConvergenceError(what, it, diff);
    }
    double norm = 0.0;
    for (double v : x) norm += v * v;
    if (norm > 0.0)
        for (double& v : x) v /= std::sqrt(norm);
    return x;
}

}  // namespace detail

// Nonnegative, L2-normalized; isolated nodes score 0.
inline std::vector<double> eigenvector_centrality(const Graph& g, const PowerIterationOptions& opts = {}) {
    return detail::per_component_power(g, opts, false, "eigenvector centrality");
}

// Hub scores from alternating hub/authority updates. On an undirected graph
// hubs and authorities coincide and point along the eigenvector direction.
inline std::vector<double> hits_hub(const Graph& g, const PowerIterationOptions& opts = {}) {
    return detail::per_component_power(g, opts, true, "HITS");
}

struct BetweennessOptions {
    bool exact = true;
    std::optional<std::size_t> sample_size;  // pivots when !exact
    std::uint64_t seed = 0;
    unsigned threads = 1;  // 1: single fixed summation order
};

namespace detail {

// Brandes single-source dependency accumulation (unweighted), added into `acc`.
struct BrandesWorkspace {
    std::vector<int> dist;
    std::vector<double> sigma, delta;
    std::vector<std::vector<NodeIndex>> preds;
    std::vector<NodeIndex> order;
    std::vector<NodeIndex> queue;

    explicit BrandesWorkspace(std::size_t n) : dist(n), sigma(n), delta(n), preds(n) {}

    void accumulate(const Graph& g, NodeIndex s, std::vector<double>& acc) {
        std::fill(dist.begin(), dist.end(), -1);
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        for (auto& p : preds) p.clear();
        order.clear();
        queue.clear();
        dist[s] = 0;
        sigma[s] = 1.0;
        queue.push_back(s);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const NodeIndex v = queue[head];
            order.push_back(v);
            for (const auto& inc : g.neighbors(v)) {
                const NodeIndex w = inc.to;
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if (dist[w] == dist[v] + 1) {
                    sigma[w] += sigma[v];
                    preds[w].push_back(v);
                }
            }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const NodeIndex w = *it;
            for (NodeIndex v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            if (w != s) acc[w] += delta[w];
        }
    }
};

inline std::vector<double> brandes_sum(const Graph& g, std::span<const NodeIndex> sources, unsigned threads) {
    const std::size_t n = g.n();
    std::vector<std::vector<double>> partial(std::max<std::size_t>(1, detail::resolve_threads(threads)));
    const std::size_t chunks = detail::parallel_chunks(sources.size(), threads, [&](std::size_t c, std::size_t b, std::size_t e) {
        partial[c].assign(n, 0.0);
        BrandesWorkspace ws(n);
        for (std::size_t i = b; i < e; ++i) ws.accumulate(g, sources[i], partial[c]);
    });
    std::vector<double> total(n, 0.0);
    for (std::size_t c = 0; c < chunks; ++c)
        for (std::size_t v = 0; v < n; ++v) total[v] += partial[c][v];
    return total;
}

}  // namespace detail

// Normalized to [0, 1] by the (n-1)(n-2)/2 unordered pairs excluding v.
// Sampled mode scales the pivot sum by n / sample_size (unbiased).
inline std::vector<double> betweenness(const Graph& g, const BetweennessOptions& opts = {}) {
    const std::size_t n = g.n();
    std::vector<NodeIndex> sources(n);
    std::iota(sources.begin(), sources.end(), NodeIndex{0});
    double scale = 1.0;
    if (!opts.exact) {
        const std::size_t k = opts.sample_size.value_or(n);
        if (k > n) throw Error("betweenness: sample_size " + std::to_string(k) + " exceeds node count " + std::to_string(n));
        if (k == 0) throw Error("betweenness: sample_size must be positive");
        std::mt19937_64 rng(opts.seed);
        std::shuffle(sources.begin(), sources.end(), rng);
        sources.resize(k);
        std::sort(sources.begin(), sources.end());
        scale = static_cast<double>(n) / static_cast<double>(k);
    }
    std::vector<double> bc = detail::brandes_sum(g, sources, opts.threads);
    if (n <= 2) return std::vector<double>(n, 0.0);
    // Each unordered pair is counted from both endpoints.
    const double norm = scale / (static_cast<double>(n - 1) * static_cast<double>(n - 2));
    for (double& b : bc) b *= norm;
    return bc;
}

struct CentralityTable {
    std::vector<double> degree;
    std::vector<double> eigenvector;
    std::vector<double> hub;
    std::vector<double> betweenness;
};

struct CentralityOptions {
    PowerIterationOptions power;
    BetweennessOptions betweenness;
};

inline CentralityTable compute_centralities(const Graph& g, const CentralityOptions& opts = {}) {
    return {degree_centrality(g), eigenvector_centrality(g, opts.power), hits_hub(g, opts.power),
            betweenness(g, opts.betweenness)};
}

}  // namespace bridgenet
