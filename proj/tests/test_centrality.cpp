#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bridgenet/centrality.hpp"
#include "oracles.hpp"

using namespace bridgenet;
using oracle::make_graph;

namespace {

Graph star(std::size_t leaves) {
    std::vector<std::pair<NodeIndex, NodeIndex>> e;
    for (NodeIndex v = 1; v <= leaves; ++v) e.emplace_back(0, v);
    return make_graph(leaves + 1, e);
}

Graph k(std::size_t n) {
    std::vector<std::pair<NodeIndex, NodeIndex>> e;
    for (NodeIndex a = 0; a < n; ++a)
        for (NodeIndex b = a + 1; b < n; ++b) e.emplace_back(a, b);
    return make_graph(n, e);
}

// max |A x - lambda x| per nonzero component, lambda from the Rayleigh quotient.
double residual(const Graph& g, const std::vector<double>& x) {
    const auto adj = oracle::adjacency(g);
    double num = 0, den = 0;
    std::vector<double> ax(g.n(), 0.0);
    for (NodeIndex v = 0; v < g.n(); ++v)
        for (NodeIndex w : adj[v]) ax[v] += x[w];
    for (NodeIndex v = 0; v < g.n(); ++v) {
        num += x[v] * ax[v];
        den += x[v] * x[v];
    }
    const double lambda = num / den;
    double r = 0;
    for (NodeIndex v = 0; v < g.n(); ++v) r = std::max(r, std::abs(ax[v] - lambda * x[v]));
    return r;
}

}  // namespace

TEST(Degree, Examples) {
    for (double d : degree_centrality(k(4))) EXPECT_DOUBLE_EQ(d, 1.0);
    const auto s = degree_centrality(star(4));
    EXPECT_DOUBLE_EQ(s[0], 1.0);
    EXPECT_DOUBLE_EQ(s[1], 0.25);
    EXPECT_EQ(degree_centrality(make_graph(3, {{0, 1}}))[2], 0.0);
    EXPECT_EQ(degree_centrality(make_graph(1, {})), (std::vector<double>{0.0}));
}

TEST(Eigenvector, TriangleUniform) {
    for (double x : eigenvector_centrality(k(3))) EXPECT_NEAR(x, 1.0 / std::sqrt(3.0), 1e-9);
}

TEST(Eigenvector, StarCentreOverLeafIsRootK) {
    for (std::size_t leaves : {4u, 9u, 16u}) {
        const Graph g = star(leaves);
        const auto x = eigenvector_centrality(g);
        EXPECT_NEAR(x[0] / x[1], std::sqrt(static_cast<double>(leaves)), 1e-6);
        EXPECT_LT(residual(g, x), 1e-8);
    }
}

TEST(Eigenvector, PathMiddleLargest) {
    const auto x = eigenvector_centrality(make_graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}}));
    EXPECT_GT(x[2], x[1]);
    EXPECT_GT(x[1], x[0]);
    EXPECT_NEAR(x[0], x[4], 1e-12);
}

TEST(Eigenvector, NonnegativeUnitNormIsolatedZero) {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 30; ++t) {
        const Graph g = oracle::random_graph(25, 0.12, rng);
        const auto x = eigenvector_centrality(g);
        double norm = 0;
        bool any_edge = g.m() > 0;
        for (NodeIndex v = 0; v < g.n(); ++v) {
            EXPECT_GE(x[v], 0.0);
            if (g.degree(v) == 0) EXPECT_EQ(x[v], 0.0);
            norm += x[v] * x[v];
        }
        if (any_edge) EXPECT_NEAR(norm, 1.0, 1e-9);
    }
}

TEST(Hub, MatchesEigenvectorOnTriangleAndStar) {
    const auto h = hits_hub(k(3));
    const auto e = eigenvector_centrality(k(3));
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(h[i], e[i], 1e-9);
    const auto hs = hits_hub(star(5));
    for (NodeIndex v = 1; v <= 5; ++v) EXPECT_GT(hs[0], hs[v]);
}

TEST(Hub, DisjointEdgesEqual) {
    const auto h = hits_hub(make_graph(4, {{0, 1}, {2, 3}}));
    for (double x : h) EXPECT_NEAR(x, 0.5, 1e-9);
}

TEST(Betweenness, PathMiddleIsOne) {
    const auto b = betweenness(make_graph(3, {{0, 1}, {1, 2}}));
    EXPECT_DOUBLE_EQ(b[1], 1.0);
    EXPECT_EQ(b[0], 0.0);
}

TEST(Betweenness, CycleUniform) {
    const auto b = betweenness(make_graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}}));
    for (double x : b) EXPECT_NEAR(x, b[0], 1e-15);
    EXPECT_GT(b[0], 0.0);
}

TEST(Betweenness, StarCentreIsOne) {
    const auto b = betweenness(star(6));
    EXPECT_NEAR(b[0], 1.0, 1e-15);
}

TEST(Betweenness, MatchesPathEnumerationOracle) {
    std::mt19937_64 rng(99);
    for (int t = 0; t < 60; ++t) {
        const Graph g = oracle::random_graph(3 + rng() % 28, 0.05 + 0.3 * (rng() % 100) / 100.0, rng);
        const auto fast = betweenness(g);
        const auto slow = oracle::betweenness(g);
        for (NodeIndex v = 0; v < g.n(); ++v) EXPECT_NEAR(fast[v], slow[v], 1e-9) << "graph " << t << " node " << v;
    }
}

TEST(Betweenness, ThreadsAgree) {
    std::mt19937_64 rng(2);
    const Graph g = oracle::random_graph(80, 0.06, rng);
    const auto one = betweenness(g);
    const auto four = betweenness(g, {.threads = 4});
    for (NodeIndex v = 0; v < g.n(); ++v) EXPECT_NEAR(one[v], four[v], 1e-12);
}

TEST(Betweenness, FullSampleEqualsExact) {
    std::mt19937_64 rng(6);
    const Graph g = oracle::random_graph(40, 0.1, rng);
    const auto exact = betweenness(g);
    const auto sampled = betweenness(g, {.exact = false, .sample_size = g.n(), .seed = 3});
    for (NodeIndex v = 0; v < g.n(); ++v) EXPECT_NEAR(exact[v], sampled[v], 1e-12);
}

TEST(Betweenness, SampleSizeValidated) {
    const Graph g = k(4);
    EXPECT_THROW(betweenness(g, {.exact = false, .sample_size = 0}), Error);
    EXPECT_THROW(betweenness(g, {.exact = false, .sample_size = 5}), Error);
}

TEST(CentralityProperty, PermutationEquivariant) {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 20; ++t) {
        const Graph g = oracle::connected_random_graph(20, 0.15, rng);
        std::vector<NodeIndex> perm(g.n());
        std::iota(perm.begin(), perm.end(), NodeIndex{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<std::pair<NodeIndex, NodeIndex>> pe;
        for (const auto& e : g.edges()) pe.emplace_back(perm[e.u], perm[e.v]);
        const Graph h = make_graph(g.n(), pe);
        const auto a = compute_centralities(g);
        const auto b = compute_centralities(h);
        for (NodeIndex v = 0; v < g.n(); ++v) {
            EXPECT_NEAR(a.degree[v], b.degree[perm[v]], 1e-12);
            EXPECT_NEAR(a.eigenvector[v], b.eigenvector[perm[v]], 1e-7);
            EXPECT_NEAR(a.hub[v], b.hub[perm[v]], 1e-7);
            EXPECT_NEAR(a.betweenness[v], b.betweenness[perm[v]], 1e-12);
        }
    }
}

TEST(CentralityProperty, EigenvectorResidualSmall) {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 20; ++t) {
        const Graph g = oracle::connected_random_graph(30, 0.1, rng);
        EXPECT_LT(residual(g, eigenvector_centrality(g)), 1e-8);
    }
}

TEST(CentralityProperty, ConvergenceFailureReported) {
    const Graph g = oracle::make_graph(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}});
    try {
        eigenvector_centrality(g, {.tol = 1e-300, .max_iter = 3});
        FAIL();
    } catch (const ConvergenceError& e) {
        EXPECT_EQ(e.iterations(), 3u);
    }
}
