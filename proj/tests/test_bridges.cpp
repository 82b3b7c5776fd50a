#include <gtest/gtest.h>

#include <random>

#include "bridgenet/bridges.hpp"
#include "oracles.hpp"

using namespace bridgenet;
using oracle::make_graph;

namespace {

std::set<NodeIndex> bridging_set(const BridgeReport& r) {
    const auto v = r.bridging_nodes();
    return {v.begin(), v.end()};
}

Graph k5() {
    std::vector<std::pair<NodeIndex, NodeIndex>> e;
    for (NodeIndex a = 0; a < 5; ++a)
        for (NodeIndex b = a + 1; b < 5; ++b) e.emplace_back(a, b);
    return make_graph(5, e);
}

}  // namespace

TEST(ChainDecomposition, CycleHasOneChainNoBridges) {
    const auto cd = chain_decompose(make_graph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}));
    EXPECT_EQ(cd.chains.size(), 1u);
    EXPECT_TRUE(cd.bridge_edges.empty());
    EXPECT_TRUE(cd.two_edge_connected);
    EXPECT_TRUE(cd.chains[0].is_cycle);
}

TEST(ChainDecomposition, PathIsAllBridges) {
    const auto cd = chain_decompose(make_graph(3, {{0, 1}, {1, 2}}));
    EXPECT_TRUE(cd.chains.empty());
    EXPECT_EQ(cd.bridge_edges.size(), 2u);
    EXPECT_EQ(cd.cut_vertices, (std::vector<NodeIndex>{1}));
}

TEST(ChainDecomposition, BarbellTwoChainsOneBridge) {
    const Graph g = make_graph(6, {{0, 1}, {1, 2}, {0, 2}, {2, 3}, {3, 4}, {4, 5}, {3, 5}});
    const auto cd = chain_decompose(g);
    EXPECT_EQ(cd.chains.size(), 2u);
    const auto brute = oracle::bridge_edges(g);
    EXPECT_EQ(std::set<std::size_t>(cd.bridge_edges.begin(), cd.bridge_edges.end()), brute);
    ASSERT_EQ(cd.bridge_edges.size(), 1u);
    EXPECT_EQ(g.edges()[cd.bridge_edges[0]], (Edge{2, 3, 1.0}));
}

TEST(ChainDecomposition, BridgesAndCutVerticesMatchBruteForce) {
    std::mt19937_64 rng(77);
    for (int t = 0; t < 300; ++t) {
        const Graph g = oracle::random_graph(1 + rng() % 40, 0.03 + 0.25 * (rng() % 100) / 100.0, rng);
        const auto cd = chain_decompose(g);
        EXPECT_EQ(std::set<std::size_t>(cd.bridge_edges.begin(), cd.bridge_edges.end()), oracle::bridge_edges(g)) << t;
        EXPECT_EQ(std::set<NodeIndex>(cd.cut_vertices.begin(), cd.cut_vertices.end()), oracle::articulation_points(g)) << t;
        // Chains partition the non-bridge edges.
        std::vector<int> covered(g.m(), 0);
        for (const auto& c : cd.chains)
            for (auto e : c.edges) ++covered[e];
        for (std::size_t e = 0; e < g.m(); ++e) EXPECT_EQ(covered[e], oracle::bridge_edges(g).contains(e) ? 0 : 1);
    }
}

TEST(Candidates, StarCentreFirst) {
    const Graph star = make_graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
    const auto c = candidate_bridging_nodes(star, 0.2);
    ASSERT_FALSE(c.empty());
    EXPECT_EQ(c.front(), 0u);
}

TEST(Candidates, PathMiddleFirst) {
    const Graph p5 = make_graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
    const auto c = candidate_bridging_nodes(p5, 0.2);
    ASSERT_FALSE(c.empty());
    EXPECT_EQ(c.front(), 2u);
}

TEST(Candidates, CliqueHasNone) { EXPECT_TRUE(candidate_bridging_nodes(k5(), 1.0).empty()); }

TEST(Candidates, TopFractionValidated) {
    EXPECT_THROW(candidate_bridging_nodes(k5(), 0.0), ConfigError);
    EXPECT_THROW(candidate_bridging_nodes(k5(), 1.5), ConfigError);
}

TEST(Verify, PathMiddle) {
    const Graph g = make_graph(3, {{0, 1}, {1, 2}});
    const std::vector<NodeIndex> cand{1};
    const auto f = verify_bridging(g, cand);
    ASSERT_EQ(f.size(), 1u);
    EXPECT_TRUE(f[0].is_bridge);
    EXPECT_EQ(f[0].component_delta, 1);
    EXPECT_EQ(f[0].disconnected_pairs, 1u);
}

TEST(Verify, TriangleNeverBridges) {
    const Graph g = make_graph(3, {{0, 1}, {1, 2}, {0, 2}});
    const std::vector<NodeIndex> cand{0, 1, 2};
    for (const auto& f : verify_bridging(g, cand)) EXPECT_FALSE(f.is_bridge);
}

TEST(Verify, RandomGraphsMatchArticulationPoints) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 100; ++t) {
        const Graph g = oracle::random_graph(1 + rng() % 50, 0.08, rng);
        std::vector<NodeIndex> all(g.n());
        std::iota(all.begin(), all.end(), NodeIndex{0});
        std::set<NodeIndex> verified;
        for (const auto& f : verify_bridging(g, all, 2)) {
            EXPECT_EQ(f.is_bridge, f.component_delta > 0);
            if (f.is_bridge) verified.insert(f.node);
        }
        const auto ap = articulation_points(g);
        EXPECT_EQ(verified, std::set<NodeIndex>(ap.begin(), ap.end()));
    }
}

TEST(FindBridging, ExactEqualsArticulationPoints) {
    const Graph g = make_graph(7, {{0, 1}, {1, 2}, {0, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 3}});
    const auto r = find_bridging_nodes(g, {.mode = BridgeMode::exact});
    EXPECT_EQ(bridging_set(r), (std::set<NodeIndex>{2, 3}));
    EXPECT_EQ(r.findings.size(), g.n());
    EXPECT_EQ(r.findings[6].component_delta, -1);  // isolated node
    EXPECT_NEAR(r.bridging_proportion, 2.0 / 7.0, 1e-15);
}

TEST(FindBridging, PipelineSoundOnRandomGraphs) {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 100; ++t) {
        const Graph g = oracle::random_graph(1 + rng() % 50, 0.05 + 0.25 * (rng() % 100) / 100.0, rng);
        const auto exact = bridging_set(find_bridging_nodes(g, {.mode = BridgeMode::exact}));
        EXPECT_EQ(bridging_set(find_bridging_nodes(g, {.top_fraction = 1.0})), exact);
        for (double tf : {0.01, 0.1, 0.5}) {
            const auto r = find_bridging_nodes(g, {.top_fraction = tf});
            const auto got = bridging_set(r);
            EXPECT_TRUE(std::includes(exact.begin(), exact.end(), got.begin(), got.end()));
            for (const auto& f : r.findings)
                if (f.is_bridge) EXPECT_GT(oracle::component_count(g, f.node), oracle::component_count(g));
        }
    }
}

TEST(FindBridging, UntestedNodesMarked) {
    const Graph g = k5();
    const auto r = find_bridging_nodes(g, {.top_fraction = 0.5});
    for (const auto& f : r.findings) {
        EXPECT_FALSE(f.tested);
        EXPECT_FALSE(f.is_bridge);
    }
}

TEST(FindBridging, PerClusterUsesInducedSubgraphs) {
    // Two triangles joined through node 3; per cluster the joint disappears.
    Graph g = make_graph(7, {{0, 1}, {1, 2}, {0, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {4, 6}});
    for (NodeIndex v = 0; v < 7; ++v) g.node(v).cluster = v < 4 ? 0 : 1;
    const auto whole = find_bridging_nodes(g, {.mode = BridgeMode::exact});
    EXPECT_EQ(bridging_set(whole), (std::set<NodeIndex>{2, 3, 4}));
    const auto split = find_bridging_nodes(g, {.mode = BridgeMode::exact, .per_cluster = true});
    EXPECT_EQ(bridging_set(split), (std::set<NodeIndex>{2}));
}

TEST(FindBridging, ModeParsing) {
    EXPECT_EQ(parse_bridge_mode("exact"), BridgeMode::exact);
    EXPECT_EQ(parse_bridge_mode("paper-pipeline"), BridgeMode::paper_pipeline);
    EXPECT_FALSE(parse_bridge_mode("fast"));
}

TEST(FindBridging, BarbellBridgesCarryMoreBetweenness) {
    // Three 6-cliques chained through single joint vertices.
    std::vector<std::pair<NodeIndex, NodeIndex>> e;
    for (NodeIndex base : {0u, 6u, 12u})
        for (NodeIndex a = 0; a < 6; ++a)
            for (NodeIndex b = a + 1; b < 6; ++b) e.emplace_back(base + a, base + b);
    e.emplace_back(5, 18);
    e.emplace_back(18, 6);
    e.emplace_back(11, 12);
    const Graph g = make_graph(19, e);
    const auto r = find_bridging_nodes(g);
    double sb = 0, sn = 0;
    std::size_t nb = 0, nn = 0;
    for (const auto& f : r.findings) (f.is_bridge ? (sb += f.betweenness, ++nb) : (sn += f.betweenness, ++nn));
    ASSERT_GT(nb, 0u);
    ASSERT_GT(nn, 0u);
    EXPECT_GT(sb / nb, sn / nn);
}
