#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <fstream>

#include "bridgenet/pipeline.hpp"
#include "oracles.hpp"

using namespace bridgenet;
namespace fs = std::filesystem;

namespace {

Graph platform_graph(const std::vector<Platform>& platforms, const std::vector<std::pair<NodeIndex, NodeIndex>>& edges) {
    Graph g;
    for (std::size_t i = 0; i < platforms.size(); ++i)
        g.add_node({.id = "n" + std::to_string(i), .platform = platforms[i]});
    for (auto [a, b] : edges) g.add_edge(a, b);
    return g;
}

NodeProfile profile(bool bridge, double betweenness, std::size_t caps = 0) {
    NodeProfile p;
    p.is_bridge = bridge;
    p.betweenness = betweenness;
    p.cues.all_caps_count = caps;
    return p;
}

fs::path fixture(const char* name) { return fs::path(BRIDGENET_FIXTURE_DIR) / name; }

RunConfig fixture_config() {
    RunConfig cfg;
    cfg.set("input", fixture("posts20.jsonl").string());
    cfg.set("embeddings", fixture("posts20.emb").string());
    cfg.set("min_cluster_size", "3");
    cfg.set("lda_iterations", "200");
    return cfg;
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("bridgenet_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(LinkMatrix, Fractions) {
    using enum Platform;
    EXPECT_EQ(platform_link_matrix(platform_graph({X, X, X}, {{0, 1}, {1, 2}})).cross_platform_fraction(), 0.0);
    EXPECT_EQ(platform_link_matrix(platform_graph({X, Reddit, YouTube}, {{0, 1}, {1, 2}})).cross_platform_fraction(), 1.0);
    const auto m = platform_link_matrix(platform_graph({X, X, X, Reddit}, {{0, 1}, {1, 2}, {0, 2}, {2, 3}}));
    EXPECT_EQ(m.cross_platform_fraction(), 0.25);
    EXPECT_EQ(m.total(), 4u);
    EXPECT_EQ(m.counts[0][2], m.counts[2][0]);
    EXPECT_EQ(platform_link_matrix(Graph{}).cross_platform_fraction(), 0.0);
}

TEST(LinkMatrix, JsonRoundTrip) {
    using enum Platform;
    const auto m = platform_link_matrix(platform_graph({X, YouTube, Reddit, Reddit}, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}));
    EXPECT_EQ(link_matrix_from_json(nlohmann::json::parse(to_json(m).dump())), m);
}

TEST(LinkMatrix, MissingPlatformRejected) {
    const Graph g = oracle::make_graph(2, {{0, 1}});
    EXPECT_THROW(platform_link_matrix(g), Error);
}

TEST(Comparison, HandComputedMeansAndMedians) {
    const std::vector<NodeProfile> ps{profile(true, 0.6, 2), profile(true, 0.2, 4), profile(false, 0.1),
                                      profile(false, 0.0), profile(false, 0.2)};
    const auto c = bridging_comparison(ps);
    EXPECT_EQ(c.bridging.size, 2u);
    EXPECT_EQ(c.non_bridging.size, 3u);
    EXPECT_NEAR(c.bridging.metrics.at("betweenness").mean, 0.4, 1e-15);
    EXPECT_NEAR(c.bridging.metrics.at("betweenness").median, 0.4, 1e-15);
    EXPECT_NEAR(c.non_bridging.metrics.at("betweenness").mean, 0.1, 1e-15);
    EXPECT_NEAR(c.non_bridging.metrics.at("betweenness").median, 0.1, 1e-15);
    EXPECT_EQ(c.bridging.metrics.at("all_caps_count").mean, 3.0);
    EXPECT_FALSE(c.bridging.bot_fraction);
}

TEST(Comparison, EmptyGroupFlagged) {
    const std::vector<NodeProfile> ps{profile(true, 0.5), profile(true, 0.1)};
    const auto c = bridging_comparison(ps);
    EXPECT_TRUE(c.non_bridging.empty);
    EXPECT_FALSE(c.bridging.empty);
    EXPECT_EQ(c.non_bridging.metrics.at("degree").count, 0u);
    const auto j = to_json(c);
    EXPECT_TRUE(j["non_bridging"]["empty"].get<bool>());
    EXPECT_TRUE(j["non_bridging"]["bot_fraction"].is_null());
}

TEST(Comparison, BotAndIdentityShares) {
    std::vector<NodeProfile> ps(4);
    for (std::size_t i = 0; i < 4; ++i) {
        ps[i].is_bridge = i < 2;
        ps[i].bot = make_verdict("u", i == 0 ? 0.9 : 0.1, BotSource::external_file);
        IdentityAnnotation a;
        if (i != 1) {
            a.categories = {IdentityCategory::job};
            a.has_identity = true;
        }
        ps[i].identity = a;
    }
    const auto c = bridging_comparison(ps);
    EXPECT_EQ(*c.bridging.bot_fraction, 0.5);
    EXPECT_EQ(*c.non_bridging.bot_fraction, 0.0);
    EXPECT_EQ(*c.bridging.identity_fraction, 0.5);
    EXPECT_EQ(*c.non_bridging.identity_fraction, 1.0);
    EXPECT_EQ(c.non_bridging.identity_categories.at("job"), 2u);
}

TEST(Comparison, CsvShape) {
    const std::vector<NodeProfile> ps{profile(true, 0.5), profile(false, 0.1)};
    const std::string csv = comparison_csv(bridging_comparison(ps));
    EXPECT_EQ(csv.rfind("metric,group,count,mean,median\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 2 * static_cast<long>(profile_metrics().size()));
}

TEST(ComparisonProperty, GroupsPartitionNodes) {
    std::mt19937_64 rng(15);
    for (int t = 0; t < 30; ++t) {
        const Graph g = oracle::random_graph(30, 0.1, rng);
        const auto r = find_bridging_nodes(g, {.mode = BridgeMode::exact});
        std::vector<NodeProfile> ps;
        for (const auto& f : r.findings) ps.push_back(profile(f.is_bridge, f.betweenness));
        const auto c = bridging_comparison(ps);
        EXPECT_EQ(c.bridging.size + c.non_bridging.size, g.n());
        EXPECT_EQ(c.bridging.size, r.bridge_count);
    }
}

TEST(RunConfigTest, DefaultsRequiredAndUnknownKeys) {
    const auto cfg = RunConfig::parse("input = a.jsonl\nembeddings = b.emb # trailing\n", "/base");
    EXPECT_EQ(cfg.get("theta"), "0.8");
    EXPECT_EQ(cfg.path("input"), fs::path("/base/a.jsonl"));
    EXPECT_THROW(RunConfig::parse("thetaa = 0.7\n"), ConfigError);
    EXPECT_THROW(RunConfig{}.get("input"), ConfigError);
    EXPECT_THROW(RunConfig::parse("no equals sign\n"), ConfigError);
}

TEST(RunConfigTest, ResolveValidates) {
    auto cfg = fixture_config();
    EXPECT_EQ(resolve(cfg).theta, 0.8);
    cfg.set("theta", "1.5");
    EXPECT_THROW(resolve(cfg), ConfigError);
    cfg = fixture_config();
    cfg.set("bridge_mode", "fast");
    EXPECT_THROW(resolve(cfg), ConfigError);
    cfg = fixture_config();
    cfg.set("lda_topics", "zero");
    EXPECT_THROW(resolve(cfg), ConfigError);
}

TEST(RunConfigTest, MissingThetaRecordedAsDefault) {
    const auto cfg = fixture_config();
    const auto p = resolve(cfg);
    EXPECT_EQ(parameters_json(cfg, p)["theta"], 0.8);
    EXPECT_DOUBLE_EQ(parameters_json(cfg, p)["lda_alpha"].get<double>(), 50.0 / 3.0);
}

TEST(Pipeline, FixtureRunCompletesQuickly) {
    const auto out = scratch("run_fast");
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = run_pipeline(fixture_config(), out);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ASSERT_TRUE(r.ok) << r.failed_stage << ": " << r.error;
    EXPECT_LT(secs, 5.0);
    for (const char* f : {"manifest.json", "clean.jsonl", "content.graph", "content.partition.json", "content.bridges.json",
                          "content.centrality.csv", "content.cues.csv", "topics.json", "annotations.json",
                          "content.comparison.json", "user.comparison.json", "summary.json", "per_event.json"})
        EXPECT_TRUE(fs::exists(out / f)) << f;
    EXPECT_FALSE(fs::exists(fs::path(out.string() + ".staging")));

    const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
    EXPECT_EQ(manifest["status"], "ok");
    EXPECT_EQ(manifest["parameters"]["theta"], 0.8);
    EXPECT_EQ(manifest["parameters"]["min_cluster_size"], 3);

    // The fixture has one document linking the two event clusters.
    const auto bridges = nlohmann::json::parse(slurp(out / "content.bridges.json"));
    std::vector<std::string> ids;
    for (const auto& f : bridges)
        if (f["is_bridge"].get<bool>()) ids.push_back(f["node"]);
    EXPECT_EQ(ids, (std::vector<std::string>{"Reddit:303"}));
    fs::remove_all(out);
}

TEST(Pipeline, DeterministicManifests) {
    const auto a = scratch("run_det_a"), b = scratch("run_det_b");
    ASSERT_TRUE(run_pipeline(fixture_config(), a).ok);
    ASSERT_TRUE(run_pipeline(fixture_config(), b).ok);
    EXPECT_EQ(slurp(a / "manifest.json"), slurp(b / "manifest.json"));
    for (const auto& entry : fs::directory_iterator(a))
        if (entry.is_regular_file())
            EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << entry.path().filename();
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Pipeline, ExistingOutputNeedsOverwrite) {
    const auto out = scratch("run_exists");
    fs::create_directories(out);
    std::ofstream(out / "keep.txt") << "x";
    EXPECT_THROW(run_pipeline(fixture_config(), out), ConfigError);
    EXPECT_TRUE(fs::exists(out / "keep.txt"));
    EXPECT_TRUE(run_pipeline(fixture_config(), out, {.overwrite = true}).ok);
    EXPECT_FALSE(fs::exists(out / "keep.txt"));
    fs::remove_all(out);
}

TEST(Pipeline, StageFailureRecorded) {
    auto emb = load_embeddings(fixture("posts20.emb"));
    emb.ids[0] = "X:does-not-exist";
    const auto bad = fs::temp_directory_path() / "bridgenet_bad.emb";
    save_embeddings(bad, emb);
    auto cfg = fixture_config();
    cfg.set("embeddings", bad.string());
    const auto out = scratch("run_fail");
    const auto r = run_pipeline(cfg, out);
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(r.failed_stage, "similarity");
    EXPECT_NE(r.error.find("X:does-not-exist"), std::string::npos);
    const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
    EXPECT_EQ(manifest["status"], "failed");
    EXPECT_EQ(manifest["failed_stage"], "similarity");
    EXPECT_TRUE(fs::exists(out / "clean.jsonl"));
    fs::remove_all(out);
    fs::remove(bad);
}

TEST(Pipeline, MissingInputIsConfigError) {
    auto cfg = fixture_config();
    cfg.set("input", "/nonexistent/posts.jsonl");
    EXPECT_THROW(run_pipeline(cfg, scratch("run_missing")), ConfigError);
}
