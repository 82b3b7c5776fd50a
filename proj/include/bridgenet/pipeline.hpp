#pragma once
// End-to-end run: configuration, stage orchestration and the run manifest.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "bridgenet/annotate.hpp"
#include "bridgenet/bridges.hpp"
#include "bridgenet/centrality.hpp"
#include "bridgenet/common.hpp"
#include "bridgenet/community.hpp"
#include "bridgenet/detail/io.hpp"
#include "bridgenet/graph.hpp"
#include "bridgenet/ingest.hpp"
#include "bridgenet/report.hpp"
#include "bridgenet/similarity.hpp"
#include "bridgenet/text_analysis.hpp"
#include "bridgenet/user_graph.hpp"

namespace bridgenet {

inline std::filesystem::path default_data_dir() {
#ifdef BRIDGENET_DATA_DIR
    return BRIDGENET_DATA_DIR;
#else
    return "data";
#endif
}

// Plain `key = value` configuration. Unknown keys are rejected; unset keys
// take their defaults and are recorded in the manifest as resolved.
class RunConfig {
public:
    struct Key {
        const char* name;
        const char* fallback;  // nullptr: required
        const char* help;
    };

    static const std::vector<Key>& keys() {
        static const std::vector<Key> k{
            {"input", nullptr, "posts file"},
            {"format", "json-lines", "json-lines or csv"},
            {"stopwords", "", "stopword list (default: shipped English list)"},
            {"embeddings", nullptr, "EMB1 embedding file"},
            {"theta", "0.8", "cosine threshold"},
            {"per_event", "false", "only link documents of the same event"},
            {"block_size", "256", "similarity row-panel size"},
            {"threads", "1", "worker threads (0: all cores)"},
            {"resolution", "1.0", "Leiden resolution"},
            {"seed", "7", "seed for Leiden, LDA and sampling"},
            {"min_cluster_size", "11", "smallest cluster kept by pruning"},
            {"bridge_mode", "paper-pipeline", "paper-pipeline or exact"},
            {"top_fraction", "0.1", "betweenness cutoff for bridge candidates"},
            {"per_cluster", "false", "test bridges inside each cluster"},
            {"betweenness_samples", "0", "pivot count for sampled betweenness (0: exact)"},
            {"lexicons", "", "lexicon directory (default: shipped lexicons)"},
            {"identity_lexicon", "", "identity term CSV (default: shipped lexicon)"},
            {"bot_weights", "", "username heuristic weights (default: shipped weights)"},
            {"bot_scores", "", "external user_id,p_bot CSV"},
            {"bot_strict", "false", "fail when a user is missing from bot_scores"},
            {"lda_topics", "3", "topics per cluster"},
            {"lda_iterations", "2000", "Gibbs sweeps"},
            {"lda_alpha", "", "document-topic prior (default: 50 / topics)"},
            {"lda_beta", "0.01", "topic-word prior"},
            {"lda_min_frequency", "2", "minimum corpus frequency of a vocabulary word"},
            {"user_binary", "false", "unit user-edge weights instead of counts"},
        };
        return k;
    }

    static bool known(std::string_view key) {
        return std::any_of(keys().begin(), keys().end(), [&](const Key& k) { return key == k.name; });
    }

    void set(std::string_view key, std::string value) {
        if (!known(key)) throw ConfigError("unknown configuration key '" + std::string(key) + "'");
        values_[std::string(key)] = std::move(value);
    }

    bool has(std::string_view key) const { return values_.contains(std::string(key)); }

    // Relative paths resolve against this directory.
    std::filesystem::path base_dir;

    static RunConfig parse(std::string_view text, std::filesystem::path base = {}) {
        RunConfig cfg;
        cfg.base_dir = std::move(base);
        std::istringstream in{std::string(text)};
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            const auto b = line.find_first_not_of(" \t\r");
            if (b == std::string::npos) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
            cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
        return cfg;
    }

    static RunConfig load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config " + path.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse(ss.str(), path.parent_path());
    }

    // Value or default; throws for a missing required key.
    std::string get(std::string_view key) const {
        if (auto it = values_.find(std::string(key)); it != values_.end()) return it->second;
        for (const auto& k : keys()) {
            if (key != k.name) continue;
            if (!k.fallback) throw ConfigError("configuration key '" + std::string(key) + "' is required");
            return k.fallback;
        }
        throw ConfigError("unknown configuration key '" + std::string(key) + "'");
    }

    std::filesystem::path path(std::string_view key, const std::filesystem::path& fallback = {}) const {
        const std::string v = get(key);
        if (v.empty()) return fallback;
        std::filesystem::path p(v);
        return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
    }

private:
    static std::string trim(std::string s) {
        s.erase(0, s.find_first_not_of(" \t\r"));
        s.erase(s.find_last_not_of(" \t\r") + 1);
        return s;
    }

    std::map<std::string, std::string> values_;
};

struct RunParams {
    std::filesystem::path input;
    InputFormat format = InputFormat::json_lines;
    std::filesystem::path stopwords;
    std::filesystem::path embeddings;
    double theta = 0.8;
    bool per_event = false;
    std::size_t block_size = 256;
    unsigned threads = 1;
    double resolution = 1.0;
    std::uint64_t seed = 7;
    std::size_t min_cluster_size = 11;
    BridgeMode bridge_mode = BridgeMode::paper_pipeline;
    double top_fraction = 0.1;
    bool per_cluster = false;
    std::size_t betweenness_samples = 0;
    std::filesystem::path lexicons;
    std::filesystem::path identity_lexicon;
    std::filesystem::path bot_weights;
    std::optional<std::filesystem::path> bot_scores;
    bool bot_strict = false;
    std::size_t lda_topics = 3;
    std::size_t lda_iterations = 2000;
    std::optional<double> lda_alpha;
    double lda_beta = 0.01;
    std::size_t lda_min_frequency = 2;
    bool user_binary = false;
};

namespace detail {

inline double parse_number(const RunConfig& cfg, std::string_view key) {
    const std::string v = cfg.get(key);
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
        return d;
    } catch (const std::logic_error&) {
        throw ConfigError("configuration key '" + std::string(key) + "': '" + v + "' is not a number");
    }
}

inline std::uint64_t parse_count(const RunConfig& cfg, std::string_view key) {
    const std::string v = cfg.get(key);
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
        throw ConfigError("configuration key '" + std::string(key) + "': '" + v + "' is not a non-negative integer");
    try {
        return std::stoull(v);
    } catch (const std::out_of_range&) {
        throw ConfigError("configuration key '" + std::string(key) + "': '" + v + "' is out of range");
    }
}

inline bool parse_flag(const RunConfig& cfg, std::string_view key) {
    const std::string v = to_lower(cfg.get(key));
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("configuration key '" + std::string(key) + "': '" + v + "' is not a boolean");
}

}  // namespace detail

inline RunParams resolve(const RunConfig& cfg) {
    const auto data = default_data_dir();
    RunParams p;
    p.input = cfg.path("input");
    if (auto f = parse_input_format(cfg.get("format"))) p.format = *f;
    else throw ConfigError("unknown input format '" + cfg.get("format") + "'");
    p.stopwords = cfg.path("stopwords", data / "stopwords_en.txt");
    p.embeddings = cfg.path("embeddings");
    p.theta = SimilarityThreshold(detail::parse_number(cfg, "theta")).value();
    p.per_event = detail::parse_flag(cfg, "per_event");
    p.block_size = detail::parse_count(cfg, "block_size");
    if (p.block_size == 0) throw ConfigError("block_size must be positive");
    p.threads = static_cast<unsigned>(detail::parse_count(cfg, "threads"));
    p.resolution = detail::parse_number(cfg, "resolution");
    if (!(p.resolution > 0.0)) throw ConfigError("resolution must be positive");
    p.seed = detail::parse_count(cfg, "seed");
    p.min_cluster_size = detail::parse_count(cfg, "min_cluster_size");
    if (p.min_cluster_size == 0) throw ConfigError("min_cluster_size must be at least 1");
    if (auto m = parse_bridge_mode(cfg.get("bridge_mode"))) p.bridge_mode = *m;
    else throw ConfigError("unknown bridge_mode '" + cfg.get("bridge_mode") + "'");
    p.top_fraction = detail::parse_number(cfg, "top_fraction");
    if (!(p.top_fraction > 0.0 && p.top_fraction <= 1.0)) throw ConfigError("top_fraction must lie in (0, 1]");
    p.per_cluster = detail::parse_flag(cfg, "per_cluster");
    p.betweenness_samples = detail::parse_count(cfg, "betweenness_samples");
    p.lexicons = cfg.path("lexicons", data / "lexicons");
    p.identity_lexicon = cfg.path("identity_lexicon", data / "identity_lexicon.csv");
    p.bot_weights = cfg.path("bot_weights", data / "bot_weights.cfg");
    if (!cfg.get("bot_scores").empty()) p.bot_scores = cfg.path("bot_scores");
    p.bot_strict = detail::parse_flag(cfg, "bot_strict");
    p.lda_topics = detail::parse_count(cfg, "lda_topics");
    if (p.lda_topics == 0) throw ConfigError("lda_topics must be at least 1");
    p.lda_iterations = detail::parse_count(cfg, "lda_iterations");
    if (!cfg.get("lda_alpha").empty()) {
        p.lda_alpha = detail::parse_number(cfg, "lda_alpha");
        if (!(*p.lda_alpha > 0.0)) throw ConfigError("lda_alpha must be positive");
    }
    p.lda_beta = detail::parse_number(cfg, "lda_beta");
    if (!(p.lda_beta > 0.0)) throw ConfigError("lda_beta must be positive");
    p.lda_min_frequency = detail::parse_count(cfg, "lda_min_frequency");
    p.user_binary = detail::parse_flag(cfg, "user_binary");
    return p;
}

// Resolved parameters as recorded in the manifest. Paths are kept as written
// in the configuration so the record does not depend on the working directory.
inline nlohmann::json parameters_json(const RunConfig& cfg, const RunParams& p) {
    nlohmann::json j{{"input", cfg.get("input")},
                     {"format", p.format == InputFormat::csv ? "csv" : "json-lines"},
                     {"stopwords", cfg.get("stopwords").empty() ? "<shipped>/stopwords_en.txt" : cfg.get("stopwords")},
                     {"embeddings", cfg.get("embeddings")},
                     {"theta", p.theta},
                     {"per_event", p.per_event},
                     {"block_size", p.block_size},
                     {"threads", p.threads},
                     {"resolution", p.resolution},
                     {"seed", p.seed},
                     {"min_cluster_size", p.min_cluster_size},
                     {"bridge_mode", to_string(p.bridge_mode)},
                     {"top_fraction", p.top_fraction},
                     {"per_cluster", p.per_cluster},
                     {"betweenness_samples", p.betweenness_samples},
                     {"lexicons", cfg.get("lexicons").empty() ? "<shipped>/lexicons" : cfg.get("lexicons")},
                     {"identity_lexicon",
                      cfg.get("identity_lexicon").empty() ? "<shipped>/identity_lexicon.csv" : cfg.get("identity_lexicon")},
                     {"bot_weights", cfg.get("bot_weights").empty() ? "<shipped>/bot_weights.cfg" : cfg.get("bot_weights")},
                     {"bot_scores", p.bot_scores ? nlohmann::json(cfg.get("bot_scores")) : nlohmann::json(nullptr)},
                     {"bot_strict", p.bot_strict},
                     {"lda_topics", p.lda_topics},
                     {"lda_iterations", p.lda_iterations},
                     {"lda_alpha", p.lda_alpha.value_or(50.0 / static_cast<double>(p.lda_topics))},
                     {"lda_beta", p.lda_beta},
                     {"lda_min_frequency", p.lda_min_frequency},
                     {"user_binary", p.user_binary}};
    return j;
}

inline nlohmann::json normalization_json(const RunParams& p) {
    return {{"degree", "degree / (n - 1)"},
            {"eigenvector", "power iteration on A + I per connected component, unit L2 norm over all nodes"},
            {"hub", "HITS hub score on A + I, unit L2 norm over all nodes"},
            {"betweenness", p.betweenness_samples ? "unweighted Brandes over sampled pivots scaled by n / k, divided by (n - 1)(n - 2)"
                                                  : "unweighted Brandes, divided by (n - 1)(n - 2)"},
            {"user_edge_weight", p.user_binary ? "1 per linked user pair" : "count of content edges between the two users"},
            {"similarity", "cosine strictly greater than theta"}};
}

struct RunResult {
    bool ok = false;
    std::string failed_stage;
    std::string error;
    std::filesystem::path dir;
    nlohmann::json manifest;
};

namespace detail {

// Collects stage outputs inside the staging directory with their checksums.
class RunWriter {
public:
    explicit RunWriter(std::filesystem::path dir) : dir_(std::move(dir)) {}

    void begin(std::string stage) {
        stages_.push_back({{"name", std::move(stage)}, {"status", "running"}, {"outputs", nlohmann::json::object()}});
    }
    void finish() { stages_.back()["status"] = "ok"; }
    void fail() { stages_.back()["status"] = "failed"; }

    void write(const std::string& rel, std::string_view content) {
        const auto path = dir_ / rel;
        std::filesystem::create_directories(path.parent_path());
        atomic_write(path, content);
        stages_.back()["outputs"][rel] = sha256_hex(content);
    }
    void write_json(const std::string& rel, const nlohmann::json& j) { write(rel, j.dump(2) + "\n"); }

    void write_graph(const std::string& rel, const Graph& g) {
        write(rel, edge_list_text(g));
        write(rel + ".nodes.jsonl", node_sidecar_text(g));
    }

    const nlohmann::json& stages() const noexcept { return stages_; }
    const std::filesystem::path& dir() const noexcept { return dir_; }

private:
    std::filesystem::path dir_;
    nlohmann::json stages_ = nlohmann::json::array();
};

inline nlohmann::json input_record(const std::string& label, const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw ConfigError(label + " not found: " + path.string());
    if (std::filesystem::is_directory(path)) {
        std::vector<std::filesystem::path> files;
        for (const auto& e : std::filesystem::directory_iterator(path))
            if (e.is_regular_file()) files.push_back(e.path());
        std::sort(files.begin(), files.end());
        nlohmann::json j = nlohmann::json::object();
        for (const auto& f : files) j[f.filename().string()] = sha256_file(f);
        return j;
    }
    return sha256_file(path);
}

inline std::string xy_csv(const std::vector<std::pair<std::string, double>>& points) {
    std::string out = "x,y\n";
    for (const auto& [x, y] : points) out += csv_escape(x) + "," + format_double(y) + "\n";
    return out;
}

inline nlohmann::json by_platform_json(std::span<const NodeProfile> profiles) {
    nlohmann::json j = nlohmann::json::object();
    const auto counts = bridging_by_platform(profiles);
    for (std::size_t i = 0; i < 3; ++i) {
        j[std::string(to_string(kPlatforms[i]))] = {
            {"nodes", counts[i].nodes}, {"bridges", counts[i].bridges}, {"proportion", counts[i].proportion()}};
    }
    return j;
}

// Everything derived for one analysed graph (content or user).
struct GraphRun {
    Graph full;
    Partition partition;
    Graph pruned;
    BridgeReport bridges;
    CentralityTable centrality;
    std::vector<CueVector> cues;
};

inline std::vector<NodeProfile> build_profiles(const GraphRun& r) {
    std::vector<NodeProfile> out;
    out.reserve(r.pruned.n());
    for (NodeIndex v = 0; v < r.pruned.n(); ++v) {
        const auto& node = r.pruned.node(v);
        NodeProfile p;
        p.id = node.id;
        p.kind = node.kind;
        p.platform = node.platform;
        p.cluster = node.cluster;
        p.is_bridge = r.bridges.findings[v].is_bridge;
        p.degree = r.centrality.degree[v];
        p.eigenvector = r.centrality.eigenvector[v];
        p.hub = r.centrality.hub[v];
        p.betweenness = r.centrality.betweenness[v];
        p.cues = r.cues[v];
        out.push_back(std::move(p));
    }
    return out;
}

inline void write_plot_data(RunWriter& w, const std::string& name, std::span<const NodeProfile> profiles,
                            const PlatformLinkMatrix& links, const BridgingComparison& cmp) {
    const auto counts = bridging_by_platform(profiles);
    std::vector<std::pair<std::string, double>> prop;
    for (std::size_t i = 0; i < 3; ++i) prop.emplace_back(std::string(to_string(kPlatforms[i])), counts[i].proportion());
    w.write("plot-data/" + name + "_bridging_proportion.csv", xy_csv(prop));

    std::vector<std::pair<std::string, double>> pairs;
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = a; b < 3; ++b)
            pairs.emplace_back(std::string(to_string(kPlatforms[a])) + "-" + std::string(to_string(kPlatforms[b])),
                               static_cast<double>(links.counts[a][b]));
    w.write("plot-data/" + name + "_platform_links.csv", xy_csv(pairs));

    for (const auto& [metric, _] : profile_metrics()) {
        w.write("plot-data/" + name + "_" + metric + "_mean.csv",
                xy_csv({{"bridging", cmp.bridging.metrics.at(metric).mean},
                        {"non_bridging", cmp.non_bridging.metrics.at(metric).mean}}));
    }
}

}  // namespace detail

struct RunOptions {
    bool overwrite = false;
};

// Runs every stage into a staging directory next to `out`, then renames it
// into place. Configuration problems throw ConfigError before any stage runs;
// a failing stage is reported in the result and in the manifest.
inline RunResult run_pipeline(const RunConfig& cfg, const std::filesystem::path& out, const RunOptions& run_opts = {}) {
    namespace fs = std::filesystem;
    const RunParams p = resolve(cfg);

    // Startup resources: any failure here is a configuration error.
    const StopwordSet stopwords = load_stopwords(p.stopwords);
    const Lexicons lexicons = load_lexicons(p.lexicons);
    const IdentityLexicon identity = load_identity_lexicon(p.identity_lexicon);
    BotScorer scorer;
    scorer.weights = load_bot_weights(p.bot_weights);
    scorer.strict = p.bot_strict;
    if (p.bot_scores) scorer.external = load_bot_scores(*p.bot_scores);

    nlohmann::json manifest;
    manifest["format"] = "bridgenet-run/1";
    manifest["parameters"] = parameters_json(cfg, p);
    manifest["normalization"] = normalization_json(p);
    nlohmann::json inputs{{"input", detail::input_record("input", p.input)},
                          {"embeddings", detail::input_record("embeddings", p.embeddings)},
                          {"stopwords", detail::input_record("stopwords", p.stopwords)},
                          {"lexicons", detail::input_record("lexicons", p.lexicons)},
                          {"identity_lexicon", detail::input_record("identity_lexicon", p.identity_lexicon)},
                          {"bot_weights", detail::input_record("bot_weights", p.bot_weights)}};
    if (p.bot_scores) inputs["bot_scores"] = detail::input_record("bot_scores", *p.bot_scores);
    manifest["inputs"] = inputs;

    if (fs::exists(out) && !run_opts.overwrite && !(fs::is_directory(out) && fs::is_empty(out)))
        throw ConfigError("output directory " + out.string() + " exists and is not empty");
    fs::path staging = out;
    staging += ".staging";
    fs::remove_all(staging);
    fs::create_directories(staging);

    detail::RunWriter w(staging);
    RunResult result;
    std::vector<DocRecord> docs;
    std::vector<Post> posts;
    detail::GraphRun content, users;

    auto run_stage = [&](const std::string& name, const std::function<void()>& body) {
        if (!result.failed_stage.empty()) return;
        w.begin(name);
        try {
            body();
            w.finish();
        } catch (const std::exception& e) {
            w.fail();
            result.failed_stage = name;
            result.error = e.what();
        }
    };

    run_stage("ingest", [&] {
        ParseResult parsed = parse_dataset(p.input, p.format);
        docs = clean_posts(parsed.posts, stopwords);
        for (const auto& d : docs) posts.push_back(d.post);
        std::ostringstream ss;
        write_doc_records(ss, docs);
        w.write("clean.jsonl", ss.str());
        nlohmann::json errors = nlohmann::json::array();
        for (const auto& e : parsed.errors) errors.push_back({{"line", e.line}, {"message", e.message}});
        std::size_t degenerate = 0;
        for (const auto& d : docs) degenerate += d.clean.degenerate ? 1 : 0;
        w.write_json("ingest.json", {{"records", parsed.records},
                                     {"posts", docs.size()},
                                     {"duplicates", parsed.duplicates},
                                     {"degenerate", degenerate},
                                     {"errors", errors}});
    });

    run_stage("similarity", [&] {
        const EmbeddingMatrix emb = load_embeddings(p.embeddings);
        ContentGraphOptions opts;
        opts.similarity.threshold = SimilarityThreshold(p.theta);
        opts.similarity.block_size = p.block_size;
        opts.similarity.threads = p.threads;
        opts.per_event = p.per_event;
        content.full = build_content_graph(emb, posts, opts);
        w.write_graph("content.graph", content.full);
        w.write_json("content.stats.json", to_json(graph_stats(content.full)));
    });

    const LeidenOptions leiden_opts{.resolution = p.resolution, .seed = p.seed};
    const PruneConfig prune_cfg{.min_cluster_size = p.min_cluster_size};
    auto cluster = [&](detail::GraphRun& r, const std::string& name) {
        r.partition = r.full.n() ? leiden(r.full, leiden_opts) : Partition{};
        r.pruned = r.full.n() ? prune(r.full, r.partition, prune_cfg) : Graph{};
        w.write_json(name + ".partition.json", partition_json(r.full, r.partition));
        w.write_graph(name + ".pruned.graph", r.pruned);
    };

    run_stage("community", [&] { cluster(content, "content"); });

    run_stage("user_graph", [&] {
        users.full = build_user_graph(content.full, authorship_from(std::span<const DocRecord>(docs)),
                                      {.binary = p.user_binary});
        w.write_graph("user.graph", users.full);
        w.write_json("user.stats.json", to_json(user_graph_stats(users.full)));
        cluster(users, "user");
    });

    run_stage("bridges", [&] {
        const BridgeOptions opts{.mode = p.bridge_mode, .top_fraction = p.top_fraction, .per_cluster = p.per_cluster,
                                 .threads = std::max(1u, p.threads)};
        for (auto* r : {&content, &users}) r->bridges = find_bridging_nodes(r->pruned, opts);
        w.write_json("content.bridges.json", findings_json(content.bridges));
        w.write_json("user.bridges.json", findings_json(users.bridges));
    });

    run_stage("centrality", [&] {
        for (auto* r : {&content, &users}) {
            CentralityOptions opts;
            opts.betweenness.threads = std::max(1u, p.threads);
            opts.betweenness.seed = p.seed;
            if (p.betweenness_samples && p.betweenness_samples < r->pruned.n()) {
                opts.betweenness.exact = false;
                opts.betweenness.sample_size = p.betweenness_samples;
            }
            r->centrality = compute_centralities(r->pruned, opts);
        }
        w.write("content.centrality.csv", centrality_csv(content.pruned, content.centrality));
        w.write("user.centrality.csv", centrality_csv(users.pruned, users.centrality));
    });

    nlohmann::json topics_json = nlohmann::json::array();
    run_stage("text", [&] {
        std::unordered_map<std::string, const DocRecord*> by_id;
        for (const auto& d : docs) by_id.emplace(d.post.doc_id, &d);
        for (NodeIndex v = 0; v < content.pruned.n(); ++v)
            content.cues.push_back(extract_cues(by_id.at(content.pruned.node(v).id)->post.raw_text, lexicons));
        for (NodeIndex v = 0; v < users.pruned.n(); ++v) {
            std::string words;
            for (const auto& part : split_username(users.pruned.node(v).labels.at("username"))) {
                if (!words.empty()) words += ' ';
                words += part;
            }
            users.cues.push_back(extract_cues(words, lexicons));
        }
        w.write("content.cues.csv", cues_csv(content.pruned, content.cues));
        w.write("user.cues.csv", cues_csv(users.pruned, users.cues));

        std::map<int, std::vector<NodeIndex>> clusters;
        for (NodeIndex v = 0; v < content.pruned.n(); ++v) clusters[*content.pruned.node(v).cluster].push_back(v);
        for (const auto& [c, members] : clusters) {
            std::vector<CleanDoc> cluster_docs;
            for (NodeIndex v : members) cluster_docs.push_back(by_id.at(content.pruned.node(v).id)->clean);
            nlohmann::json entry{{"cluster", c}, {"documents", members.size()}};
            LdaOptions lda{.topics = p.lda_topics, .alpha = p.lda_alpha, .beta = p.lda_beta,
                           .iterations = p.lda_iterations, .seed = p.seed + static_cast<std::uint64_t>(c),
                           .min_frequency = p.lda_min_frequency};
            try {
                const TopicModel model = lda_fit(std::span<const CleanDoc>(cluster_docs), lda);
                std::vector<double> mass(model.topics, 0.0);
                for (const auto& row : model.doc_topic)
                    for (std::size_t k = 0; k < model.topics; ++k) mass[k] += row[k];
                nlohmann::json topics = nlohmann::json::array();
                for (std::size_t k = 0; k < model.topics; ++k) {
                    topics.push_back({{"topic", k},
                                      {"weight", mass[k] / static_cast<double>(model.doc_topic.size())},
                                      {"top_words", top_words(model, k, 10)}});
                }
                std::stable_sort(topics.begin(), topics.end(), [](const nlohmann::json& a, const nlohmann::json& b) {
                    return a["weight"].get<double>() > b["weight"].get<double>();
                });
                nlohmann::json dominant = nlohmann::json::array();
                for (std::size_t i = 0; i < members.size(); ++i) {
                    const auto& row = model.doc_topic[i];
                    const auto k = std::max_element(row.begin(), row.end()) - row.begin();
                    dominant.push_back({{"node", content.pruned.node(members[i]).id},
                                        {"topic", k},
                                        {"is_bridge", content.bridges.findings[members[i]].is_bridge}});
                }
                entry["vocabulary"] = model.vocab.size();
                entry["topics"] = topics;
                entry["dominant_topic"] = dominant;
                entry["final_perplexity"] = model.perplexity.back().second;
            } catch (const Error& e) {
                entry["skipped"] = e.what();
            }
            topics_json.push_back(entry);
        }
        w.write_json("topics.json", topics_json);
    });

    std::unordered_map<std::string, std::pair<BotVerdict, IdentityAnnotation>> annotations;
    run_stage("annotate", [&] {
        nlohmann::json arr = nlohmann::json::array();
        for (NodeIndex v = 0; v < users.full.n(); ++v) {
            const auto& node = users.full.node(v);
            const auto& user_id = node.labels.at("user_id");
            const auto& username = node.labels.at("username");
            BotVerdict bot = scorer.score(node.id, username, {user_id});
            IdentityAnnotation id = identity_annotate(node.id, username, identity);
            arr.push_back({{"user", node.id}, {"bot", to_json(bot)}, {"identity", to_json(id)}});
            annotations.emplace(node.id, std::make_pair(std::move(bot), std::move(id)));
        }
        w.write_json("annotations.json", arr);
    });

    run_stage("report", [&] {
        auto content_profiles = detail::build_profiles(content);
        auto user_profiles = detail::build_profiles(users);
        for (auto& prof : user_profiles) {
            const auto& [bot, id] = annotations.at(prof.id);
            prof.bot = bot;
            prof.identity = id;
        }
        w.write("content.profiles.csv", profiles_csv(content_profiles));
        w.write("user.profiles.csv", profiles_csv(user_profiles));

        nlohmann::json summary;
        auto graph_summary = [&](const std::string& name, const detail::GraphRun& r, std::span<const NodeProfile> profiles) {
            const auto links_full = platform_link_matrix(r.full);
            const auto links_pruned = platform_link_matrix(r.pruned);
            const auto cmp = bridging_comparison(profiles);
            w.write(name + ".comparison.csv", comparison_csv(cmp));
            w.write_json(name + ".comparison.json", to_json(cmp));
            detail::write_plot_data(w, name, profiles, links_pruned, cmp);
            summary[name] = {{"nodes", r.full.n()},
                             {"edges", r.full.m()},
                             {"clusters", r.partition.cluster_count()},
                             {"modularity", r.partition.quality},
                             {"pruned_nodes", r.pruned.n()},
                             {"pruned_edges", r.pruned.m()},
                             {"bridge_count", r.bridges.bridge_count},
                             {"bridging_proportion", r.bridges.bridging_proportion},
                             {"bridging_by_platform", detail::by_platform_json(profiles)},
                             {"platform_links", to_json(links_full)},
                             {"platform_links_pruned", to_json(links_pruned)}};
            return cmp;
        };
        graph_summary("content", content, content_profiles);
        const auto user_cmp = graph_summary("user", users, user_profiles);

        w.write("plot-data/user_bot_fraction.csv",
                detail::xy_csv({{"bridging", user_cmp.bridging.bot_fraction.value_or(0.0)},
                                {"non_bridging", user_cmp.non_bridging.bot_fraction.value_or(0.0)}}));
        auto identity_plot = [&](const std::string& group, const GroupSummary& g) {
            std::vector<std::pair<std::string, double>> pts;
            for (const auto& [_, name] : kIdentityCategories) {
                const auto it = g.identity_categories.find(std::string(name));
                pts.emplace_back(std::string(name), it == g.identity_categories.end() ? 0.0 : double(it->second));
            }
            w.write("plot-data/user_identity_" + group + ".csv", detail::xy_csv(pts));
        };
        identity_plot("bridging", user_cmp.bridging);
        identity_plot("non_bridging", user_cmp.non_bridging);

        // Per-event view of the pruned Content graph.
        std::unordered_map<std::string, Event> doc_event;
        for (const auto& d : docs) doc_event.emplace(d.post.doc_id, d.post.event);
        nlohmann::json per_event = nlohmann::json::object();
        for (Event ev : {Event::helene, Event::milton, Event::other}) {
            std::vector<NodeIndex> members;
            std::vector<NodeProfile> ev_profiles;
            for (NodeIndex v = 0; v < content.pruned.n(); ++v) {
                if (doc_event.at(content.pruned.node(v).id) != ev) continue;
                members.push_back(v);
                ev_profiles.push_back(content_profiles[v]);
            }
            if (members.empty()) continue;
            const Graph sub = content.pruned.induced(members);
            const auto cmp = bridging_comparison(ev_profiles);
            std::size_t bridges = 0;
            for (const auto& prof : ev_profiles) bridges += prof.is_bridge ? 1 : 0;
            per_event[std::string(to_string(ev))] = {
                {"nodes", members.size()},
                {"edges_within_event", sub.m()},
                {"bridge_count", bridges},
                {"bridging_proportion", static_cast<double>(bridges) / static_cast<double>(members.size())},
                {"bridging_by_platform", detail::by_platform_json(ev_profiles)},
                {"platform_links", to_json(platform_link_matrix(sub))},
                {"comparison", to_json(cmp)}};
        }
        w.write_json("per_event.json", per_event);
        summary["sources"] = {{"content", {"content.graph", "content.partition.json", "content.pruned.graph",
                                           "content.bridges.json", "content.centrality.csv", "content.cues.csv"}},
                              {"user", {"user.graph", "user.partition.json", "user.pruned.graph", "user.bridges.json",
                                        "user.centrality.csv", "user.cues.csv", "annotations.json"}},
                              {"topics", {"topics.json"}}};
        w.write_json("summary.json", summary);
    });

    result.ok = result.failed_stage.empty();
    manifest["status"] = result.ok ? "ok" : "failed";
    manifest["failed_stage"] = result.ok ? nlohmann::json(nullptr) : nlohmann::json(result.failed_stage);
    manifest["error"] = result.ok ? nlohmann::json(nullptr) : nlohmann::json(result.error);
    manifest["stages"] = w.stages();
    detail::atomic_write(staging / "manifest.json", manifest.dump(2) + "\n");

    if (fs::exists(out)) fs::remove_all(out);
    if (!out.parent_path().empty()) fs::create_directories(out.parent_path());
    fs::rename(staging, out);
    result.dir = out;
    result.manifest = std::move(manifest);
    return result;
}

}  // namespace bridgenet
