// bridgenet command-line interface.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "bridgenet/bridgenet.hpp"

namespace fs = std::filesystem;
using namespace bridgenet;

namespace {

constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;

void emit(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-") {
        std::cout << text;
        return;
    }
    detail::atomic_write(out, text);
}

void emit_json(const std::string& out, const nlohmann::json& j) { emit(out, j.dump(2) + "\n"); }

std::string join_ids(const Graph& g, const std::vector<NodeIndex>& nodes) {
    std::string s;
    for (NodeIndex v : nodes) s += (s.empty() ? "" : " ") + g.node(v).id;
    return s;
}

std::vector<Post> posts_of(const std::vector<DocRecord>& docs) {
    std::vector<Post> out;
    out.reserve(docs.size());
    for (const auto& d : docs) out.push_back(d.post);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bridging-node analysis of multi-platform discourse graphs"};
    app.require_subcommand(1);
    std::function<int()> action;

    // ingest
    struct {
        std::string input, format = "json-lines", stopwords, out, errors;
    } ingest;
    auto* c_ingest = app.add_subcommand("ingest", "Parse and clean a post dataset");
    c_ingest->add_option("--input", ingest.input, "posts file")->required();
    c_ingest->add_option("--format", ingest.format, "json-lines or csv");
    c_ingest->add_option("--stopwords", ingest.stopwords, "stopword list (default: shipped list)");
    c_ingest->add_option("--out", ingest.out, "clean JSON Lines output")->required();
    c_ingest->add_option("--errors", ingest.errors, "write skipped-record report here");
    c_ingest->callback([&] {
        action = [&] {
            const auto format = parse_input_format(ingest.format);
            if (!format) throw ConfigError("unknown format '" + ingest.format + "'");
            const auto stop = load_stopwords(ingest.stopwords.empty() ? default_data_dir() / "stopwords_en.txt"
                                                                      : fs::path(ingest.stopwords));
            const auto parsed = parse_dataset(ingest.input, *format);
            const auto docs = clean_posts(parsed.posts, stop);
            std::ostringstream ss;
            write_doc_records(ss, docs);
            detail::atomic_write(ingest.out, ss.str());
            nlohmann::json errors = nlohmann::json::array();
            for (const auto& e : parsed.errors) errors.push_back({{"line", e.line}, {"message", e.message}});
            if (!ingest.errors.empty())
                emit_json(ingest.errors, {{"records", parsed.records}, {"duplicates", parsed.duplicates}, {"errors", errors}});
            std::cerr << "ingest: " << docs.size() << " posts, " << parsed.errors.size() << " skipped, "
                      << parsed.duplicates << " duplicates\n";
            return 0;
        };
    });

    // build-content
    struct {
        std::string emb, posts, out;
        double theta = 0.8;
        bool per_event = false;
        std::size_t block_size = 256;
        unsigned threads = 0;
    } content;
    auto* c_content = app.add_subcommand("build-content", "Build the Content graph from embeddings");
    c_content->add_option("--emb", content.emb, "EMB1 embedding file")->required();
    c_content->add_option("--posts", content.posts, "clean JSON Lines from ingest")->required();
    c_content->add_option("--theta", content.theta, "cosine threshold (strict)");
    c_content->add_flag("--per-event", content.per_event, "only link documents of the same event");
    c_content->add_option("--block-size", content.block_size, "row-panel size");
    c_content->add_option("--threads", content.threads, "worker threads (0: all cores)");
    c_content->add_option("--out", content.out, "graph file")->required();
    c_content->callback([&] {
        action = [&] {
            ContentGraphOptions opts;
            opts.similarity.threshold = SimilarityThreshold(content.theta);
            opts.similarity.block_size = content.block_size;
            opts.similarity.threads = content.threads;
            opts.per_event = content.per_event;
            const auto posts = posts_of(read_doc_records(fs::path(content.posts)));
            const Graph g = build_content_graph(load_embeddings(content.emb), posts, opts);
            write_graph(content.out, g);
            std::cerr << "build-content: " << g.n() << " nodes, " << g.m() << " edges\n";
            return 0;
        };
    });

    // components / artic / graph-stats
    std::string graph_in, summary_out;
    auto add_graph_summary = [&](const char* name, const char* help) {
        auto* c = app.add_subcommand(name, help);
        c->add_option("--graph", graph_in, "graph file")->required();
        c->add_option("--out", summary_out, "JSON output (default: stdout)");
        return c;
    };
    add_graph_summary("components", "Connected components summary")->callback([&] {
        action = [&] {
            const Graph g = read_graph(graph_in);
            const auto cc = connected_components(g);
            std::vector<std::size_t> sizes(cc.count, 0);
            for (int c : cc.component) ++sizes[c];
            nlohmann::json members = nlohmann::json::object();
            for (NodeIndex v = 0; v < g.n(); ++v) members[g.node(v).id] = cc.component[v];
            emit_json(summary_out, {{"count", cc.count}, {"sizes", sizes}, {"component", members}});
            return 0;
        };
    });
    add_graph_summary("artic", "Articulation points")->callback([&] {
        action = [&] {
            const Graph g = read_graph(graph_in);
            nlohmann::json ids = nlohmann::json::array();
            for (NodeIndex v : articulation_points(g)) ids.push_back(g.node(v).id);
            emit_json(summary_out, {{"count", ids.size()}, {"articulation_points", ids}});
            return 0;
        };
    });
    add_graph_summary("graph-stats", "Node, edge and degree statistics")->callback([&] {
        action = [&] {
            emit_json(summary_out, to_json(graph_stats(read_graph(graph_in))));
            return 0;
        };
    });

    // cluster
    struct {
        std::string graph, out, partition;
        double resolution = 1.0;
        std::uint64_t seed = 7;
        std::size_t min_size = 11;
    } cl;
    auto* c_cluster = app.add_subcommand("cluster", "Leiden clustering and pruning");
    c_cluster->add_option("--graph", cl.graph, "graph file")->required();
    c_cluster->add_option("--resolution", cl.resolution, "modularity resolution");
    c_cluster->add_option("--seed", cl.seed, "random seed");
    c_cluster->add_option("--min-size", cl.min_size, "smallest cluster kept");
    c_cluster->add_option("--out", cl.out, "pruned graph file")->required();
    c_cluster->add_option("--partition", cl.partition, "partition JSON")->required();
    c_cluster->callback([&] {
        action = [&] {
            const Graph g = read_graph(cl.graph);
            const auto p = leiden(g, {.resolution = cl.resolution, .seed = cl.seed});
            const Graph pruned = prune(g, p, {.min_cluster_size = cl.min_size});
            emit_json(cl.partition, partition_json(g, p));
            write_graph(cl.out, pruned);
            std::cerr << "cluster: " << p.cluster_count() << " clusters, modularity " << p.quality << ", kept "
                      << pruned.n() << " of " << g.n() << " nodes\n";
            return 0;
        };
    });

    // bridges
    struct {
        std::string graph, out, mode = "paper-pipeline";
        double top_fraction = 0.1;
        bool per_cluster = false;
        unsigned threads = 1;
    } br;
    auto* c_bridges = app.add_subcommand("bridges", "Find bridging nodes");
    c_bridges->add_option("--graph", br.graph, "graph file")->required();
    c_bridges->add_option("--mode", br.mode, "paper-pipeline or exact");
    c_bridges->add_option("--top-fraction", br.top_fraction, "betweenness cutoff for candidates");
    c_bridges->add_flag("--per-cluster", br.per_cluster, "test inside each cluster");
    c_bridges->add_option("--threads", br.threads, "worker threads");
    c_bridges->add_option("--out", br.out, "JSON output (default: stdout)");
    c_bridges->callback([&] {
        action = [&] {
            const auto mode = parse_bridge_mode(br.mode);
            if (!mode) throw ConfigError("unknown mode '" + br.mode + "'");
            const Graph g = read_graph(br.graph);
            const auto report = find_bridging_nodes(
                g, {.mode = *mode, .top_fraction = br.top_fraction, .per_cluster = br.per_cluster, .threads = br.threads});
            emit_json(br.out, findings_json(report));
            std::cerr << "bridges: " << report.bridge_count << " of " << g.n() << " nodes: "
                      << join_ids(g, report.bridging_nodes()) << "\n";
            return 0;
        };
    });

    // centrality
    struct {
        std::string graph, out;
        bool exact = false;
        std::size_t samples = 0;
        std::uint64_t seed = 7;
        unsigned threads = 1;
    } ce;
    auto* c_cent = app.add_subcommand("centrality", "Degree, eigenvector, hub and betweenness centrality");
    c_cent->add_option("--graph", ce.graph, "graph file")->required();
    auto* exact_flag = c_cent->add_flag("--exact", ce.exact, "exact betweenness (default)");
    c_cent->add_option("--samples", ce.samples, "sampled betweenness with this many pivots")->excludes(exact_flag);
    c_cent->add_option("--seed", ce.seed, "pivot sampling seed");
    c_cent->add_option("--threads", ce.threads, "worker threads");
    c_cent->add_option("--out", ce.out, "CSV output (default: stdout)");
    c_cent->callback([&] {
        action = [&] {
            const Graph g = read_graph(ce.graph);
            CentralityOptions opts;
            opts.betweenness.threads = ce.threads;
            opts.betweenness.seed = ce.seed;
            if (ce.samples) {
                opts.betweenness.exact = false;
                opts.betweenness.sample_size = ce.samples;
            }
            emit(ce.out, centrality_csv(g, compute_centralities(g, opts)));
            return 0;
        };
    });

    // build-user
    struct {
        std::string content, authors, out;
        bool binary = false;
    } us;
    auto* c_user = app.add_subcommand("build-user", "Project the Content graph onto authors");
    c_user->add_option("--content", us.content, "Content graph file")->required();
    c_user->add_option("--authors", us.authors, "clean JSON Lines with authorship")->required();
    c_user->add_flag("--binary", us.binary, "unit edge weights");
    c_user->add_option("--out", us.out, "User graph file")->required();
    c_user->callback([&] {
        action = [&] {
            const auto docs = read_doc_records(fs::path(us.authors));
            const Graph g = build_user_graph(read_graph(us.content), authorship_from(std::span<const DocRecord>(docs)),
                                             {.binary = us.binary});
            write_graph(us.out, g);
            std::cerr << "build-user: " << g.n() << " users, " << g.m() << " edges\n";
            return 0;
        };
    });

    // cues
    struct {
        std::string input, lexicons, out;
    } cu;
    auto* c_cues = app.add_subcommand("cues", "Linguistic cue vectors per document");
    c_cues->add_option("--input", cu.input, "clean JSON Lines")->required();
    c_cues->add_option("--lexicons", cu.lexicons, "lexicon directory (default: shipped lexicons)");
    c_cues->add_option("--out", cu.out, "CSV output (default: stdout)");
    c_cues->callback([&] {
        action = [&] {
            const auto lex = load_lexicons(cu.lexicons.empty() ? default_data_dir() / "lexicons" : fs::path(cu.lexicons));
            const auto docs = read_doc_records(fs::path(cu.input));
            Graph ids;
            std::vector<CueVector> cues;
            for (const auto& d : docs) {
                ids.add_node({.id = d.post.doc_id});
                cues.push_back(extract_cues(d.post.raw_text, lex));
            }
            emit(cu.out, cues_csv(ids, cues));
            return 0;
        };
    });

    // topics
    struct {
        std::string docs, partition, out;
        std::size_t k = 3, iters = 2000, min_freq = 2, top = 10;
        std::uint64_t seed = 7;
        std::optional<double> alpha;
        double beta = 0.01;
    } tp;
    auto* c_topics = app.add_subcommand("topics", "LDA topics per cluster");
    c_topics->add_option("--docs", tp.docs, "clean JSON Lines")->required();
    c_topics->add_option("--partition", tp.partition, "partition JSON from cluster")->required();
    c_topics->add_option("--k", tp.k, "topics per cluster");
    c_topics->add_option("--iters", tp.iters, "Gibbs sweeps");
    c_topics->add_option("--seed", tp.seed, "base seed (cluster id is added)");
    c_topics->add_option("--alpha", tp.alpha, "document-topic prior (default: 50 / k)");
    c_topics->add_option("--beta", tp.beta, "topic-word prior");
    c_topics->add_option("--min-freq", tp.min_freq, "minimum word frequency");
    c_topics->add_option("--top", tp.top, "words listed per topic");
    c_topics->add_option("--out", tp.out, "JSON output (default: stdout)");
    c_topics->callback([&] {
        action = [&] {
            const auto docs = read_doc_records(fs::path(tp.docs));
            std::unordered_map<std::string, const DocRecord*> by_id;
            for (const auto& d : docs) by_id.emplace(d.post.doc_id, &d);
            std::ifstream in(tp.partition);
            if (!in) throw Error("cannot open partition " + tp.partition);
            const auto j = nlohmann::json::parse(in);
            std::map<int, std::vector<CleanDoc>> clusters;
            for (const auto& m : j.at("membership")) {
                const auto id = m.at("node").get<std::string>();
                auto it = by_id.find(id);
                if (it == by_id.end()) throw Error("partition node '" + id + "' is not in the documents");
                clusters[m.at("cluster").get<int>()].push_back(it->second->clean);
            }
            nlohmann::json out = nlohmann::json::array();
            for (const auto& [c, cdocs] : clusters) {
                nlohmann::json entry{{"cluster", c}, {"documents", cdocs.size()}};
                try {
                    const auto model = lda_fit(std::span<const CleanDoc>(cdocs),
                                               {.topics = tp.k, .alpha = tp.alpha, .beta = tp.beta, .iterations = tp.iters,
                                                .seed = tp.seed + static_cast<std::uint64_t>(c), .min_frequency = tp.min_freq});
                    nlohmann::json topics = nlohmann::json::array();
                    for (std::size_t k = 0; k < model.topics; ++k)
                        topics.push_back({{"topic", k}, {"top_words", top_words(model, k, tp.top)}});
                    entry["topics"] = topics;
                    entry["final_perplexity"] = model.perplexity.back().second;
                } catch (const Error& e) {
                    entry["skipped"] = e.what();
                }
                out.push_back(entry);
            }
            emit_json(tp.out, out);
            return 0;
        };
    });

    // annotate
    struct {
        std::string users, bot_scores, bot_weights, identity, out;
        bool strict = false;
    } an;
    auto* c_ann = app.add_subcommand("annotate", "Bot and identity annotation of authors");
    c_ann->add_option("--users", an.users, "clean JSON Lines with authors")->required();
    c_ann->add_option("--bot-scores", an.bot_scores, "external user_id,p_bot CSV");
    c_ann->add_option("--bot-weights", an.bot_weights, "username heuristic weights (default: shipped)");
    c_ann->add_flag("--strict", an.strict, "fail when a user has no external score");
    c_ann->add_option("--identity-lexicon", an.identity, "term,category CSV (default: shipped)");
    c_ann->add_option("--out", an.out, "JSON output (default: stdout)");
    c_ann->callback([&] {
        action = [&] {
            BotScorer scorer;
            scorer.weights = load_bot_weights(an.bot_weights.empty() ? default_data_dir() / "bot_weights.cfg"
                                                                     : fs::path(an.bot_weights));
            scorer.strict = an.strict;
            if (!an.bot_scores.empty()) scorer.external = load_bot_scores(an.bot_scores);
            const auto lex = load_identity_lexicon(an.identity.empty() ? default_data_dir() / "identity_lexicon.csv"
                                                                       : fs::path(an.identity));
            const auto docs = read_doc_records(fs::path(an.users));
            std::set<std::string> seen;
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& d : docs) {
                const auto key = user_key(d.post.platform, d.post.user_id);
                if (!seen.insert(key).second) continue;
                arr.push_back({{"user", key},
                               {"bot", to_json(scorer.score(key, d.post.username, {d.post.user_id}))},
                               {"identity", to_json(identity_annotate(key, d.post.username, lex))}});
            }
            emit_json(an.out, {{"identity_lexicon", lex.provenance}, {"users", arr}});
            return 0;
        };
    });

    // run
    std::string run_config, run_out;
    bool overwrite = false;
    std::map<std::string, std::string> overrides;
    auto* c_run = app.add_subcommand("run", "Full pipeline into a run directory");
    c_run->add_option("--config", run_config, "key = value configuration file");
    c_run->add_option("--out", run_out, "run directory")->required();
    c_run->add_flag("--overwrite", overwrite, "replace an existing run directory");
    for (const auto& key : RunConfig::keys()) {
        std::string flag = key.name;
        std::replace(flag.begin(), flag.end(), '_', '-');
        c_run->add_option_function<std::string>(
            "--" + flag, [&overrides, name = std::string(key.name)](const std::string& v) { overrides[name] = v; },
            key.help);
    }
    c_run->callback([&] {
        action = [&] {
            RunConfig cfg = run_config.empty() ? RunConfig{} : RunConfig::load(run_config);
            for (const auto& [k, v] : overrides) cfg.set(k, v);
            const auto result = run_pipeline(cfg, run_out, {.overwrite = overwrite});
            if (!result.ok) {
                std::cerr << "run: stage '" << result.failed_stage << "' failed: " << result.error << "\n";
                return kExitStage;
            }
            std::cerr << "run: complete, manifest at " << (fs::path(run_out) / "manifest.json").string() << "\n";
            return 0;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        return action ? action() : 0;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}
