#pragma once
// Report tables: platform link matrices, per-node profiles and
// bridging vs non-bridging comparisons.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "bridgenet/annotate.hpp"
#include "bridgenet/centrality.hpp"
#include "bridgenet/common.hpp"
#include "bridgenet/graph.hpp"
#include "bridgenet/text_analysis.hpp"

namespace bridgenet {

struct PlatformLinkMatrix {
    // counts[a][b] == counts[b][a] == number of edges between platforms a and b.
    std::array<std::array<std::size_t, 3>, 3> counts{};

    std::size_t total() const noexcept {
        std::size_t t = 0;
        for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = a; b < 3; ++b) t += counts[a][b];
        return t;
    }

    std::size_t cross_platform() const noexcept { return counts[0][1] + counts[0][2] + counts[1][2]; }

    double cross_platform_fraction() const noexcept {
        const std::size_t t = total();
        return t ? static_cast<double>(cross_platform()) / static_cast<double>(t) : 0.0;
    }

    bool operator==(const PlatformLinkMatrix&) const = default;
};

inline PlatformLinkMatrix platform_link_matrix(const Graph& g) {
    PlatformLinkMatrix m;
    for (const auto& node : g.nodes())
        if (!node.platform) throw Error("node '" + node.id + "' has no platform");
    for (const auto& e : g.edges()) {
        const auto a = platform_index(*g.node(e.u).platform);
        const auto b = platform_index(*g.node(e.v).platform);
        ++m.counts[a][b];
        if (a != b) ++m.counts[b][a];
    }
    return m;
}

inline nlohmann::json to_json(const PlatformLinkMatrix& m) {
    nlohmann::json pairs = nlohmann::json::array();
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = a; b < 3; ++b)
            pairs.push_back({{"a", to_string(kPlatforms[a])}, {"b", to_string(kPlatforms[b])}, {"edges", m.counts[a][b]}});
    return {{"pairs", pairs}, {"total", m.total()}, {"cross_platform", m.cross_platform()},
            {"cross_platform_fraction", m.cross_platform_fraction()}};
}

inline PlatformLinkMatrix link_matrix_from_json(const nlohmann::json& j) {
    PlatformLinkMatrix m;
    for (const auto& p : j.at("pairs")) {
        const auto a = platform_index(*parse_platform(p.at("a").get<std::string>()));
        const auto b = platform_index(*parse_platform(p.at("b").get<std::string>()));
        m.counts[a][b] = m.counts[b][a] = p.at("edges").get<std::size_t>();
    }
    return m;
}

struct NodeProfile {
    std::string id;
    NodeKind kind = NodeKind::content;
    std::optional<Platform> platform;
    std::optional<int> cluster;
    bool is_bridge = false;
    double degree = 0.0;
    double eigenvector = 0.0;
    double hub = 0.0;
    double betweenness = 0.0;
    CueVector cues;
    std::optional<BotVerdict> bot;
    std::optional<IdentityAnnotation> identity;
};

struct MetricSummary {
    std::size_t count = 0;
    double mean = 0.0;
    double median = 0.0;
};

struct GroupSummary {
    std::size_t size = 0;
    bool empty = true;
    std::map<std::string, MetricSummary> metrics;
    std::optional<double> bot_fraction;      // among members with a verdict
    std::optional<double> identity_fraction;  // members with any identity
    std::map<std::string, std::size_t> identity_categories;
};

struct BridgingComparison {
    GroupSummary bridging;
    GroupSummary non_bridging;
};

inline const std::vector<std::pair<std::string, double (*)(const NodeProfile&)>>& profile_metrics() {
    static const std::vector<std::pair<std::string, double (*)(const NodeProfile&)>> metrics{
        {"degree", [](const NodeProfile& p) { return p.degree; }},
        {"eigenvector", [](const NodeProfile& p) { return p.eigenvector; }},
        {"hub", [](const NodeProfile& p) { return p.hub; }},
        {"betweenness", [](const NodeProfile& p) { return p.betweenness; }},
        {"avg_sentence_length", [](const NodeProfile& p) { return p.cues.avg_sentence_length; }},
        {"all_caps_count", [](const NodeProfile& p) { return double(p.cues.all_caps_count); }},
        {"pronoun_first", [](const NodeProfile& p) { return double(p.cues.pronoun_first); }},
        {"pronoun_second", [](const NodeProfile& p) { return double(p.cues.pronoun_second); }},
        {"pronoun_third", [](const NodeProfile& p) { return double(p.cues.pronoun_third); }},
        {"inclusive_word_count", [](const NodeProfile& p) { return double(p.cues.inclusive_word_count); }},
        {"connective_word_count", [](const NodeProfile& p) { return double(p.cues.connective_word_count); }},
        {"exclusive_word_count", [](const NodeProfile& p) { return double(p.cues.exclusive_word_count); }},
        {"word_count", [](const NodeProfile& p) { return double(p.cues.word_count); }},
    };
    return metrics;
}

namespace detail {

inline MetricSummary summarize(std::vector<double> values) {
    MetricSummary s;
    s.count = values.size();
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    s.median = values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
    return s;
}

inline GroupSummary summarize_group(const std::vector<const NodeProfile*>& members) {
    GroupSummary g;
    g.size = members.size();
    g.empty = members.empty();
    for (const auto& [name, get] : profile_metrics()) {
        std::vector<double> values;
        values.reserve(members.size());
        for (const auto* p : members) values.push_back(get(*p));
        g.metrics[name] = summarize(std::move(values));
    }
    std::size_t with_bot = 0, bots = 0, with_identity_record = 0, with_identity = 0;
    for (const auto* p : members) {
        if (p->bot) {
            ++with_bot;
            if (p->bot->label == BotLabel::bot) ++bots;
        }
        if (p->identity) {
            ++with_identity_record;
            if (p->identity->has_identity) ++with_identity;
            for (auto c : p->identity->categories) ++g.identity_categories[std::string(to_string(c))];
        }
    }
    if (with_bot) g.bot_fraction = static_cast<double>(bots) / static_cast<double>(with_bot);
    if (with_identity_record)
        g.identity_fraction = static_cast<double>(with_identity) / static_cast<double>(with_identity_record);
    return g;
}

}  // namespace detail

// Mean/median/count of every metric and cue per group, plus bot and identity
// shares. An empty group is flagged rather than divided by.
inline BridgingComparison bridging_comparison(std::span<const NodeProfile> profiles) {
    std::vector<const NodeProfile*> bridging, rest;
    for (const auto& p : profiles) (p.is_bridge ? bridging : rest).push_back(&p);
    return {detail::summarize_group(bridging), detail::summarize_group(rest)};
}

inline nlohmann::json to_json(const GroupSummary& g) {
    nlohmann::json metrics = nlohmann::json::object();
    for (const auto& [name, s] : g.metrics) metrics[name] = {{"count", s.count}, {"mean", s.mean}, {"median", s.median}};
    nlohmann::json j{{"size", g.size}, {"empty", g.empty}, {"metrics", metrics}, {"identity_categories", g.identity_categories}};
    j["bot_fraction"] = g.bot_fraction ? nlohmann::json(*g.bot_fraction) : nlohmann::json(nullptr);
    j["identity_fraction"] = g.identity_fraction ? nlohmann::json(*g.identity_fraction) : nlohmann::json(nullptr);
    return j;
}

inline nlohmann::json to_json(const BridgingComparison& c) {
    return {{"bridging", to_json(c.bridging)}, {"non_bridging", to_json(c.non_bridging)}};
}

inline std::string comparison_csv(const BridgingComparison& c) {
    std::string out = "metric,group,count,mean,median\n";
    auto rows = [&](const GroupSummary& g, const char* name) {
        for (const auto& [metric, s] : g.metrics) {
            out += metric + "," + name + "," + std::to_string(s.count) + "," + detail::format_double(s.mean) + "," +
                   detail::format_double(s.median) + "\n";
        }
    };
    rows(c.bridging, "bridging");
    rows(c.non_bridging, "non_bridging");
    return out;
}

namespace detail {

inline std::string csv_escape(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace detail

inline std::string profiles_csv(std::span<const NodeProfile> profiles) {
    std::string out = "node,kind,platform,cluster,is_bridge,degree,eigenvector,hub,betweenness";
    for (std::size_t i = 4; i < profile_metrics().size(); ++i) out += "," + profile_metrics()[i].first;
    out += ",p_bot,bot_label,bot_source,identity_categories\n";
    for (const auto& p : profiles) {
        out += detail::csv_escape(p.id);
        out += ',';
        out += to_string(p.kind);
        out += ',';
        out += p.platform ? std::string(to_string(*p.platform)) : std::string();
        out += ',';
        out += p.cluster ? std::to_string(*p.cluster) : std::string();
        out += p.is_bridge ? ",1" : ",0";
        for (const auto& [_, get] : profile_metrics()) out += "," + detail::format_double(get(p));
        if (p.bot) {
            out += "," + detail::format_double(p.bot->p_bot) + "," + std::string(to_string(p.bot->label)) + "," +
                   std::string(to_string(p.bot->source));
        } else {
            out += ",,,";
        }
        out += ',';
        if (p.identity) {
            std::string cats;
            for (auto c : p.identity->categories) {
                if (!cats.empty()) cats += ';';
                cats += to_string(c);
            }
            out += detail::csv_escape(cats);
        }
        out += '\n';
    }
    return out;
}

struct PlatformBridging {
    std::size_t nodes = 0;
    std::size_t bridges = 0;
    double proportion() const noexcept { return nodes ? static_cast<double>(bridges) / static_cast<double>(nodes) : 0.0; }
};

inline std::array<PlatformBridging, 3> bridging_by_platform(std::span<const NodeProfile> profiles) {
    std::array<PlatformBridging, 3> out{};
    for (const auto& p : profiles) {
        if (!p.platform) continue;
        auto& slot = out[platform_index(*p.platform)];
        ++slot.nodes;
        if (p.is_bridge) ++slot.bridges;
    }
    return out;
}

inline std::string cues_csv(const Graph& g, std::span<const CueVector> cues) {
    std::string out = "node";
    for (std::size_t i = 4; i < profile_metrics().size(); ++i) out += "," + profile_metrics()[i].first;
    out += ",sentence_count\n";
    for (NodeIndex v = 0; v < g.n(); ++v) {
        NodeProfile p;
        p.cues = cues[v];
        out += detail::csv_escape(g.node(v).id);
        for (std::size_t i = 4; i < profile_metrics().size(); ++i) out += "," + detail::format_double(profile_metrics()[i].second(p));
        out += "," + std::to_string(cues[v].sentence_count) + "\n";
    }
    return out;
}

inline std::string centrality_csv(const Graph& g, const CentralityTable& c) {
    std::string out = "node,degree,eigenvector,hub,betweenness\n";
    for (NodeIndex v = 0; v < g.n(); ++v) {
        out += detail::csv_escape(g.node(v).id) + "," + detail::format_double(c.degree[v]) + "," + detail::format_double(c.eigenvector[v]) + "," +
               detail::format_double(c.hub[v]) + "," + detail::format_double(c.betweenness[v]) + "\n";
    }
    return out;
}

}  // namespace bridgenet
