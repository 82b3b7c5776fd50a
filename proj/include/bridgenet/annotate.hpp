#pragma once
// Username-based annotation: bot probability and identity affiliation.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "bridgenet/common.hpp"
#include "bridgenet/detail/io.hpp"

namespace bridgenet {

inline constexpr double kBotThreshold = 0.5;

enum class BotLabel : std::uint8_t { human, bot };
enum class BotSource : std::uint8_t { external_file, builtin_heuristic };

inline constexpr std::string_view to_string(BotLabel l) noexcept { return l == BotLabel::bot ? "bot" : "human"; }
inline constexpr std::string_view to_string(BotSource s) noexcept {
    return s == BotSource::external_file ? "external-file" : "builtin-heuristic";
}

struct BotVerdict {
    std::string user_id;
    double p_bot = 0.0;
    BotLabel label = BotLabel::human;
    BotSource source = BotSource::builtin_heuristic;
};

// P(bot) >= 0.5 is a bot; the boundary is inclusive.
inline BotLabel bot_label(double p_bot) noexcept { return p_bot >= kBotThreshold ? BotLabel::bot : BotLabel::human; }

inline BotVerdict make_verdict(std::string user_id, double p_bot, BotSource source) {
    if (!(p_bot >= 0.0 && p_bot <= 1.0)) throw Error("p_bot for '" + user_id + "' is outside [0, 1]");
    return {std::move(user_id), p_bot, bot_label(p_bot), source};
}

// Logistic model over username features. Appending digits never lowers the
// score as long as digit_count >= |entropy| and the other digit-driven
// weights are nonnegative; load_bot_weights enforces this.
struct BotWeights {
    double bias = -3.0;
    double digit_count = 0.35;
    double digit_run = 0.25;
    double entropy = 0.3;   // Shannon entropy of the character distribution, bits
    double length = 0.02;
    double dictionary_word = -1.0;
    std::unordered_set<std::string> dictionary;  // lowercase words, length >= 3 used

    void validate() const {
        if (digit_count < std::abs(entropy) || digit_run < 0.0 || length < 0.0)
            throw ConfigError("bot weights must satisfy digit_count >= |entropy|, digit_run >= 0, length >= 0");
    }
};

struct UsernameFeatures {
    std::size_t digits = 0;
    std::size_t longest_digit_run = 0;
    double entropy = 0.0;
    std::size_t length = 0;
    bool has_dictionary_word = false;
};

inline UsernameFeatures username_features(std::string_view name, const std::unordered_set<std::string>& dictionary) {
    UsernameFeatures f;
    f.length = name.size();
    std::array<std::size_t, 256> counts{};
    std::size_t run = 0;
    for (char ch : name) {
        const auto c = static_cast<unsigned char>(ch);
        ++counts[c];
        if (std::isdigit(c)) {
            ++f.digits;
            f.longest_digit_run = std::max(f.longest_digit_run, ++run);
        } else {
            run = 0;
        }
    }
    for (std::size_t c : counts) {
        if (!c) continue;
        const double p = static_cast<double>(c) / static_cast<double>(name.size());
        f.entropy -= p * std::log2(p);
    }
    const std::string lower = to_lower(name);
    for (const auto& w : dictionary) {
        if (w.size() >= 3 && lower.find(w) != std::string::npos) {
            f.has_dictionary_word = true;
            break;
        }
    }
    return f;
}

inline double heuristic_bot_probability(std::string_view username, const BotWeights& w) {
    const auto f = username_features(username, w.dictionary);
    const double z = w.bias + w.digit_count * static_cast<double>(f.digits) +
                     w.digit_run * static_cast<double>(f.longest_digit_run) + w.entropy * f.entropy +
                     w.length * static_cast<double>(f.length) + (f.has_dictionary_word ? w.dictionary_word : 0.0);
    return 1.0 / (1.0 + std::exp(-z));
}

// `key = value` lines; `dictionary = <file>` names a word list relative to the weights file.
inline BotWeights load_bot_weights(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open bot weights " + path.string());
    BotWeights w;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos) throw ConfigError("bad bot weights line: " + line);
            continue;
        }
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t\r"));
            s.erase(s.find_last_not_of(" \t\r") + 1);
            return s;
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "dictionary") {
            std::ifstream dict(path.parent_path() / value);
            if (!dict) throw ConfigError("cannot open bot dictionary " + (path.parent_path() / value).string());
            std::string word;
            while (dict >> word) w.dictionary.insert(to_lower(word));
            continue;
        }
        double v = 0.0;
        try {
            v = std::stod(value);
        } catch (const std::exception&) {
            throw ConfigError("bad number for bot weight '" + key + "'");
        }
        if (key == "bias") w.bias = v;
        else if (key == "digit_count") w.digit_count = v;
        else if (key == "digit_run") w.digit_run = v;
        else if (key == "entropy") w.entropy = v;
        else if (key == "length") w.length = v;
        else if (key == "dictionary_word") w.dictionary_word = v;
        else throw ConfigError("unknown bot weight '" + key + "'");
    }
    w.validate();
    return w;
}

// CSV `user_id,p_bot` with that header.
inline std::unordered_map<std::string, double> load_bot_scores(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open bot scores " + path.string());
    std::unordered_map<std::string, double> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (lineno == 1) {
            if (line != "user_id,p_bot") throw Error("bot scores header must be 'user_id,p_bot'");
            continue;
        }
        if (line.empty()) continue;
        const auto comma = line.rfind(',');
        if (comma == std::string::npos || comma == 0)
            throw Error(path.string() + ":" + std::to_string(lineno) + ": expected user_id,p_bot");
        double p = 0.0;
        try {
            std::size_t used = 0;
            const std::string num = line.substr(comma + 1);
            p = std::stod(num, &used);
            if (used != num.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw Error(path.string() + ":" + std::to_string(lineno) + ": bad p_bot");
        }
        if (!(p >= 0.0 && p <= 1.0)) throw Error(path.string() + ":" + std::to_string(lineno) + ": p_bot outside [0, 1]");
        out[line.substr(0, comma)] = p;
    }
    return out;
}

struct BotScorer {
    BotWeights weights;
    std::optional<std::unordered_map<std::string, double>> external;
    // Missing users in the external file are an error instead of falling back.
    bool strict = false;

    // user_id, then each of extra_keys, is looked up in the external scores.
    BotVerdict score(std::string_view user_id, std::string_view username,
                     std::initializer_list<std::string_view> extra_keys = {}) const {
        if (external) {
            if (auto it = external->find(std::string(user_id)); it != external->end())
                return make_verdict(std::string(user_id), it->second, BotSource::external_file);
            for (auto k : extra_keys)
                if (auto it = external->find(std::string(k)); it != external->end())
                    return make_verdict(std::string(user_id), it->second, BotSource::external_file);
            if (strict) throw Error("no bot score for user '" + std::string(user_id) + "'");
        }
        return make_verdict(std::string(user_id), heuristic_bot_probability(username, weights),
                            BotSource::builtin_heuristic);
    }
};

inline BotVerdict bot_score(std::string_view user_id, std::string_view username, const BotScorer& scorer) {
    return scorer.score(user_id, username);
}

// ---------------------------------------------------------------------------
// Identity

enum class IdentityCategory : std::uint8_t { political, family, gender, race_nationality, religion, job, other };

inline constexpr std::array<std::pair<IdentityCategory, std::string_view>, 7> kIdentityCategories{{
    {IdentityCategory::political, "political"},
    {IdentityCategory::family, "family"},
    {IdentityCategory::gender, "gender"},
    {IdentityCategory::race_nationality, "race/nationality"},
    {IdentityCategory::religion, "religion"},
    {IdentityCategory::job, "job"},
    {IdentityCategory::other, "other"},
}};

inline constexpr std::string_view to_string(IdentityCategory c) noexcept {
    return kIdentityCategories[static_cast<std::size_t>(c)].second;
}

inline std::optional<IdentityCategory> parse_identity_category(std::string_view s) {
    for (const auto& [c, name] : kIdentityCategories)
        if (name == s) return c;
    return std::nullopt;
}

struct IdentityLexicon {
    std::unordered_map<std::string, IdentityCategory> terms;  // lowercase
    std::size_t longest_term = 0;
    std::string provenance;

    void add(std::string term, IdentityCategory c) {
        term = to_lower(term);
        if (term.empty()) throw ConfigError("empty identity term");
        auto [it, inserted] = terms.emplace(term, c);
        if (!inserted && it->second != c) throw ConfigError("identity term '" + term + "' maps to two categories");
        longest_term = std::max(longest_term, term.size());
    }
};

// CSV `term,category`; a leading `term,category` header line is skipped.
inline IdentityLexicon load_identity_lexicon(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open identity lexicon " + path.string());
    IdentityLexicon lex;
    lex.provenance = path.filename().string() + " sha256:" + detail::sha256_file(path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#' || (lineno == 1 && line == "term,category")) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected term,category");
        const auto cat = parse_identity_category(line.substr(comma + 1));
        if (!cat)
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": unknown category '" + line.substr(comma + 1) + "'");
        lex.add(line.substr(0, comma), *cat);
    }
    return lex;
}

struct IdentityAnnotation {
    std::string user_id;
    std::vector<std::string> matched_terms;
    std::set<IdentityCategory> categories;
    bool has_identity = false;
};

namespace detail {

inline bool is_name_delimiter(char c) {
    return c == '_' || c == '-' || c == '.' || std::isdigit(static_cast<unsigned char>(c)) ||
           std::isspace(static_cast<unsigned char>(c));
}

}  // namespace detail

// Words of a username: split on _ - . digits whitespace, and at lower->upper
// camel-case boundaries. Case is preserved.
inline std::vector<std::string> split_username(std::string_view name) {
    std::vector<std::string> out;
    std::string cur;
    for (std::size_t i = 0; i < name.size(); ++i) {
        const char c = name[i];
        if (detail::is_name_delimiter(c)) {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
            continue;
        }
        if (!cur.empty() && std::isupper(static_cast<unsigned char>(c)) &&
            std::islower(static_cast<unsigned char>(cur.back()))) {
            out.push_back(std::move(cur));
            cur.clear();
        }
        cur += c;
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

// Case-insensitive longest-match scan over each delimiter-separated segment of
// the lowercased username. Scanning every position covers camel-case compounds
// without making the result depend on letter case.
inline IdentityAnnotation identity_annotate(std::string_view user_id, std::string_view username, const IdentityLexicon& lex) {
    IdentityAnnotation out;
    out.user_id = user_id;
    const std::string lower = to_lower(username);
    std::size_t i = 0;
    while (i < lower.size()) {
        if (detail::is_name_delimiter(lower[i])) {
            ++i;
            continue;
        }
        std::size_t seg_end = i;
        while (seg_end < lower.size() && !detail::is_name_delimiter(lower[seg_end])) ++seg_end;
        while (i < seg_end) {
            std::size_t matched = 0;
            for (std::size_t len = std::min(lex.longest_term, seg_end - i); len > 0; --len) {
                auto it = lex.terms.find(lower.substr(i, len));
                if (it != lex.terms.end()) {
                    matched = len;
                    out.matched_terms.push_back(it->first);
                    out.categories.insert(it->second);
                    break;
                }
            }
            i += matched ? matched : 1;
        }
    }
    out.has_identity = !out.categories.empty();
    return out;
}

inline nlohmann::json to_json(const BotVerdict& v) {
    return {{"user_id", v.user_id}, {"p_bot", v.p_bot}, {"label", to_string(v.label)}, {"source", to_string(v.source)}};
}

inline nlohmann::json to_json(const IdentityAnnotation& a) {
    nlohmann::json cats = nlohmann::json::array();
    for (auto c : a.categories) cats.push_back(to_string(c));
    return {{"user_id", a.user_id}, {"matched_terms", a.matched_terms}, {"categories", cats}, {"has_identity", a.has_identity}};
}

}  // namespace bridgenet
