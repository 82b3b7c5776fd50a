#pragma once
// Post records: parsing from JSON Lines / CSV, text cleaning, clean-doc files.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "bridgenet/common.hpp"
#include "bridgenet/detail/io.hpp"

namespace bridgenet {

struct Post {
    std::string doc_id;
    Platform platform = Platform::X;
    std::string post_id;
    std::string user_id;
    std::string username;
    std::string raw_text;
    Event event = Event::other;
    std::optional<std::int64_t> timestamp;

    bool operator==(const Post&) const = default;
};

struct CleanDoc {
    std::string doc_id;
    std::vector<std::string> tokens;
    std::string clean_text;
    // Nothing survived cleaning. Kept in the dataset, never dropped.
    bool degenerate = false;

    bool operator==(const CleanDoc&) const = default;
};

struct RecordError {
    std::size_t line = 0;
    std::string message;
};

struct ParseResult {
    std::vector<Post> posts;
    std::vector<RecordError> errors;
    std::size_t records = 0;
    std::size_t duplicates = 0;
};

enum class InputFormat { json_lines, csv };

inline std::optional<InputFormat> parse_input_format(std::string_view s) {
    if (s == "json-lines" || s == "jsonl") return InputFormat::json_lines;
    if (s == "csv") return InputFormat::csv;
    return std::nullopt;
}

inline std::string make_doc_id(Platform platform, std::string_view post_id) {
    std::string id(to_string(platform));
    id += ':';
    id += post_id;
    return id;
}

inline constexpr std::string_view kCsvHeader = "platform,post_id,user_id,username,text,event,timestamp";

namespace detail {

inline std::string id_field(const nlohmann::json& rec, const char* key, bool required) {
    auto it = rec.find(key);
    if (it == rec.end() || it->is_null()) {
        if (required) throw Error(std::string("missing field '") + key + "'");
        return {};
    }
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return std::to_string(it->get<std::int64_t>());
    throw Error(std::string("field '") + key + "' must be a string");
}

inline Post post_from_fields(std::string_view platform, std::string post_id, std::string user_id,
                             std::string username, std::string text, std::string_view event,
                             std::optional<std::int64_t> timestamp) {
    auto p = parse_platform(platform);
    if (!p) throw Error("unknown platform '" + std::string(platform) + "'");
    if (post_id.empty()) throw Error("empty post_id");
    if (user_id.empty()) throw Error("empty user_id");
    Post post;
    post.platform = *p;
    post.doc_id = make_doc_id(*p, post_id);
    post.post_id = std::move(post_id);
    post.user_id = std::move(user_id);
    post.username = username.empty() ? post.user_id : std::move(username);
    post.raw_text = std::move(text);
    post.event = parse_event(event);
    post.timestamp = timestamp;
    return post;
}

inline Post post_from_json(const nlohmann::json& rec) {
    if (!rec.is_object()) throw Error("record is not a JSON object");
    auto platform = rec.find("platform");
    if (platform == rec.end() || !platform->is_string()) throw Error("missing field 'platform'");
    auto text = rec.find("text");
    if (text == rec.end() || !text->is_string()) throw Error("missing field 'text'");
    std::optional<std::int64_t> ts;
    if (auto it = rec.find("timestamp"); it != rec.end() && !it->is_null()) {
        if (!it->is_number_integer()) throw Error("field 'timestamp' must be an integer");
        ts = it->get<std::int64_t>();
    }
    std::string event;
    if (auto it = rec.find("event"); it != rec.end() && it->is_string()) event = it->get<std::string>();
    return post_from_fields(platform->get<std::string>(), id_field(rec, "post_id", true),
                            id_field(rec, "user_id", true), id_field(rec, "username", false),
                            text->get<std::string>(), event, ts);
}

struct CsvRecord {
    std::size_t line = 0;
    std::vector<std::string> fields;
    bool malformed = false;
};

// RFC 4180 quoting; quoted fields may span lines.
inline std::vector<CsvRecord> split_csv(std::string_view text) {
    std::vector<CsvRecord> out;
    std::size_t line = 1;
    std::size_t i = 0;
    while (i < text.size()) {
        CsvRecord rec;
        rec.line = line;
        std::string field;
        bool in_quotes = false;
        bool done = false;
        while (!done) {
            if (i >= text.size()) {
                if (in_quotes) rec.malformed = true;
                rec.fields.push_back(std::move(field));
                break;
            }
            const char c = text[i];
            if (in_quotes) {
                if (c == '"') {
                    if (i + 1 < text.size() && text[i + 1] == '"') {
                        field += '"';
                        i += 2;
                    } else {
                        in_quotes = false;
                        ++i;
                    }
                } else {
                    if (c == '\n') ++line;
                    field += c;
                    ++i;
                }
                continue;
            }
            switch (c) {
                case '"':
                    if (field.empty()) in_quotes = true;
                    else rec.malformed = true;
                    ++i;
                    break;
                case ',':
                    rec.fields.push_back(std::move(field));
                    field.clear();
                    ++i;
                    break;
                case '\r':
                    ++i;
                    break;
                case '\n':
                    rec.fields.push_back(std::move(field));
                    ++line;
                    ++i;
                    done = true;
                    break;
                default:
                    field += c;
                    ++i;
            }
        }
        const bool blank = rec.fields.size() == 1 && rec.fields[0].empty() && !rec.malformed;
        if (!blank) out.push_back(std::move(rec));
    }
    return out;
}

inline void add_post(ParseResult& result, std::unordered_set<std::string>& seen, Post post) {
    if (!seen.insert(post.doc_id).second) {
        ++result.duplicates;
        return;
    }
    result.posts.push_back(std::move(post));
}

inline void check_malformed_ratio(const ParseResult& r) {
    if (r.records > 0 && r.errors.size() * 2 > r.records)
        throw Error("more than half of the records are malformed (" + std::to_string(r.errors.size()) +
                    " of " + std::to_string(r.records) + ")");
}

}  // namespace detail

inline ParseResult parse_json_lines(std::istream& in) {
    ParseResult result;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        ++result.records;
        try {
            detail::add_post(result, seen, detail::post_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            result.errors.push_back({lineno, e.what()});
        } catch (const Error& e) {
            result.errors.push_back({lineno, e.what()});
        }
    }
    detail::check_malformed_ratio(result);
    return result;
}

inline ParseResult parse_csv(std::string_view text) {
    ParseResult result;
    auto rows = detail::split_csv(text);
    if (rows.empty()) return result;
    std::string header;
    for (std::size_t i = 0; i < rows[0].fields.size(); ++i) {
        if (i) header += ',';
        header += rows[0].fields[i];
    }
    if (header != kCsvHeader) throw Error("CSV header must be '" + std::string(kCsvHeader) + "'");
    std::unordered_set<std::string> seen;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        ++result.records;
        try {
            if (row.malformed) throw Error("unbalanced quotes");
            if (row.fields.size() != 7) throw Error("expected 7 fields, got " + std::to_string(row.fields.size()));
            std::optional<std::int64_t> ts;
            if (!row.fields[6].empty()) {
                std::size_t used = 0;
                ts = std::stoll(row.fields[6], &used);
                if (used != row.fields[6].size()) throw Error("bad timestamp");
            }
            detail::add_post(result, seen,
                             detail::post_from_fields(row.fields[0], row.fields[1], row.fields[2], row.fields[3],
                                                      row.fields[4], row.fields[5], ts));
        } catch (const std::logic_error&) {
            result.errors.push_back({row.line, "bad timestamp"});
        } catch (const Error& e) {
            result.errors.push_back({row.line, e.what()});
        }
    }
    detail::check_malformed_ratio(result);
    return result;
}

inline ParseResult parse_dataset(const std::filesystem::path& path, InputFormat format) {
    if (!std::filesystem::exists(path)) throw Error("input file not found: " + path.string());
    if (format == InputFormat::csv) return parse_csv(detail::read_file(path));
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return parse_json_lines(in);
}

inline nlohmann::json to_json(const Post& p) {
    nlohmann::json j{{"platform", to_string(p.platform)},
                     {"post_id", p.post_id},
                     {"user_id", p.user_id},
                     {"username", p.username},
                     {"text", p.raw_text},
                     {"event", to_string(p.event)}};
    if (p.timestamp) j["timestamp"] = *p.timestamp;
    return j;
}

inline void write_json_lines(std::ostream& out, std::span<const Post> posts) {
    for (const auto& p : posts) out << to_json(p).dump() << '\n';
}

// ---------------------------------------------------------------------------
// Cleaning

using StopwordSet = std::unordered_set<std::string>;

inline StopwordSet load_stopwords(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open stopword list " + path.string());
    StopwordSet words;
    std::string line;
    while (std::getline(in, line)) {
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') continue;
        const auto e = line.find_last_not_of(" \t\r");
        words.insert(to_lower(line.substr(b, e - b + 1)));
    }
    if (words.empty()) throw ConfigError("stopword list is empty: " + path.string());
    return words;
}

namespace detail {

// Length in bytes of a Unicode whitespace sequence starting at s[i], 0 if none.
inline std::size_t whitespace_len(std::string_view s, std::size_t i) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (c == ' ' || (c >= '\t' && c <= '\r')) return 1;
    auto at = [&](std::size_t k) { return i + k < s.size() ? static_cast<unsigned char>(s[i + k]) : 0u; };
    if (c == 0xC2 && (at(1) == 0x85 || at(1) == 0xA0)) return 2;
    if (c == 0xE1 && at(1) == 0x9A && at(2) == 0x80) return 3;
    if (c == 0xE2 && at(1) == 0x80 && ((at(2) >= 0x80 && at(2) <= 0x8A) || at(2) == 0xA8 || at(2) == 0xA9 || at(2) == 0xAF))
        return 3;
    if (c == 0xE2 && at(1) == 0x81 && at(2) == 0x9F) return 3;
    if (c == 0xE3 && at(1) == 0x80 && at(2) == 0x80) return 3;
    return 0;
}

inline bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

inline std::string_view strip_punct(std::string_view t, std::string_view keep_leading = {}) {
    while (!t.empty() && is_punct(t.front()) && keep_leading.find(t.front()) == std::string_view::npos)
        t.remove_prefix(1);
    while (!t.empty() && is_punct(t.back())) t.remove_suffix(1);
    return t;
}

inline bool is_url(std::string_view t) {
    const std::string lower = to_lower(t.substr(0, 8));
    return lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.");
}

}  // namespace detail

inline std::vector<std::string_view> split_whitespace(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    std::size_t start = std::string_view::npos;
    while (i < s.size()) {
        const std::size_t ws = detail::whitespace_len(s, i);
        if (ws) {
            if (start != std::string_view::npos) out.push_back(s.substr(start, i - start));
            start = std::string_view::npos;
            i += ws;
        } else {
            if (start == std::string_view::npos) start = i;
            ++i;
        }
    }
    if (start != std::string_view::npos) out.push_back(s.substr(start));
    return out;
}

// Lowercases, drops stopwords, @-mentions, URLs and the retweet marker, and
// strips '#' from hashtags. Retweeted text itself is kept.
inline CleanDoc preprocess(std::string_view doc_id, std::string_view text, const StopwordSet& stopwords) {
    if (stopwords.empty()) throw std::invalid_argument("stopword set must be nonempty");
    CleanDoc doc;
    doc.doc_id = doc_id;
    for (std::string_view raw : split_whitespace(text)) {
        std::string_view t = detail::strip_punct(raw, "#@");
        if (t.empty() || t.front() == '@') continue;
        while (!t.empty() && t.front() == '#') t.remove_prefix(1);
        t = detail::strip_punct(t);
        if (t.empty() || detail::is_url(t)) continue;
        std::string token = to_lower(t);
        if (token == "rt" || stopwords.contains(token)) continue;
        doc.tokens.push_back(std::move(token));
    }
    for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
        if (i) doc.clean_text += ' ';
        doc.clean_text += doc.tokens[i];
    }
    doc.degenerate = doc.tokens.empty();
    return doc;
}

inline CleanDoc preprocess(const Post& post, const StopwordSet& stopwords) {
    return preprocess(post.doc_id, post.raw_text, stopwords);
}

// ---------------------------------------------------------------------------
// Clean-doc file: one JSON object per line carrying the post and its cleaned form.

struct DocRecord {
    Post post;
    CleanDoc clean;

    bool operator==(const DocRecord&) const = default;
};

inline nlohmann::json to_json(const DocRecord& r) {
    nlohmann::json j = to_json(r.post);
    j["doc_id"] = r.post.doc_id;
    j["tokens"] = r.clean.tokens;
    j["clean_text"] = r.clean.clean_text;
    j["degenerate"] = r.clean.degenerate;
    return j;
}

inline void write_doc_records(std::ostream& out, std::span<const DocRecord> docs) {
    for (const auto& d : docs) out << to_json(d).dump() << '\n';
}

inline std::vector<DocRecord> read_doc_records(std::istream& in) {
    std::vector<DocRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            DocRecord rec;
            rec.post = detail::post_from_json(j);
            rec.clean.doc_id = rec.post.doc_id;
            rec.clean.tokens = j.at("tokens").get<std::vector<std::string>>();
            rec.clean.clean_text = j.value("clean_text", std::string{});
            rec.clean.degenerate = rec.clean.tokens.empty();
            out.push_back(std::move(rec));
        } catch (const std::exception& e) {
            throw Error("clean-doc line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

inline std::vector<DocRecord> read_doc_records(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return read_doc_records(in);
}

inline std::vector<DocRecord> clean_posts(std::span<const Post> posts, const StopwordSet& stopwords) {
    std::vector<DocRecord> out;
    out.reserve(posts.size());
    for (const auto& p : posts) out.push_back({p, preprocess(p, stopwords)});
    return out;
}

}  // namespace bridgenet
