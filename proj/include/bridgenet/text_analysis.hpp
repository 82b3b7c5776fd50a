#pragma once
// Lexicon-driven linguistic cues and collapsed-Gibbs LDA topic models.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "bridgenet/common.hpp"
#include "bridgenet/ingest.hpp"

namespace bridgenet {

// ---------------------------------------------------------------------------
// Cues

enum class LexiconRole { pronoun_first, pronoun_second, pronoun_third, inclusive, connective, exclusive };

inline constexpr std::array<std::pair<LexiconRole, std::string_view>, 6> kLexiconRoles{{
    {LexiconRole::pronoun_first, "pronoun_first"},
    {LexiconRole::pronoun_second, "pronoun_second"},
    {LexiconRole::pronoun_third, "pronoun_third"},
    {LexiconRole::inclusive, "inclusive"},
    {LexiconRole::connective, "connective"},
    {LexiconRole::exclusive, "exclusive"},
}};

struct Lexicons {
    std::map<LexiconRole, std::unordered_set<std::string>> words;
    std::string provenance;

    const std::unordered_set<std::string>& of(LexiconRole r) const {
        static const std::unordered_set<std::string> empty;
        auto it = words.find(r);
        return it == words.end() ? empty : it->second;
    }
};

inline std::unordered_set<std::string> load_word_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open word list " + path.string());
    std::unordered_set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') continue;
        const auto e = line.find_last_not_of(" \t\r");
        out.insert(to_lower(line.substr(b, e - b + 1)));
    }
    return out;
}

// `dir/manifest.txt` lists `role<TAB>file` (or `role=file`) for every role.
inline Lexicons load_lexicons(const std::filesystem::path& dir) {
    std::ifstream in(dir / "manifest.txt");
    if (!in) throw ConfigError("lexicon manifest not found in " + dir.string());
    std::map<std::string, std::string> entries;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto sep = line.find_first_of("\t=");
        if (sep == std::string::npos) throw ConfigError("bad lexicon manifest line: " + line);
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t"));
            s.erase(s.find_last_not_of(" \t") + 1);
            return s;
        };
        entries[trim(line.substr(0, sep))] = trim(line.substr(sep + 1));
    }
    Lexicons lex;
    lex.provenance = (dir / "manifest.txt").string();
    for (const auto& [role, name] : kLexiconRoles) {
        auto it = entries.find(std::string(name));
        if (it == entries.end()) throw ConfigError("lexicon manifest has no '" + std::string(name) + "' entry");
        lex.words[role] = load_word_list(dir / it->second);
    }
    return lex;
}

struct CueVector {
    double avg_sentence_length = 0.0;
    std::size_t all_caps_count = 0;
    std::size_t pronoun_first = 0;
    std::size_t pronoun_second = 0;
    std::size_t pronoun_third = 0;
    std::size_t inclusive_word_count = 0;
    std::size_t connective_word_count = 0;
    std::size_t exclusive_word_count = 0;
    std::size_t word_count = 0;
    std::size_t sentence_count = 0;

    bool operator==(const CueVector&) const = default;
};

namespace detail {

inline bool is_all_caps(std::string_view w) {
    if (w.size() < 2) return false;
    return std::all_of(w.begin(), w.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

inline bool is_sentence_end(char c) { return c == '.' || c == '!' || c == '?'; }

}  // namespace detail

// Words are whitespace tokens with edge punctuation stripped. Sentences are
// the spans between runs of . ! ? that contain at least one word.
inline CueVector extract_cues(std::string_view text, const Lexicons& lex) {
    CueVector cv;
    std::size_t start = 0;
    auto consume_sentence = [&](std::string_view sentence) {
        std::size_t words = 0;
        for (auto raw : split_whitespace(sentence)) {
            const std::string_view w = detail::strip_punct(raw);
            if (w.empty()) continue;
            ++words;
            if (detail::is_all_caps(w)) ++cv.all_caps_count;
            const std::string lower = to_lower(w);
            if (lex.of(LexiconRole::pronoun_first).contains(lower)) ++cv.pronoun_first;
            if (lex.of(LexiconRole::pronoun_second).contains(lower)) ++cv.pronoun_second;
            if (lex.of(LexiconRole::pronoun_third).contains(lower)) ++cv.pronoun_third;
            if (lex.of(LexiconRole::inclusive).contains(lower)) ++cv.inclusive_word_count;
            if (lex.of(LexiconRole::connective).contains(lower)) ++cv.connective_word_count;
            if (lex.of(LexiconRole::exclusive).contains(lower)) ++cv.exclusive_word_count;
        }
        cv.word_count += words;
        if (words > 0) ++cv.sentence_count;
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (!detail::is_sentence_end(text[i])) continue;
        consume_sentence(text.substr(start, i - start));
        start = i + 1;
    }
    consume_sentence(text.substr(std::min(start, text.size())));
    if (cv.sentence_count > 0)
        cv.avg_sentence_length = static_cast<double>(cv.word_count) / static_cast<double>(cv.sentence_count);
    return cv;
}

inline nlohmann::json to_json(const CueVector& c) {
    return {{"avg_sentence_length", c.avg_sentence_length},
            {"all_caps_count", c.all_caps_count},
            {"pronoun_first", c.pronoun_first},
            {"pronoun_second", c.pronoun_second},
            {"pronoun_third", c.pronoun_third},
            {"inclusive_word_count", c.inclusive_word_count},
            {"connective_word_count", c.connective_word_count},
            {"exclusive_word_count", c.exclusive_word_count},
            {"word_count", c.word_count},
            {"sentence_count", c.sentence_count}};
}

// ---------------------------------------------------------------------------
// LDA

struct LdaOptions {
    std::size_t topics = 3;
    std::optional<double> alpha;  // default 50 / topics
    double beta = 0.01;
    std::size_t iterations = 2000;
    std::uint64_t seed = 0;
    std::size_t min_frequency = 2;
    std::size_t perplexity_every = 10;

    double effective_alpha() const { return alpha.value_or(50.0 / static_cast<double>(topics)); }
};

struct TopicModel {
    std::size_t topics = 0;
    std::vector<std::string> vocab;                  // sorted
    std::vector<std::vector<double>> topic_word;     // topics x vocab
    std::vector<std::vector<double>> doc_topic;      // docs x topics
    std::vector<std::pair<std::size_t, double>> perplexity;  // (sweep, value)
};

// Collapsed Gibbs sampler over bag-of-words counts. Exposed as a class so the
// model can be inspected between sweeps.
class LdaSampler {
public:
    LdaSampler(std::span<const std::vector<std::string>> docs, const LdaOptions& opts)
        : opts_(opts), alpha_(opts.effective_alpha()), rng_(opts.seed) {
        if (opts.topics < 1) throw Error("lda: topic count must be at least 1");
        std::map<std::string, std::size_t> freq;
        for (const auto& d : docs)
            for (const auto& w : d) ++freq[w];
        for (const auto& [w, f] : freq)
            if (f >= opts.min_frequency) vocab_.push_back(w);
        if (vocab_.empty()) throw Error("lda: vocabulary is empty");
        std::unordered_map<std::string, std::size_t> index;
        for (std::size_t i = 0; i < vocab_.size(); ++i) index.emplace(vocab_[i], i);

        const std::size_t k = opts.topics;
        words_.resize(docs.size());
        assign_.resize(docs.size());
        doc_topic_.assign(docs.size(), std::vector<std::uint32_t>(k, 0));
        topic_word_.assign(k, std::vector<std::uint32_t>(vocab_.size(), 0));
        topic_total_.assign(k, 0);
        std::uniform_int_distribution<std::size_t> pick(0, k - 1);
        for (std::size_t d = 0; d < docs.size(); ++d) {
            for (const auto& w : docs[d]) {
                auto it = index.find(w);
                if (it == index.end()) continue;
                const std::size_t z = pick(rng_);
                words_[d].push_back(it->second);
                assign_[d].push_back(z);
                ++doc_topic_[d][z];
                ++topic_word_[z][it->second];
                ++topic_total_[z];
            }
        }
        probs_.resize(k);
        record_perplexity();
    }

    void sweep() {
        const std::size_t k = opts_.topics;
        const double vbeta = static_cast<double>(vocab_.size()) * opts_.beta;
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (std::size_t d = 0; d < words_.size(); ++d) {
            for (std::size_t i = 0; i < words_[d].size(); ++i) {
                const std::size_t w = words_[d][i];
                std::size_t z = assign_[d][i];
                --doc_topic_[d][z];
                --topic_word_[z][w];
                --topic_total_[z];
                double total = 0.0;
                for (std::size_t t = 0; t < k; ++t) {
                    total += (doc_topic_[d][t] + alpha_) * (topic_word_[t][w] + opts_.beta) / (topic_total_[t] + vbeta);
                    probs_[t] = total;
                }
                const double r = unit(rng_) * total;
                z = static_cast<std::size_t>(std::upper_bound(probs_.begin(), probs_.end(), r) - probs_.begin());
                if (z >= k) z = k - 1;
                assign_[d][i] = z;
                ++doc_topic_[d][z];
                ++topic_word_[z][w];
                ++topic_total_[z];
            }
        }
        ++sweeps_;
        if (opts_.perplexity_every && sweeps_ % opts_.perplexity_every == 0) record_perplexity();
    }

    std::size_t sweeps() const noexcept { return sweeps_; }

    TopicModel model() const {
        TopicModel m;
        m.topics = opts_.topics;
        m.vocab = vocab_;
        m.topic_word = phi();
        m.doc_topic = theta();
        m.perplexity = perplexity_;
        return m;
    }

    // Perplexity of the training tokens under the current point estimates.
    double perplexity() const {
        const auto p = phi();
        const auto t = theta();
        double log_lik = 0.0;
        std::size_t tokens = 0;
        for (std::size_t d = 0; d < words_.size(); ++d) {
            for (std::size_t w : words_[d]) {
                double pw = 0.0;
                for (std::size_t z = 0; z < opts_.topics; ++z) pw += t[d][z] * p[z][w];
                log_lik += std::log(pw);
                ++tokens;
            }
        }
        return tokens ? std::exp(-log_lik / static_cast<double>(tokens)) : 0.0;
    }

private:
    std::vector<std::vector<double>> phi() const {
        const std::size_t v = vocab_.size();
        std::vector<std::vector<double>> out(opts_.topics, std::vector<double>(v));
        for (std::size_t z = 0; z < opts_.topics; ++z) {
            const double denom = topic_total_[z] + static_cast<double>(v) * opts_.beta;
            for (std::size_t w = 0; w < v; ++w) out[z][w] = (topic_word_[z][w] + opts_.beta) / denom;
        }
        return out;
    }

    std::vector<std::vector<double>> theta() const {
        const std::size_t k = opts_.topics;
        std::vector<std::vector<double>> out(words_.size(), std::vector<double>(k));
        for (std::size_t d = 0; d < words_.size(); ++d) {
            const double denom = static_cast<double>(words_[d].size()) + static_cast<double>(k) * alpha_;
            for (std::size_t z = 0; z < k; ++z) out[d][z] = (doc_topic_[d][z] + alpha_) / denom;
        }
        return out;
    }

    void record_perplexity() { perplexity_.emplace_back(sweeps_, perplexity()); }

    LdaOptions opts_;
    double alpha_;
    std::mt19937_64 rng_;
    std::vector<std::string> vocab_;
    std::vector<std::vector<std::size_t>> words_;
    std::vector<std::vector<std::size_t>> assign_;
    std::vector<std::vector<std::uint32_t>> doc_topic_;
    std::vector<std::vector<std::uint32_t>> topic_word_;
    std::vector<std::uint32_t> topic_total_;
    std::vector<double> probs_;
    std::vector<std::pair<std::size_t, double>> perplexity_;
    std::size_t sweeps_ = 0;
};

inline TopicModel lda_fit(std::span<const std::vector<std::string>> docs, const LdaOptions& opts) {
    const auto nonempty = std::count_if(docs.begin(), docs.end(), [](const auto& d) { return !d.empty(); });
    if (static_cast<std::size_t>(nonempty) < opts.topics)
        throw Error("lda: need at least " + std::to_string(opts.topics) + " nonempty documents");
    LdaSampler sampler(docs, opts);
    for (std::size_t i = 0; i < opts.iterations; ++i) sampler.sweep();
    TopicModel m = sampler.model();
    if (m.perplexity.empty() || m.perplexity.back().first != sampler.sweeps())
        m.perplexity.emplace_back(sampler.sweeps(), sampler.perplexity());
    return m;
}

inline TopicModel lda_fit(std::span<const CleanDoc> docs, const LdaOptions& opts) {
    std::vector<std::vector<std::string>> tokens;
    tokens.reserve(docs.size());
    for (const auto& d : docs) tokens.push_back(d.tokens);
    return lda_fit(std::span<const std::vector<std::string>>(tokens), opts);
}

// Highest-probability words of a topic; ties break lexicographically.
inline std::vector<std::string> top_words(const TopicModel& model, std::size_t topic, std::size_t n) {
    if (topic >= model.topics) throw Error("top_words: topic " + std::to_string(topic) + " out of range");
    const auto& row = model.topic_word[topic];
    std::vector<std::size_t> idx(row.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return row[a] != row[b] ? row[a] > row[b] : model.vocab[a] < model.vocab[b];
    });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < idx.size() && i < n; ++i) out.push_back(model.vocab[idx[i]]);
    return out;
}

}  // namespace bridgenet
