#pragma once
// Embedding files and the thresholded cosine-similarity Content graph.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "bridgenet/common.hpp"
#include "bridgenet/detail/io.hpp"
#include "bridgenet/detail/parallel.hpp"
#include "bridgenet/graph.hpp"
#include "bridgenet/ingest.hpp"

namespace bridgenet {

static_assert(std::endian::native == std::endian::little, "embedding files are little-endian");

struct EmbeddingMatrix {
    std::vector<std::string> ids;
    std::size_t dim = 0;
    std::vector<float> data;     // ids.size() x dim, row-major
    std::vector<char> degenerate;  // all-zero rows

    std::size_t rows() const noexcept { return ids.size(); }
    std::span<const float> row(std::size_t i) const { return {data.data() + i * dim, dim}; }
};

inline constexpr char kEmbeddingMagic[4] = {'E', 'M', 'B', '1'};

namespace detail {

class ByteReader {
public:
    explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

    void read(void* dst, std::size_t len, const char* what) {
        if (len > bytes_.size() - pos_)
            throw Error("embedding file truncated at byte offset " + std::to_string(pos_) + " while reading " + what);
        std::memcpy(dst, bytes_.data() + pos_, len);
        pos_ += len;
    }

    std::uint32_t u32(const char* what) {
        std::uint32_t v = 0;
        read(&v, sizeof v, what);
        return v;
    }

    std::size_t offset() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

}  // namespace detail

// Layout: "EMB1", u32 n_docs, u32 dim, n_docs x (u32 len, id bytes), n_docs*dim f32.
inline EmbeddingMatrix parse_embeddings(std::string_view bytes) {
    detail::ByteReader r(bytes);
    char magic[4];
    r.read(magic, 4, "magic");
    if (std::memcmp(magic, kEmbeddingMagic, 4) != 0) throw Error("bad embedding magic at byte offset 0");
    EmbeddingMatrix m;
    const std::uint32_t n = r.u32("n_docs");
    m.dim = r.u32("dim");
    m.ids.reserve(n);
    std::unordered_map<std::string, std::size_t> seen;
    for (std::uint32_t i = 0; i < n; ++i) {
        const std::size_t at = r.offset();
        const std::uint32_t len = r.u32("id length");
        std::string id(len, '\0');
        r.read(id.data(), len, "id");
        if (!seen.emplace(id, i).second) throw Error("duplicate id '" + id + "' at byte offset " + std::to_string(at));
        m.ids.push_back(std::move(id));
    }
    const std::size_t payload = static_cast<std::size_t>(n) * m.dim * sizeof(float);
    if (r.remaining() != payload)
        throw Error("embedding payload size mismatch at byte offset " + std::to_string(r.offset()) + ": header says " +
                    std::to_string(payload) + " bytes, file has " + std::to_string(r.remaining()));
    const std::size_t base = r.offset();
    m.data.resize(static_cast<std::size_t>(n) * m.dim);
    r.read(m.data.data(), payload, "vectors");
    m.degenerate.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        bool zero = true;
        for (std::size_t k = 0; k < m.dim; ++k) {
            const float x = m.data[i * m.dim + k];
            if (!std::isfinite(x))
                throw Error("non-finite value at byte offset " + std::to_string(base + (i * m.dim + k) * sizeof(float)));
            if (x != 0.0f) zero = false;
        }
        m.degenerate[i] = zero;
    }
    return m;
}

inline EmbeddingMatrix load_embeddings(const std::filesystem::path& path) { return parse_embeddings(detail::read_file(path)); }

inline std::string serialize_embeddings(const EmbeddingMatrix& m) {
    if (m.data.size() != m.rows() * m.dim) throw Error("embedding matrix shape mismatch");
    std::string out(kEmbeddingMagic, 4);
    auto put_u32 = [&](std::uint32_t v) { out.append(reinterpret_cast<const char*>(&v), sizeof v); };
    put_u32(static_cast<std::uint32_t>(m.rows()));
    put_u32(static_cast<std::uint32_t>(m.dim));
    for (const auto& id : m.ids) {
        put_u32(static_cast<std::uint32_t>(id.size()));
        out += id;
    }
    out.append(reinterpret_cast<const char*>(m.data.data()), m.data.size() * sizeof(float));
    return out;
}

inline void save_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& m) {
    detail::atomic_write(path, serialize_embeddings(m));
}

// ---------------------------------------------------------------------------

namespace detail {

// Accumulates in double; every caller shares this so blocked and pairwise
// evaluation give bit-identical scores.
inline double dot(std::span<const float> u, std::span<const float> v) {
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) s += static_cast<double>(u[k]) * static_cast<double>(v[k]);
    return s;
}

inline double cosine_from(double dot_uv, double norm_u, double norm_v) {
    if (norm_u == 0.0 || norm_v == 0.0) return 0.0;
    return std::clamp(dot_uv / (norm_u * norm_v), -1.0, 1.0);
}

}  // namespace detail

// Zero vectors have cosine 0 with everything.
inline double cosine(std::span<const float> u, std::span<const float> v) {
    if (u.size() != v.size()) throw Error("cosine: dimension mismatch");
    return detail::cosine_from(detail::dot(u, v), std::sqrt(detail::dot(u, u)), std::sqrt(detail::dot(v, v)));
}

class SimilarityThreshold {
public:
    SimilarityThreshold() = default;
    explicit SimilarityThreshold(double theta) : theta_(theta) {
        if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigError("similarity threshold must lie in [0, 1]");
    }
    double value() const noexcept { return theta_; }

private:
    double theta_ = 0.8;
};

struct SimilarPair {
    std::size_t i = 0;  // i < j
    std::size_t j = 0;
    double cosine = 0.0;

    bool operator==(const SimilarPair&) const = default;
};

struct SimilarityOptions {
    SimilarityThreshold threshold;
    std::size_t block_size = 256;
    unsigned threads = 0;  // 0: hardware concurrency
};

// All pairs with cosine strictly above the threshold, sorted by (i, j).
// Optional `groups` restricts pairs to rows sharing a group label.
inline std::vector<SimilarPair> similar_pairs(const EmbeddingMatrix& emb, const SimilarityOptions& opts,
                                              std::span<const int> groups = {}) {
    const std::size_t n = emb.rows();
    const std::size_t bs = std::max<std::size_t>(1, opts.block_size);
    const double theta = opts.threshold.value();
    std::vector<double> norms(n);
    for (std::size_t i = 0; i < n; ++i) norms[i] = std::sqrt(detail::dot(emb.row(i), emb.row(i)));

    const std::size_t blocks = (n + bs - 1) / bs;
    std::vector<std::pair<std::size_t, std::size_t>> tiles;
    for (std::size_t bi = 0; bi < blocks; ++bi)
        for (std::size_t bj = bi; bj < blocks; ++bj) tiles.emplace_back(bi, bj);

    std::vector<std::vector<SimilarPair>> per_chunk(std::max<std::size_t>(1, tiles.size()));
    detail::parallel_chunks(tiles.size(), opts.threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        auto& out = per_chunk[chunk];
        for (std::size_t t = begin; t < end; ++t) {
            const auto [bi, bj] = tiles[t];
            const std::size_t i_end = std::min(n, (bi + 1) * bs);
            const std::size_t j_end = std::min(n, (bj + 1) * bs);
            for (std::size_t i = bi * bs; i < i_end; ++i) {
                const auto ri = emb.row(i);
                for (std::size_t j = (bi == bj ? i + 1 : bj * bs); j < j_end; ++j) {
                    if (!groups.empty() && groups[i] != groups[j]) continue;
                    const double c = detail::cosine_from(detail::dot(ri, emb.row(j)), norms[i], norms[j]);
                    if (c > theta) out.push_back({i, j, c});
                }
            }
        }
    });
    std::vector<SimilarPair> all;
    for (auto& part : per_chunk) all.insert(all.end(), part.begin(), part.end());
    std::sort(all.begin(), all.end(), [](const SimilarPair& a, const SimilarPair& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    return all;
}

struct ContentGraphOptions {
    SimilarityOptions similarity;
    // Only link documents from the same event.
    bool per_event = false;
};

// One node per embedding row (row order), annotated from the post metadata.
inline Graph build_content_graph(const EmbeddingMatrix& emb, std::span<const Post> posts,
                                 const ContentGraphOptions& opts = {}) {
    std::unordered_map<std::string_view, const Post*> meta;
    for (const auto& p : posts) meta.emplace(p.doc_id, &p);
    std::vector<std::string> missing;
    for (const auto& id : emb.ids)
        if (!meta.contains(id)) missing.push_back(id);
    if (!missing.empty()) {
        std::string msg = "embedding ids without post metadata:";
        for (std::size_t i = 0; i < missing.size() && i < 20; ++i) msg += " " + missing[i];
        if (missing.size() > 20) msg += " ... (" + std::to_string(missing.size()) + " total)";
        throw Error(msg);
    }

    Graph g;
    std::vector<int> groups;
    for (const auto& id : emb.ids) {
        const Post& p = *meta.at(id);
        NodeAttributes a;
        a.id = id;
        a.kind = NodeKind::content;
        a.platform = p.platform;
        a.labels = {{"user_id", p.user_id}, {"username", p.username}, {"event", std::string(to_string(p.event))}};
        g.add_node(std::move(a));
        groups.push_back(static_cast<int>(p.event));
    }
    const auto pairs = similar_pairs(emb, opts.similarity, opts.per_event ? std::span<const int>(groups) : std::span<const int>{});
    for (const auto& sp : pairs)
        g.add_edge(static_cast<NodeIndex>(sp.i), static_cast<NodeIndex>(sp.j), sp.cosine);
    return g;
}

}  // namespace bridgenet
