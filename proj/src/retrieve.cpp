#include "retrieve.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <mutex>
#include <optional>

#include "util.hpp"

namespace datacure {

namespace {
constexpr char kIndexMagic[4] = {'D', 'C', 'I', 'X'};
constexpr std::uint32_t kIndexVersion = 1;
}  // namespace

EmbeddingIndex build_index(const Dataset& clean, Backend& backend, int concurrency,
                           const std::function<void(const std::string&)>& warn) {
    if (clean.empty()) throw PreconditionError("build_index requires a non-empty clean set");

    std::vector<std::optional<EmbeddingVector>> vectors(clean.size());
    std::mutex warn_mutex;
    parallel_for(clean.size(), concurrency, [&](std::size_t i) {
        try {
            vectors[i] = backend.embed(clean.samples[i].query);
        } catch (const BackendError& e) {
            if (e.retryable) throw;
            std::lock_guard<std::mutex> lock(warn_mutex);
            if (warn) warn("embedding failed for sample " + clean.samples[i].id + ": " + e.what());
        }
    });

    EmbeddingIndex index;
    for (std::size_t i = 0; i < clean.size(); ++i) {
        if (!vectors[i]) continue;
        if (index.dimension == 0) index.dimension = vectors[i]->dimension();
        if (vectors[i]->dimension() != index.dimension)
            throw PreconditionError("inconsistent embedding dimensions in index");
        index.entries.emplace_back(clean.samples[i].id, std::move(*vectors[i]));
    }
    if (index.entries.empty())
        throw PreconditionError("all embeddings failed; index would be empty");
    return index;
}

std::vector<std::pair<std::string, double>> knn(const EmbeddingIndex& index,
                                                const EmbeddingVector& query_vec,
                                                std::size_t k) {
    if (k < 1) throw PreconditionError("k must be >= 1");
    if (query_vec.dimension() != index.dimension)
        throw PreconditionError("query dimension " + std::to_string(query_vec.dimension()) +
                                " does not match index dimension " +
                                std::to_string(index.dimension));

    std::vector<std::pair<std::size_t, double>> sims;
    sims.reserve(index.size());
    for (std::size_t i = 0; i < index.entries.size(); ++i)
        sims.emplace_back(i, cosine_similarity(query_vec, index.entries[i].second));

    const std::size_t take = std::min(k, sims.size());
    auto better = [&](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return index.entries[a.first].first < index.entries[b.first].first;
    };
    std::partial_sort(sims.begin(), sims.begin() + static_cast<std::ptrdiff_t>(take), sims.end(),
                      better);

    std::vector<std::pair<std::string, double>> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i)
        out.emplace_back(index.entries[sims[i].first].first, sims[i].second);
    return out;
}

void save_index(const EmbeddingIndex& index, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write index file: " + path);
    auto write_u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    auto write_u64 = [&](std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); };

    out.write(kIndexMagic, 4);
    write_u32(kIndexVersion);
    write_u32(static_cast<std::uint32_t>(index.dimension));
    write_u64(index.entries.size());
    for (const auto& [id, vec] : index.entries) {
        write_u32(static_cast<std::uint32_t>(id.size()));
        out.write(id.data(), static_cast<std::streamsize>(id.size()));
        out.write(reinterpret_cast<const char*>(vec.values.data()),
                  static_cast<std::streamsize>(vec.values.size() * sizeof(double)));
    }
    out.flush();
    if (!out) throw IoError("I/O failure while writing index: " + path);
}

EmbeddingIndex load_index(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open index file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kIndexMagic, 4) != 0)
        throw ParseError("not an embedding index file: " + path);
    auto read_u32 = [&]() {
        std::uint32_t v = 0;
        in.read(reinterpret_cast<char*>(&v), 4);
        return v;
    };
    auto read_u64 = [&]() {
        std::uint64_t v = 0;
        in.read(reinterpret_cast<char*>(&v), 8);
        return v;
    };
    const std::uint32_t version = read_u32();
    if (version != kIndexVersion)
        throw ParseError("unsupported index version " + std::to_string(version) + " in " + path);
    const std::uint32_t dim = read_u32();
    const std::uint64_t count = read_u64();
    if (!in || dim == 0) throw ParseError("corrupt index header: " + path);

    EmbeddingIndex index;
    index.dimension = dim;
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint32_t id_len = read_u32();
        std::string id(id_len, '\0');
        in.read(id.data(), id_len);
        std::vector<double> values(dim);
        in.read(reinterpret_cast<char*>(values.data()),
                static_cast<std::streamsize>(dim * sizeof(double)));
        if (!in) throw ParseError("truncated index file: " + path);
        index.entries.emplace_back(std::move(id), EmbeddingVector::from_values(std::move(values)));
    }
    return index;
}

}  // namespace datacure
