#ifndef DATACURE_RETRIEVE_HPP
#define DATACURE_RETRIEVE_HPP

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "backend.hpp"
#include "corpus.hpp"

namespace datacure {

struct EmbeddingIndex {
    std::vector<std::pair<std::string, EmbeddingVector>> entries;  // (sample_id, vector)
    std::size_t dimension = 0;

    std::size_t size() const { return entries.size(); }
};

// One vector per clean sample, embedded from the query only. Samples whose
// embedding fails permanently are omitted with a warning; the index stays
// valid as long as at least one entry embeds.
EmbeddingIndex build_index(const Dataset& clean, Backend& backend, int concurrency = 8,
                           const std::function<void(const std::string&)>& warn = {});

// Exact top-min(k, |index|) by cosine similarity, descending; ties broken by
// ascending sample id so results are reproducible bit-for-bit.
std::vector<std::pair<std::string, double>> knn(const EmbeddingIndex& index,
                                                const EmbeddingVector& query_vec,
                                                std::size_t k);

// Sidecar persistence (versioned binary header) to avoid re-embedding.
void save_index(const EmbeddingIndex& index, const std::string& path);
EmbeddingIndex load_index(const std::string& path);

}  // namespace datacure

#endif
