#ifndef DATACURE_CACHE_HPP
#define DATACURE_CACHE_HPP

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "backend.hpp"

namespace datacure {

// File-backed response cache wrapping any backend. One file per request
// fingerprint under cache_dir; a hit bypasses the inner backend entirely.
// Corrupt entries fall through to the inner backend and are rewritten.
// Writes are serialized per key, so concurrent identical requests hit the
// inner backend exactly once.
class CachedBackend : public Backend {
public:
    CachedBackend(std::shared_ptr<Backend> inner, std::string cache_dir);

    Prediction complete(const CompletionRequest& req) override;
    EmbeddingVector embed(const std::string& text) override;
    bool supports_logprobs() const override { return inner_->supports_logprobs(); }
    std::string model_id(ExpertRole role) const override { return inner_->model_id(role); }
    std::string embedding_model_id() const override { return inner_->embedding_model_id(); }

    struct Stats {
        long hits = 0;
        long misses = 0;
    };
    Stats stats() const;

private:
    std::string entry_path(const std::string& fingerprint) const;
    std::shared_ptr<std::mutex> key_mutex(const std::string& fingerprint);

    std::shared_ptr<Backend> inner_;
    std::string cache_dir_;
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<std::mutex>> key_mutexes_;
    long hits_ = 0;
    long misses_ = 0;
};

}  // namespace datacure

#endif
