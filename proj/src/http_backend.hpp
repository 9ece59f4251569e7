#ifndef DATACURE_HTTP_BACKEND_HPP
#define DATACURE_HTTP_BACKEND_HPP

#include <map>
#include <mutex>
#include <string>

#include "backend.hpp"

namespace datacure {

struct RetryPolicy {
    int max_attempts = 3;
    int base_delay_ms = 250;  // exponential backoff with full jitter
};

struct HttpBackendConfig {
    std::string base_url;  // e.g. "https://api.openai.com/v1"
    std::string api_key;   // resolved from the configured environment variable
    std::map<std::string, std::string> models;  // role name -> model, "default" fallback
    std::string embedding_model = "text-embedding-3-small";
    bool logprobs = true;  // capability flag; some endpoints omit logprobs
    int timeout_ms = 60000;
    RetryPolicy retry;
};

// Client for OpenAI-compatible chat-completions and embeddings endpoints.
// Transport failures and 5xx responses are retried per RetryPolicy and then
// surface as a retryable BackendError carrying the attempt count; other
// non-2xx responses are permanent errors with the status detail.
class HttpBackend : public Backend {
public:
    explicit HttpBackend(HttpBackendConfig config);

    Prediction complete(const CompletionRequest& req) override;
    EmbeddingVector embed(const std::string& text) override;
    bool supports_logprobs() const override { return config_.logprobs; }
    std::string model_id(ExpertRole role) const override;
    std::string embedding_model_id() const override { return config_.embedding_model; }

private:
    std::string post_json(const std::string& path, const std::string& body);

    HttpBackendConfig config_;
    std::string host_;         // scheme://host[:port]
    std::string path_prefix_;  // e.g. "/v1"
    std::mutex dim_mutex_;
    std::size_t expected_dim_ = 0;  // pinned after the first embedding
};

}  // namespace datacure

#endif
