#include "http_backend.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace datacure {

using nlohmann::json;

namespace {

// full jitter: sleep uniform in [0, base * 2^attempt)
void backoff_sleep(int base_delay_ms, int attempt) {
    if (base_delay_ms <= 0) return;
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    const double cap = static_cast<double>(base_delay_ms) * static_cast<double>(1 << attempt);
    const double ms = (rng() >> 11) * 0x1.0p-53 * cap;
    std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(ms));
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty()) throw ConfigError("http backend requires base_url");
    if (config_.retry.max_attempts < 1) throw ConfigError("retry.max_attempts must be >= 1");
    // Split "scheme://host:port/prefix" into client target and path prefix.
    std::size_t scheme = config_.base_url.find("://");
    if (scheme == std::string::npos)
        throw ConfigError("base_url must include a scheme: " + config_.base_url);
    std::size_t slash = config_.base_url.find('/', scheme + 3);
    if (slash == std::string::npos) {
        host_ = config_.base_url;
        path_prefix_ = "";
    } else {
        host_ = config_.base_url.substr(0, slash);
        path_prefix_ = config_.base_url.substr(slash);
        while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
    }
}

std::string HttpBackend::model_id(ExpertRole role) const {
    auto it = config_.models.find(to_string(role));
    if (it != config_.models.end()) return it->second;
    it = config_.models.find("default");
    if (it != config_.models.end()) return it->second;
    throw ConfigError("no model configured for role '" + to_string(role) +
                      "' and no default model set");
}

std::string HttpBackend::post_json(const std::string& path, const std::string& body) {
    std::string last_detail;
    const int attempts = config_.retry.max_attempts;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) backoff_sleep(config_.retry.base_delay_ms, attempt - 1);
        httplib::Client client(host_);
        client.set_connection_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
        client.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
        client.set_write_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
        httplib::Headers headers;
        if (!config_.api_key.empty())
            headers.emplace("Authorization", "Bearer " + config_.api_key);

        auto res = client.Post((path_prefix_ + path).c_str(), headers, body, "application/json");
        if (!res) {
            last_detail = "transport failure (" + httplib::to_string(res.error()) + ")";
            continue;
        }
        if (res->status >= 200 && res->status < 300) return res->body;
        if (res->status >= 500) {
            last_detail = "server error " + std::to_string(res->status);
            continue;
        }
        std::string snippet = res->body.substr(0, 200);
        throw BackendError("backend rejected request: status " + std::to_string(res->status) +
                               " body: " + snippet,
                           /*retryable=*/false, attempt + 1);
    }
    throw BackendError("backend unreachable after " + std::to_string(attempts) +
                           " attempts: " + last_detail,
                       /*retryable=*/true, attempts);
}

Prediction HttpBackend::complete(const CompletionRequest& req) {
    const std::string model = model_id(req.role);
    json body;
    body["model"] = model;
    body["temperature"] = req.temperature;
    body["max_tokens"] = req.max_tokens;
    body["messages"] = json::array({
        json{{"role", "system"}, {"content", req.system_prompt}},
        json{{"role", "user"}, {"content", req.user_prompt}},
    });
    if (req.want_logprobs && config_.logprobs) body["logprobs"] = true;

    const std::string raw = post_json("/chat/completions", body.dump());
    json resp = json::parse(raw, nullptr, /*allow_exceptions=*/false);
    if (resp.is_discarded() || !resp.contains("choices") || resp["choices"].empty())
        throw BackendError("malformed chat-completions response: " + raw.substr(0, 200),
                           /*retryable=*/false, 1);
    const json& choice = resp["choices"][0];
    if (!choice.contains("message") || !choice["message"].contains("content") ||
        !choice["message"]["content"].is_string())
        throw BackendError("chat-completions response missing message content",
                           /*retryable=*/false, 1);

    Prediction pred;
    pred.text = choice["message"]["content"].get<std::string>();
    pred.expert = req.role;
    pred.request_fingerprint = request_fingerprint(req, model);
    if (req.want_logprobs && config_.logprobs && choice.contains("logprobs") &&
        choice["logprobs"].is_object() && choice["logprobs"].contains("content") &&
        choice["logprobs"]["content"].is_array()) {
        std::vector<TokenLogprob> tokens;
        for (const auto& t : choice["logprobs"]["content"]) {
            if (!t.contains("token") || !t.contains("logprob")) continue;
            // clamp float dust above zero
            tokens.push_back({t["token"].get<std::string>(),
                              std::min(t["logprob"].get<double>(), 0.0)});
        }
        if (!tokens.empty()) pred.token_logprobs = std::move(tokens);
    }
    return pred;
}

EmbeddingVector HttpBackend::embed(const std::string& text) {
    if (trim_view(text).empty()) throw PreconditionError("cannot embed empty text");
    json body;
    body["model"] = config_.embedding_model;
    body["input"] = text;

    const std::string raw = post_json("/embeddings", body.dump());
    json resp = json::parse(raw, nullptr, /*allow_exceptions=*/false);
    if (resp.is_discarded() || !resp.contains("data") || !resp["data"].is_array() ||
        resp["data"].empty() || !resp["data"][0].contains("embedding"))
        throw BackendError("malformed embeddings response: " + raw.substr(0, 200),
                           /*retryable=*/false, 1);
    std::vector<double> values;
    for (const auto& v : resp["data"][0]["embedding"]) values.push_back(v.get<double>());
    EmbeddingVector vec = EmbeddingVector::from_values(std::move(values));

    std::lock_guard<std::mutex> lock(dim_mutex_);
    if (expected_dim_ == 0) {
        expected_dim_ = vec.dimension();
    } else if (vec.dimension() != expected_dim_) {
        throw BackendError("embedding dimension changed mid-run: expected " +
                               std::to_string(expected_dim_) + ", got " +
                               std::to_string(vec.dimension()),
                           /*retryable=*/false, 1);
    }
    return vec;
}

}  // namespace datacure
