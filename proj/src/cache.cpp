#include "cache.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "json.hpp"

namespace datacure {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json prediction_to_json(const Prediction& p) {
    json j;
    j["kind"] = "completion";
    j["text"] = p.text;
    j["expert"] = to_string(p.expert);
    j["fingerprint"] = p.request_fingerprint;
    if (p.token_logprobs) {
        json arr = json::array();
        for (const auto& t : *p.token_logprobs) arr.push_back({t.token, t.logprob});
        j["token_logprobs"] = arr;
    } else {
        j["token_logprobs"] = nullptr;
    }
    return j;
}

std::optional<Prediction> prediction_from_json(const json& j) {
    if (!j.is_object() || j.value("kind", "") != "completion") return std::nullopt;
    if (!j.contains("text") || !j["text"].is_string()) return std::nullopt;
    Prediction p;
    p.text = j["text"].get<std::string>();
    p.expert = expert_role_from_string(j.value("expert", "base"));
    p.request_fingerprint = j.value("fingerprint", "");
    if (j.contains("token_logprobs") && j["token_logprobs"].is_array()) {
        std::vector<TokenLogprob> tokens;
        for (const auto& t : j["token_logprobs"]) {
            if (!t.is_array() || t.size() != 2 || !t[0].is_string() || !t[1].is_number())
                return std::nullopt;
            tokens.push_back({t[0].get<std::string>(), t[1].get<double>()});
        }
        p.token_logprobs = std::move(tokens);
    }
    return p;
}

json embedding_to_json(const EmbeddingVector& v) {
    json j;
    j["kind"] = "embedding";
    j["values"] = v.values;
    return j;
}

std::optional<EmbeddingVector> embedding_from_json(const json& j) {
    if (!j.is_object() || j.value("kind", "") != "embedding") return std::nullopt;
    if (!j.contains("values") || !j["values"].is_array() || j["values"].empty())
        return std::nullopt;
    std::vector<double> values;
    for (const auto& v : j["values"]) {
        if (!v.is_number()) return std::nullopt;
        values.push_back(v.get<double>());
    }
    try {
        return EmbeddingVector::from_values(std::move(values));
    } catch (const Error&) {
        return std::nullopt;
    }
}

std::optional<json> read_entry(const std::string& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    json j = json::parse(buf.str(), nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) return std::nullopt;
    return j;
}

void write_entry(const std::string& path, const json& j) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw IoError("cannot write cache entry: " + tmp);
        out << j.dump();
    }
    fs::rename(tmp, path);
}

}  // namespace

CachedBackend::CachedBackend(std::shared_ptr<Backend> inner, std::string cache_dir)
    : inner_(std::move(inner)), cache_dir_(std::move(cache_dir)) {
    std::error_code ec;
    fs::create_directories(cache_dir_, ec);
    if (ec) throw IoError("cannot create cache directory " + cache_dir_ + ": " + ec.message());
}

std::string CachedBackend::entry_path(const std::string& fingerprint) const {
    return (fs::path(cache_dir_) / (fingerprint + ".json")).string();
}

std::shared_ptr<std::mutex> CachedBackend::key_mutex(const std::string& fingerprint) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto& m = key_mutexes_[fingerprint];
    if (!m) m = std::make_shared<std::mutex>();
    return m;
}

Prediction CachedBackend::complete(const CompletionRequest& req) {
    const std::string fp = request_fingerprint(req, inner_->model_id(req.role));
    auto key_lock = key_mutex(fp);
    std::lock_guard<std::mutex> lock(*key_lock);

    const std::string path = entry_path(fp);
    if (auto j = read_entry(path)) {
        if (auto p = prediction_from_json(*j)) {
            std::lock_guard<std::mutex> stats_lock(mutex_);
            hits_++;
            return *p;
        }
    }
    Prediction fresh = inner_->complete(req);
    write_entry(path, prediction_to_json(fresh));
    std::lock_guard<std::mutex> stats_lock(mutex_);
    misses_++;
    return fresh;
}

EmbeddingVector CachedBackend::embed(const std::string& text) {
    const std::string fp = embedding_fingerprint(text, inner_->embedding_model_id());
    auto key_lock = key_mutex(fp);
    std::lock_guard<std::mutex> lock(*key_lock);

    const std::string path = entry_path(fp);
    if (auto j = read_entry(path)) {
        if (auto v = embedding_from_json(*j)) {
            std::lock_guard<std::mutex> stats_lock(mutex_);
            hits_++;
            return *v;
        }
    }
    EmbeddingVector fresh = inner_->embed(text);
    write_entry(path, embedding_to_json(fresh));
    std::lock_guard<std::mutex> stats_lock(mutex_);
    misses_++;
    return fresh;
}

CachedBackend::Stats CachedBackend::stats() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return {hits_, misses_};
}

}  // namespace datacure
