#include "backend.hpp"

#include <cmath>
#include <cstdio>

namespace datacure {

std::string to_string(ExpertRole role) {
    switch (role) {
        case ExpertRole::Base: return "base";
        case ExpertRole::Reasoning: return "reasoning";
        case ExpertRole::Reflection: return "reflection";
        case ExpertRole::Context: return "context";
        case ExpertRole::Checker: return "checker";
        case ExpertRole::Review: return "review";
    }
    return "base";
}

ExpertRole expert_role_from_string(const std::string& s) {
    if (s == "base") return ExpertRole::Base;
    if (s == "reasoning") return ExpertRole::Reasoning;
    if (s == "reflection") return ExpertRole::Reflection;
    if (s == "context") return ExpertRole::Context;
    if (s == "checker") return ExpertRole::Checker;
    if (s == "review") return ExpertRole::Review;
    throw ConfigError("unknown expert role '" + s + "'");
}

EmbeddingVector EmbeddingVector::from_values(std::vector<double> values) {
    if (values.empty()) throw PreconditionError("embedding vector is empty");
    double sq = 0.0;
    for (double v : values) sq += v * v;
    const double norm = std::sqrt(sq);
    if (!(norm > 0.0)) throw PreconditionError("zero embedding vector rejected");
    return EmbeddingVector{std::move(values), norm};
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dimension() != b.dimension())
        throw PreconditionError("embedding dimension mismatch: " +
                                std::to_string(a.dimension()) + " vs " +
                                std::to_string(b.dimension()));
    double dot = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) dot += a.values[i] * b.values[i];
    return dot / (a.norm * b.norm);
}

namespace {

std::string hex128(std::string_view canonical) {
    // Two independent FNV lanes; plenty for a desk-scale request cache.
    const std::uint64_t lo = fnv1a64(canonical);
    const std::uint64_t hi = fnv1a64(canonical, 0x9ae16a3b2f90404fULL);
    return to_hex(hi) + to_hex(lo);
}

}  // namespace

std::string request_fingerprint(const CompletionRequest& req, const std::string& model) {
    char temp_buf[32];
    std::snprintf(temp_buf, sizeof(temp_buf), "%.17g", req.temperature);
    std::string canonical;
    canonical.reserve(req.system_prompt.size() + req.user_prompt.size() + 128);
    auto add = [&](std::string_view part) {
        canonical.append(part);
        canonical.push_back('\x1f');
    };
    add("v1");
    add(model);
    add(req.system_prompt);
    add(req.user_prompt);
    add(temp_buf);
    add(std::to_string(req.max_tokens));
    add(req.want_logprobs ? "1" : "0");
    add(to_string(req.role));
    if (req.hint) {
        add(req.hint->sample_id);
        add(req.hint->ground_truth);
        for (const auto& o : req.hint->options) add(o);
    }
    return hex128(canonical);
}

std::string embedding_fingerprint(const std::string& text, const std::string& model) {
    std::string canonical = "v1\x1f" "embed\x1f" + model + "\x1f" + text;
    return hex128(canonical);
}

}  // namespace datacure
