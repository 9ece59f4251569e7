#ifndef DATACURE_BACKEND_HPP
#define DATACURE_BACKEND_HPP

#include <array>
#include <atomic>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "util.hpp"

namespace datacure {

enum class ExpertRole { Base, Reasoning, Reflection, Context, Checker, Review };
inline constexpr int kNumExpertRoles = 6;

std::string to_string(ExpertRole role);
ExpertRole expert_role_from_string(const std::string& s);

// Metadata attached by the pipeline when a sample carries a ground truth.
// The HTTP backend ignores it; the simulated backend keys its oracle-accuracy
// draw on it (sample id + role), which is what makes harness statistics
// analytically predictable.
struct OracleHint {
    std::string sample_id;
    std::string ground_truth;
    std::vector<std::string> options;  // empty for non-multiple-choice tasks
};

struct CompletionRequest {
    std::string system_prompt;
    std::string user_prompt;
    double temperature = 0.0;  // consistency comparisons always run at 0
    int max_tokens = 512;
    bool want_logprobs = false;
    ExpertRole role = ExpertRole::Base;
    std::optional<OracleHint> hint;
};

struct TokenLogprob {
    std::string token;
    double logprob = 0.0;  // always <= 0
};

struct Prediction {
    std::string text;
    std::optional<std::vector<TokenLogprob>> token_logprobs;
    ExpertRole expert = ExpertRole::Base;
    std::string request_fingerprint;
};

struct EmbeddingVector {
    std::vector<double> values;
    double norm = 0.0;  // cached Euclidean norm, always > 0

    static EmbeddingVector from_values(std::vector<double> values);
    std::size_t dimension() const { return values.size(); }
};

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

class Backend {
public:
    virtual ~Backend() = default;
    virtual Prediction complete(const CompletionRequest& req) = 0;
    virtual EmbeddingVector embed(const std::string& text) = 0;
    virtual bool supports_logprobs() const = 0;
    virtual std::string model_id(ExpertRole role) const = 0;
    virtual std::string embedding_model_id() const = 0;
};

// Cache key: prompts, temperature, max_tokens, want_logprobs, model id, role,
// and the oracle hint when present (simulated runs key responses on sample
// identity, so the hint has to participate or identical prompts would alias).
std::string request_fingerprint(const CompletionRequest& req, const std::string& model);
std::string embedding_fingerprint(const std::string& text, const std::string& model);

// Pass-through wrapper tallying calls per role; used both for the review
// fast-path audit and for the warm-cache zero-call gate.
class CountingBackend : public Backend {
public:
    explicit CountingBackend(std::shared_ptr<Backend> inner) : inner_(std::move(inner)) {}

    Prediction complete(const CompletionRequest& req) override {
        completions_[static_cast<std::size_t>(req.role)].fetch_add(1);
        return inner_->complete(req);
    }
    EmbeddingVector embed(const std::string& text) override {
        embeds_.fetch_add(1);
        return inner_->embed(text);
    }
    bool supports_logprobs() const override { return inner_->supports_logprobs(); }
    std::string model_id(ExpertRole role) const override { return inner_->model_id(role); }
    std::string embedding_model_id() const override { return inner_->embedding_model_id(); }

    long completions(ExpertRole role) const {
        return completions_[static_cast<std::size_t>(role)].load();
    }
    long total_completions() const {
        long t = 0;
        for (const auto& c : completions_) t += c.load();
        return t;
    }
    long embeds() const { return embeds_.load(); }
    long total_calls() const { return total_completions() + embeds(); }

private:
    std::shared_ptr<Backend> inner_;
    std::array<std::atomic<long>, kNumExpertRoles> completions_{};
    std::atomic<long> embeds_{0};
};

}  // namespace datacure

#endif
