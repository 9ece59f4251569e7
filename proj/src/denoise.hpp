#ifndef DATACURE_DENOISE_HPP
#define DATACURE_DENOISE_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "backend.hpp"
#include "corpus.hpp"
#include "detect.hpp"
#include "retrieve.hpp"

namespace datacure {

enum class ReviewResolution {
    Resolved,      // fast path, review verdict, or single valid candidate
    Fallback,      // review output unparseable; context answer used
    Unresolvable,  // no valid candidate (or permanent backend failure)
};
std::string to_string(ReviewResolution r);

struct DenoiseRecord {
    std::string sample_id;
    std::vector<std::string> context_ids;  // retrieval order, most similar first
    Prediction cont_pred;
    AnswerCandidate cont_answer;
    AnswerCandidate reas_answer;  // reused from detection
    std::string reviewed_label;
    std::string review_raw;
    ReviewResolution resolution = ReviewResolution::Unresolvable;
    bool fast_path = false;
    std::optional<std::string> error_note;
};

struct DenoiseConfig {
    int k = 3;
    int concurrency = 8;
    int max_tokens = 512;
    PromptSet prompts = PromptSet::defaults();
};

// Few-shot completion over retrieved clean exemplars (most similar first),
// requested with logprobs so the selection stage can score it.
Prediction context_predict(const Sample& sample,
                           const std::vector<std::pair<std::string, std::string>>& exemplars,
                           Backend& backend, const DenoiseConfig& config, TaskKind kind,
                           const std::vector<std::string>& options);

struct ReviewOutcome {
    std::string label;
    std::string raw;
    ReviewResolution resolution = ReviewResolution::Unresolvable;
    bool fast_path = false;
};

// Candidate synthesis. Agreement between valid candidates short-circuits
// without a backend call; exactly one valid candidate is taken as-is;
// disagreement goes to the Review expert. The original (suspect) label is
// never shown to the reviewer.
ReviewOutcome review(const Sample& sample, const AnswerCandidate& cont,
                     const AnswerCandidate& reas, Backend& backend, const DenoiseConfig& config,
                     TaskKind kind, const std::vector<std::string>& options);

struct DenoiseResult {
    Dataset relabeled;  // tag "relabeled"; unresolvable samples excluded
    std::map<std::string, DenoiseRecord> records;
};

DenoiseResult denoise(const Dataset& noisy, const Dataset& clean, const EmbeddingIndex& index,
                      const std::map<std::string, DetectionRecord>& detection_records,
                      Backend& backend, const DenoiseConfig& config,
                      const std::vector<std::string>& options = {});

}  // namespace datacure

#endif
