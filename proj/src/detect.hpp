#ifndef DATACURE_DETECT_HPP
#define DATACURE_DETECT_HPP

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "backend.hpp"
#include "corpus.hpp"
#include "prompts.hpp"

namespace datacure {

enum class CheckerPolicy {
    AnyMatch,   // label matches at least one expert (default)
    BothMatch,  // strict: label must match both
};
CheckerPolicy checker_policy_from_string(const std::string& s);
std::string to_string(CheckerPolicy policy);

// A parsed, normalized expert answer. Unparseable answers never match.
struct AnswerCandidate {
    std::string raw;
    std::string normalized;
    bool parseable = false;
};

struct DetectionRecord {
    std::string sample_id;
    Prediction base_pred;
    Prediction reas_pred;
    AnswerCandidate base_answer;
    AnswerCandidate reas_answer;
    std::vector<std::pair<std::string, std::string>> reflection_trace;
    int verdict = 0;  // 1 = reliable, 0 = potentially noisy
    std::optional<std::string> error_note;
};

struct Partition {
    Dataset clean;
    Dataset noisy;
    std::map<std::string, DetectionRecord> records;
};

struct DetectConfig {
    int reflection_iterations = 2;  // valid range [1, 4]
    CheckerPolicy policy = CheckerPolicy::AnyMatch;
    int concurrency = 8;
    int max_tokens = 512;
    PromptSet prompts = PromptSet::defaults();
};

// Attached to requests whenever the sample carries a ground truth so the
// simulated backend can apply its oracle accuracy.
std::optional<OracleHint> make_hint(const Sample& sample,
                                    const std::vector<std::string>& options);

Prediction base_predict(const Sample& sample, Backend& backend, const DetectConfig& config,
                        TaskKind kind, const std::vector<std::string>& options);

struct ReasoningResult {
    Prediction final_pred;
    AnswerCandidate answer;
    std::vector<std::pair<std::string, std::string>> trace;  // (reasoning, reflection) per round
};
ReasoningResult reasoning_predict(const Sample& sample, Backend& backend,
                                  const DetectConfig& config, TaskKind kind,
                                  const std::vector<std::string>& options);

int check_consistency(const std::string& label, const AnswerCandidate& base,
                      const AnswerCandidate& reas, TaskKind kind,
                      CheckerPolicy policy = CheckerPolicy::AnyMatch);

// Algorithm: base prediction + iterative reasoning-reflection per sample,
// checker verdict, then split into clean/noisy. Samples whose predictions
// fail permanently are routed to noisy with an error note.
Partition detect(const Dataset& dataset, Backend& backend, const DetectConfig& config,
                 const std::vector<std::string>& options = {});

}  // namespace datacure

#endif
