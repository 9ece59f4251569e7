#ifndef DATACURE_PROMPTS_HPP
#define DATACURE_PROMPTS_HPP

#include <string>
#include <utility>
#include <vector>

#include "corpus.hpp"

namespace datacure {

// Versioned prompt assets. Each template has a fixed slot set; overrides from
// config must use the same slots (unknown slots fail at render time).
//
//   task        {query}
//   reasoning   {query} {reflection_block}
//   reflection  {query} {reasoning}
//   context     {exemplars} {query}
//   review      {query} {candidate_a} {candidate_b}
//   confidence  {exemplars} {query} {answer}
inline constexpr const char* kPromptVersion = "v1";

struct PromptSet {
    std::string system;
    std::string task;
    std::string reasoning;
    std::string reflection;
    std::string context;
    std::string review;
    std::string confidence;

    static PromptSet defaults();
};

std::string system_prompt(const PromptSet& p, TaskKind kind);
std::string render_task(const PromptSet& p, const std::string& query);
std::string render_reasoning(const PromptSet& p, const std::string& query,
                             const std::string& prior_reflection);
std::string render_reflection(const PromptSet& p, const std::string& query,
                              const std::string& reasoning);
std::string render_context(const PromptSet& p,
                           const std::vector<std::pair<std::string, std::string>>& exemplars,
                           const std::string& query);
std::string render_review(const PromptSet& p, const std::string& query,
                          const std::string& candidate_a, const std::string& candidate_b);
std::string render_confidence(const PromptSet& p,
                              const std::vector<std::pair<std::string, std::string>>& exemplars,
                              const std::string& query, const std::string& answer);

// Pulls the text after the last "Answer:" marker. Reasoning and review
// completions must carry the marker; absence means unparseable.
struct ParsedAnswer {
    std::string raw;
    bool parseable = false;
};
ParsedAnswer parse_marked_answer(const std::string& completion_text);

}  // namespace datacure

#endif
