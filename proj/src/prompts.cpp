#include "prompts.hpp"

#include "util.hpp"

namespace datacure {

PromptSet PromptSet::defaults() {
    PromptSet p;
    p.system = "You are a careful domain expert. Answer the task faithfully.";
    p.task =
        "Question:\n{query}\n\n"
        "Respond with only the final answer, nothing else.";
    p.reasoning =
        "Question:\n{query}\n\n"
        "{reflection_block}"
        "Work through the question step by step, then give your final answer "
        "on its own line, formatted exactly as:\nAnswer: <your answer>";
    p.reflection =
        "Question:\n{query}\n\n"
        "Proposed reasoning:\n{reasoning}\n\n"
        "Critique the reasoning above. Point out a concrete flaw if one "
        "exists, otherwise confirm it. Reply in at most three sentences.";
    p.context =
        "Here are solved examples of the task:\n\n{exemplars}"
        "Question:\n{query}\n\n"
        "Respond with only the final answer, nothing else.";
    p.review =
        "Question:\n{query}\n\n"
        "Candidate A: {candidate_a}\n"
        "Candidate B: {candidate_b}\n\n"
        "Decide which candidate answers the question correctly, or give the "
        "correct answer if both are wrong. Reply on a single line formatted "
        "exactly as:\nAnswer: <your answer>";
    p.confidence =
        "Here are solved examples of the task:\n\n{exemplars}"
        "Question:\n{query}\n\n"
        "Proposed answer: {answer}\n\n"
        "How confident are you that the proposed answer is correct? Reply "
        "with only a number between 0 and 1.";
    return p;
}

std::string system_prompt(const PromptSet& p, TaskKind kind) {
    switch (kind) {
        case TaskKind::MultipleChoice:
            return p.system + " The task is multiple choice; the answer is one option identifier.";
        case TaskKind::ShortAnswer:
            return p.system + " The task expects a short answer.";
        case TaskKind::FreeText:
            return p.system;
    }
    return p.system;
}

std::string render_task(const PromptSet& p, const std::string& query) {
    return render_template(p.task, {{"query", query}});
}

std::string render_reasoning(const PromptSet& p, const std::string& query,
                             const std::string& prior_reflection) {
    std::string block;
    if (!prior_reflection.empty())
        block = "A previous review of your reasoning said:\n" + prior_reflection + "\n\n";
    return render_template(p.reasoning, {{"query", query}, {"reflection_block", block}});
}

std::string render_reflection(const PromptSet& p, const std::string& query,
                              const std::string& reasoning) {
    return render_template(p.reflection, {{"query", query}, {"reasoning", reasoning}});
}

static std::string exemplar_block(
    const std::vector<std::pair<std::string, std::string>>& exemplars) {
    std::string block;
    for (const auto& [q, a] : exemplars) {
        block += "Q: " + q + "\nA: " + a + "\n\n";
    }
    return block;
}

std::string render_context(const PromptSet& p,
                           const std::vector<std::pair<std::string, std::string>>& exemplars,
                           const std::string& query) {
    return render_template(p.context, {{"exemplars", exemplar_block(exemplars)}, {"query", query}});
}

std::string render_review(const PromptSet& p, const std::string& query,
                          const std::string& candidate_a, const std::string& candidate_b) {
    return render_template(
        p.review, {{"query", query}, {"candidate_a", candidate_a}, {"candidate_b", candidate_b}});
}

std::string render_confidence(const PromptSet& p,
                              const std::vector<std::pair<std::string, std::string>>& exemplars,
                              const std::string& query, const std::string& answer) {
    return render_template(p.confidence, {{"exemplars", exemplar_block(exemplars)},
                                          {"query", query},
                                          {"answer", answer}});
}

ParsedAnswer parse_marked_answer(const std::string& completion_text) {
    // Last occurrence wins: reasoning chains may mention "answer:" mid-stream.
    const std::string lower = to_lower(completion_text);
    const std::string marker = "answer:";
    std::size_t pos = lower.rfind(marker);
    if (pos == std::string::npos) return {"", false};
    std::string tail = completion_text.substr(pos + marker.size());
    std::size_t eol = tail.find('\n');
    if (eol != std::string::npos) tail = tail.substr(0, eol);
    std::string raw{trim_view(tail)};
    if (raw.empty()) return {"", false};
    return {raw, true};
}

}  // namespace datacure
