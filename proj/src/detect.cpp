#include "detect.hpp"

#include "util.hpp"

namespace datacure {

CheckerPolicy checker_policy_from_string(const std::string& s) {
    if (s == "any-match") return CheckerPolicy::AnyMatch;
    if (s == "both-match") return CheckerPolicy::BothMatch;
    throw ConfigError("unknown checker_policy '" + s + "' (expected any-match or both-match)");
}

std::string to_string(CheckerPolicy policy) {
    return policy == CheckerPolicy::AnyMatch ? "any-match" : "both-match";
}

std::optional<OracleHint> make_hint(const Sample& sample,
                                    const std::vector<std::string>& options) {
    if (!sample.ground_truth) return std::nullopt;
    return OracleHint{sample.id, *sample.ground_truth, options};
}

static AnswerCandidate candidate_from_text(const std::string& raw, TaskKind kind) {
    AnswerCandidate c;
    c.raw = raw;
    c.normalized = normalize_answer(raw, kind);
    c.parseable = !c.normalized.empty();
    return c;
}

static AnswerCandidate candidate_from_marked(const Prediction& pred, TaskKind kind) {
    ParsedAnswer parsed = parse_marked_answer(pred.text);
    if (!parsed.parseable) return {pred.text, "", false};
    return candidate_from_text(parsed.raw, kind);
}

Prediction base_predict(const Sample& sample, Backend& backend, const DetectConfig& config,
                        TaskKind kind, const std::vector<std::string>& options) {
    CompletionRequest req;
    req.system_prompt = system_prompt(config.prompts, kind);
    req.user_prompt = render_task(config.prompts, sample.query);
    req.temperature = 0.0;
    req.max_tokens = config.max_tokens;
    req.role = ExpertRole::Base;
    req.hint = make_hint(sample, options);
    return backend.complete(req);
}

ReasoningResult reasoning_predict(const Sample& sample, Backend& backend,
                                  const DetectConfig& config, TaskKind kind,
                                  const std::vector<std::string>& options) {
    if (config.reflection_iterations < 1)
        throw PreconditionError("reflection_iterations must be >= 1");

    ReasoningResult result;
    const std::string sys = system_prompt(config.prompts, kind);
    const auto hint = make_hint(sample, options);
    std::string prior_reflection;
    Prediction reasoning;

    for (int round = 0; round < config.reflection_iterations; ++round) {
        CompletionRequest reas_req;
        reas_req.system_prompt = sys;
        reas_req.user_prompt = render_reasoning(config.prompts, sample.query, prior_reflection);
        reas_req.max_tokens = config.max_tokens;
        reas_req.role = ExpertRole::Reasoning;
        reas_req.hint = hint;
        reasoning = backend.complete(reas_req);

        CompletionRequest refl_req;
        refl_req.system_prompt = sys;
        refl_req.user_prompt = render_reflection(config.prompts, sample.query, reasoning.text);
        refl_req.max_tokens = config.max_tokens;
        refl_req.role = ExpertRole::Reflection;
        refl_req.hint = hint;
        Prediction reflection = backend.complete(refl_req);

        result.trace.emplace_back(reasoning.text, reflection.text);
        prior_reflection = reflection.text;
    }

    result.final_pred = reasoning;
    result.answer = candidate_from_marked(reasoning, kind);
    return result;
}

int check_consistency(const std::string& label, const AnswerCandidate& base,
                      const AnswerCandidate& reas, TaskKind kind, CheckerPolicy policy) {
    const std::string label_norm = normalize_answer(label, kind);
    const bool base_ok = base.parseable && base.normalized == label_norm;
    const bool reas_ok = reas.parseable && reas.normalized == label_norm;
    if (policy == CheckerPolicy::BothMatch) return (base_ok && reas_ok) ? 1 : 0;
    return (base_ok || reas_ok) ? 1 : 0;
}

Partition detect(const Dataset& dataset, Backend& backend, const DetectConfig& config,
                 const std::vector<std::string>& options) {
    if (dataset.empty()) throw PreconditionError("detect requires a non-empty dataset");
    if (config.reflection_iterations < 1 || config.reflection_iterations > 4)
        throw ConfigError("reflection_iterations must be in [1, 4]");

    std::vector<DetectionRecord> records(dataset.size());
    parallel_for(dataset.size(), config.concurrency, [&](std::size_t i) {
        const Sample& sample = dataset.samples[i];
        DetectionRecord rec;
        rec.sample_id = sample.id;
        try {
            rec.base_pred = base_predict(sample, backend, config, dataset.task_kind, options);
            rec.base_answer = candidate_from_text(rec.base_pred.text, dataset.task_kind);
            ReasoningResult reas =
                reasoning_predict(sample, backend, config, dataset.task_kind, options);
            rec.reas_pred = reas.final_pred;
            rec.reas_answer = reas.answer;
            rec.reflection_trace = std::move(reas.trace);
            rec.verdict = check_consistency(sample.label, rec.base_answer, rec.reas_answer,
                                            dataset.task_kind, config.policy);
        } catch (const BackendError& e) {
            if (e.retryable) throw;  // outage, not a per-sample failure
            // Conservative routing: an unverifiable label goes to the noisy side.
            rec.verdict = 0;
            rec.error_note = e.what();
        }
        records[i] = std::move(rec);
    });

    Partition part;
    part.clean.task_kind = dataset.task_kind;
    part.noisy.task_kind = dataset.task_kind;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const Sample& sample = dataset.samples[i];
        if (records[i].verdict == 1)
            part.clean.samples.push_back(sample);
        else
            part.noisy.samples.push_back(sample);
        part.records.emplace(sample.id, std::move(records[i]));
    }
    return part;
}

}  // namespace datacure
