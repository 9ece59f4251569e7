#include "denoise.hpp"

#include <algorithm>

#include "util.hpp"

namespace datacure {

std::string to_string(ReviewResolution r) {
    switch (r) {
        case ReviewResolution::Resolved: return "resolved";
        case ReviewResolution::Fallback: return "fallback";
        case ReviewResolution::Unresolvable: return "unresolvable";
    }
    return "unresolvable";
}

Prediction context_predict(const Sample& sample,
                           const std::vector<std::pair<std::string, std::string>>& exemplars,
                           Backend& backend, const DenoiseConfig& config, TaskKind kind,
                           const std::vector<std::string>& options) {
    if (exemplars.empty()) throw PreconditionError("context_predict requires exemplars");
    CompletionRequest req;
    req.system_prompt = system_prompt(config.prompts, kind);
    req.user_prompt = render_context(config.prompts, exemplars, sample.query);
    req.temperature = 0.0;
    req.max_tokens = config.max_tokens;
    req.want_logprobs = true;  // feeds the entropy score
    req.role = ExpertRole::Context;
    req.hint = make_hint(sample, options);
    return backend.complete(req);
}

ReviewOutcome review(const Sample& sample, const AnswerCandidate& cont,
                     const AnswerCandidate& reas, Backend& backend, const DenoiseConfig& config,
                     TaskKind kind, const std::vector<std::string>& options) {
    ReviewOutcome out;
    if (cont.parseable && reas.parseable && cont.normalized == reas.normalized) {
        out.label = cont.raw;
        out.resolution = ReviewResolution::Resolved;
        out.fast_path = true;
        return out;
    }
    if (cont.parseable != reas.parseable) {
        // Only one valid candidate; nothing to synthesize.
        out.label = cont.parseable ? cont.raw : reas.raw;
        out.resolution = ReviewResolution::Resolved;
        return out;
    }
    if (!cont.parseable && !reas.parseable) {
        out.resolution = ReviewResolution::Unresolvable;
        return out;
    }

    CompletionRequest req;
    req.system_prompt = system_prompt(config.prompts, kind);
    req.user_prompt = render_review(config.prompts, sample.query, cont.raw, reas.raw);
    req.temperature = 0.0;
    req.max_tokens = config.max_tokens;
    req.role = ExpertRole::Review;
    req.hint = make_hint(sample, options);
    Prediction verdict = backend.complete(req);
    out.raw = verdict.text;

    ParsedAnswer parsed = parse_marked_answer(verdict.text);
    if (parsed.parseable && !normalize_answer(parsed.raw, kind).empty()) {
        out.label = parsed.raw;
        out.resolution = ReviewResolution::Resolved;
    } else {
        // Unusable review output: prefer the context-enhanced answer.
        out.label = cont.raw;
        out.resolution = ReviewResolution::Fallback;
    }
    return out;
}

DenoiseResult denoise(const Dataset& noisy, const Dataset& clean, const EmbeddingIndex& index,
                      const std::map<std::string, DetectionRecord>& detection_records,
                      Backend& backend, const DenoiseConfig& config,
                      const std::vector<std::string>& options) {
    DenoiseResult result;
    result.relabeled.task_kind = noisy.task_kind;
    if (noisy.empty()) return result;
    if (clean.empty())
        throw PreconditionError("denoise requires a non-empty clean set for retrieval");
    if (config.k < 1) throw ConfigError("k must be >= 1");

    std::vector<DenoiseRecord> records(noisy.size());
    parallel_for(noisy.size(), config.concurrency, [&](std::size_t i) {
        const Sample& sample = noisy.samples[i];
        DenoiseRecord rec;
        rec.sample_id = sample.id;
        auto det_it = detection_records.find(sample.id);
        if (det_it != detection_records.end()) rec.reas_answer = det_it->second.reas_answer;

        try {
            const EmbeddingVector query_vec = backend.embed(sample.query);
            const auto neighbors = knn(index, query_vec, static_cast<std::size_t>(config.k));
            std::vector<std::pair<std::string, std::string>> exemplars;
            for (const auto& [id, sim] : neighbors) {
                rec.context_ids.push_back(id);
                const Sample* ex = clean.find(id);
                if (ex) exemplars.emplace_back(ex->query, ex->label);
            }

            rec.cont_pred =
                context_predict(sample, exemplars, backend, config, noisy.task_kind, options);
            rec.cont_answer = {rec.cont_pred.text,
                               normalize_answer(rec.cont_pred.text, noisy.task_kind),
                               !normalize_answer(rec.cont_pred.text, noisy.task_kind).empty()};

            ReviewOutcome outcome = review(sample, rec.cont_answer, rec.reas_answer, backend,
                                           config, noisy.task_kind, options);
            rec.reviewed_label = outcome.label;
            rec.review_raw = outcome.raw;
            rec.resolution = outcome.resolution;
            rec.fast_path = outcome.fast_path;
        } catch (const BackendError& e) {
            if (e.retryable) throw;
            rec.resolution = ReviewResolution::Unresolvable;
            rec.error_note = e.what();
        }
        records[i] = std::move(rec);
    });

    for (std::size_t i = 0; i < noisy.size(); ++i) {
        DenoiseRecord& rec = records[i];
        if (rec.resolution != ReviewResolution::Unresolvable && !rec.reviewed_label.empty()) {
            Sample relabeled = noisy.samples[i];
            relabeled.label = rec.reviewed_label;
            relabeled.tags.erase(kTagOriginal);
            relabeled.tags.insert(kTagRelabeled);
            result.relabeled.samples.push_back(std::move(relabeled));
        }
        result.records.emplace(rec.sample_id, std::move(rec));
    }
    return result;
}

}  // namespace datacure
