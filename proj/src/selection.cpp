#include "selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "prompts.hpp"
#include "util.hpp"

namespace datacure {

double entropy_score(const Prediction& pred) {
    if (!pred.token_logprobs || pred.token_logprobs->empty())
        throw PreconditionError("entropy_score requires token logprobs");
    double sum = 0.0;
    for (const auto& t : *pred.token_logprobs) sum += t.logprob;
    return -sum / static_cast<double>(pred.token_logprobs->size());
}

ScoredSample score_relabeled(const Sample& sample, const DenoiseRecord& record, Backend& backend,
                             const DenoiseConfig& config, TaskKind kind,
                             const std::vector<std::pair<std::string, std::string>>& exemplars) {
    ScoredSample scored;
    scored.sample = sample;
    if (record.cont_pred.token_logprobs && !record.cont_pred.token_logprobs->empty()) {
        scored.entropy = entropy_score(record.cont_pred);
        scored.token_count = static_cast<int>(record.cont_pred.token_logprobs->size());
        return scored;
    }

    // Logprob-less backend: elicit a confidence for the context answer and
    // rank by -ln(confidence). Unusable replies rank last.
    scored.entropy = std::numeric_limits<double>::infinity();
    try {
        CompletionRequest req;
        req.system_prompt = system_prompt(config.prompts, kind);
        req.user_prompt =
            render_confidence(config.prompts, exemplars, sample.query, record.cont_answer.raw);
        req.temperature = 0.0;
        req.max_tokens = 16;
        req.role = ExpertRole::Context;
        req.hint = make_hint(sample, {});
        Prediction reply = backend.complete(req);
        const std::string text{trim_view(reply.text)};
        std::size_t consumed = 0;
        double confidence = std::stod(text, &consumed);
        if (consumed > 0 && confidence >= 0.0 && confidence <= 1.0)
            scored.entropy = -std::log(std::max(confidence, 1e-9));
    } catch (const std::exception&) {
        // keep +inf
    }
    return scored;
}

std::size_t selection_count(std::size_t n, double beta) {
    if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("beta must be in (0, 1]");
    if (n == 0) return 0;
    // Guard against float dust pushing an exact multiple over the ceiling.
    const double raw = beta * static_cast<double>(n);
    auto count = static_cast<std::size_t>(std::ceil(raw - 1e-9));
    return std::min(std::max<std::size_t>(count, 1), n);
}

Dataset select_samples(const std::vector<ScoredSample>& scored, double beta, TaskKind kind) {
    if (scored.empty()) throw PreconditionError("select requires a non-empty scored list");
    const std::size_t keep = selection_count(scored.size(), beta);

    std::vector<std::size_t> order(scored.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scored[a].entropy != scored[b].entropy) return scored[a].entropy < scored[b].entropy;
        return scored[a].sample.id < scored[b].sample.id;
    });

    std::set<std::size_t> kept(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep));
    Dataset out;
    out.task_kind = kind;
    for (std::size_t i = 0; i < scored.size(); ++i)
        if (kept.count(i)) out.samples.push_back(scored[i].sample);
    return out;
}

Dataset assemble_ft(const Dataset& clean, const Dataset& selected) {
    std::set<std::string> clean_ids;
    for (const auto& s : clean.samples) clean_ids.insert(s.id);
    for (const auto& s : selected.samples)
        if (clean_ids.count(s.id))
            throw PreconditionError("assemble_ft: id '" + s.id +
                                    "' appears in both clean and selected sets");
    Dataset out;
    out.task_kind = clean.task_kind;
    out.samples = clean.samples;
    out.samples.insert(out.samples.end(), selected.samples.begin(), selected.samples.end());
    return out;
}

}  // namespace datacure
