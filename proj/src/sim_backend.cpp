#include "sim_backend.hpp"

#include <cstdio>

#include "util.hpp"

namespace datacure {

namespace {

// Case-insensitive scan for "<marker> <value-to-eol>".
std::string parse_prompt_line(const std::string& prompt, const std::string& marker) {
    const std::string lower = to_lower(prompt);
    const std::string lmarker = to_lower(marker);
    std::size_t pos = lower.find(lmarker);
    if (pos == std::string::npos) return "";
    std::string tail = prompt.substr(pos + marker.size());
    std::size_t eol = tail.find('\n');
    if (eol != std::string::npos) tail = tail.substr(0, eol);
    return std::string(trim_view(tail));
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

bool equal_ci_trimmed(const std::string& a, const std::string& b) {
    return to_lower(trim_view(a)) == to_lower(trim_view(b));
}

}  // namespace

SimulatedBackend::SimulatedBackend(SimBackendConfig config) : config_(std::move(config)) {
    if (config_.oracle_accuracy < 0.0 || config_.oracle_accuracy > 1.0)
        throw ConfigError("oracle_accuracy must be in [0, 1]");
    if (config_.embedding_dim < 1) throw ConfigError("embedding_dim must be >= 1");
}

std::string SimulatedBackend::model_id(ExpertRole role) const {
    (void)role;
    return config_.model_name;
}

bool SimulatedBackend::draw_correct(const std::string& sample_id, ExpertRole role) const {
    return hash01({"sim-correct", sample_id, to_string(role)}, config_.seed) <
           config_.oracle_accuracy;
}

std::string SimulatedBackend::wrong_answer(const OracleHint& hint, ExpertRole role) const {
    std::vector<std::string> distractors;
    for (const auto& o : hint.options)
        if (o != hint.ground_truth) distractors.push_back(o);
    if (!distractors.empty()) {
        const double u = hash01({"sim-pick", hint.sample_id, to_string(role)}, config_.seed);
        auto idx = static_cast<std::size_t>(u * static_cast<double>(distractors.size()));
        if (idx >= distractors.size()) idx = distractors.size() - 1;
        return distractors[idx];
    }
    std::string d = "distractor-" +
                    to_hex(stable_hash({hint.sample_id, to_string(role)}, config_.seed), 8);
    if (equal_ci_trimmed(d, hint.ground_truth)) d += "x";
    return d;
}

std::string SimulatedBackend::answer_for(const OracleHint& hint, ExpertRole role) const {
    return draw_correct(hint.sample_id, role) ? hint.ground_truth : wrong_answer(hint, role);
}

Prediction SimulatedBackend::complete(const CompletionRequest& req) {
    Prediction pred;
    pred.expert = req.role;
    pred.request_fingerprint = request_fingerprint(req, model_id(req.role));

    const std::string prompt_tag =
        to_hex(stable_hash({req.system_prompt, req.user_prompt, to_string(req.role)},
                           config_.seed), 8);

    // Confidence elicitation: grade the proposed answer against the hint.
    const std::string proposed = parse_prompt_line(req.user_prompt, "Proposed answer:");
    if (!proposed.empty()) {
        const double u = hash01({"sim-conf", req.user_prompt}, config_.seed);
        const bool right = req.hint && equal_ci_trimmed(proposed, req.hint->ground_truth);
        pred.text = format_number(right ? 0.70 + 0.25 * u : 0.05 + 0.25 * u);
        return pred;
    }

    if (req.role == ExpertRole::Review) {
        const std::string cand_a = parse_prompt_line(req.user_prompt, "Candidate A:");
        const std::string cand_b = parse_prompt_line(req.user_prompt, "Candidate B:");
        std::string verdict = cand_a;
        if (req.hint && !req.hint->ground_truth.empty()) {
            const std::string& gt = req.hint->ground_truth;
            const bool a_right = equal_ci_trimmed(cand_a, gt);
            const bool b_right = equal_ci_trimmed(cand_b, gt);
            if (a_right || b_right) {
                verdict = draw_correct(req.hint->sample_id, ExpertRole::Review)
                              ? gt
                              : (a_right ? cand_b : cand_a);
            }
        }
        pred.text = "Answer: " + verdict;
        return pred;
    }

    std::string answer;
    if (req.hint && !req.hint->ground_truth.empty()) {
        answer = answer_for(*req.hint, req.role);
    } else {
        answer = "response-" + prompt_tag;
    }

    switch (req.role) {
        case ExpertRole::Reasoning:
            pred.text = "Working through the question step by step. Assessment trace " +
                        prompt_tag + ".\nAnswer: " + answer;
            break;
        case ExpertRole::Reflection:
            pred.text = "Reflection " + prompt_tag +
                        ": checked the reasoning chain against the question; the stated "
                        "conclusion is consistent with the premises.";
            break;
        default:
            pred.text = answer;
            break;
    }

    if (req.want_logprobs && config_.logprobs) {
        std::vector<TokenLogprob> tokens;
        double entropy;
        if (req.hint && !req.hint->ground_truth.empty()) {
            const bool correct = draw_correct(req.hint->sample_id, req.role);
            const double u = hash01({"sim-entropy", req.hint->sample_id, to_string(req.role)},
                                    config_.seed);
            entropy = correct ? 0.2 * u : 0.8 + u;
        } else {
            entropy = hash01({"sim-entropy-free", req.user_prompt}, config_.seed);
        }
        const auto count =
            3 + stable_hash({"sim-ntok", req.user_prompt}, config_.seed) % 5;
        for (std::uint64_t i = 0; i < count; ++i) {
            tokens.push_back({i == 0 ? pred.text : "<t" + std::to_string(i) + ">", -entropy});
        }
        pred.token_logprobs = std::move(tokens);
    }
    return pred;
}

EmbeddingVector SimulatedBackend::embed(const std::string& text) {
    if (trim_view(text).empty()) throw PreconditionError("cannot embed empty text");
    // Seeded feature hashing of character trigrams, signed, L2-normalized.
    const int dim = config_.embedding_dim;
    std::vector<double> values(static_cast<std::size_t>(dim), 0.0);
    const std::string padded = "^" + to_lower(collapse_whitespace(text)) + "$";
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
        const std::string_view gram(padded.data() + i, 3);
        const std::uint64_t h = stable_hash({"sim-gram", gram}, config_.seed);
        const auto bucket = static_cast<std::size_t>(h % static_cast<std::uint64_t>(dim));
        values[bucket] += (h >> 63) ? 1.0 : -1.0;
    }
    double sq = 0.0;
    for (double v : values) sq += v * v;
    if (sq == 0.0) values[0] = 1.0;  // single-char texts hash to nothing
    EmbeddingVector vec = EmbeddingVector::from_values(std::move(values));
    for (double& v : vec.values) v /= vec.norm;
    vec.norm = 1.0;
    return vec;
}

}  // namespace datacure
