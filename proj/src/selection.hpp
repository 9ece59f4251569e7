#ifndef DATACURE_SELECTION_HPP
#define DATACURE_SELECTION_HPP

#include <map>
#include <string>
#include <vector>

#include "backend.hpp"
#include "corpus.hpp"
#include "denoise.hpp"

namespace datacure {

struct ScoredSample {
    Sample sample;  // relabeled
    double entropy = 0.0;
    int token_count = 0;  // 0 on the confidence-elicitation fallback path
};

// Mean negative token log-probability of the response (low = confident).
// Requires non-empty token logprobs; the caller applies the fallback policy.
double entropy_score(const Prediction& pred);

// Scores one relabeled sample. Uses the context prediction's logprobs when
// present; otherwise re-asks the backend for a confidence in [0,1] and maps
// it to -ln(confidence). Samples without any parseable score rank last.
ScoredSample score_relabeled(const Sample& sample, const DenoiseRecord& record, Backend& backend,
                             const DenoiseConfig& config, TaskKind kind,
                             const std::vector<std::pair<std::string, std::string>>& exemplars);

// Keeps the ceil(beta * n) lowest-entropy samples, ties broken by ascending
// sample id; output preserves the input (dataset) order.
Dataset select_samples(const std::vector<ScoredSample>& scored, double beta, TaskKind kind);

// Exact count the selection keeps for n scored samples.
std::size_t selection_count(std::size_t n, double beta);

// Final fine-tuning set: clean samples first, then selected relabels.
// Overlapping ids indicate a pipeline bug and raise.
Dataset assemble_ft(const Dataset& clean, const Dataset& selected);

}  // namespace datacure

#endif
