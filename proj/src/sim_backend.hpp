#ifndef DATACURE_SIM_BACKEND_HPP
#define DATACURE_SIM_BACKEND_HPP

#include <cstdint>
#include <string>

#include "backend.hpp"

namespace datacure {

// Deterministic backend for tests and the evaluation harness. A pure function
// of (seed, request): no state, no I/O.
//
// Requests carrying an OracleHint answer correctly with probability
// `oracle_accuracy`, decided by a seeded hash of (sample id, expert role);
// otherwise they return a deterministic wrong distractor drawn uniformly from
// the hint's non-ground-truth options. Context completions requested with
// logprobs emit one per-sample entropy value e applied to every token:
// e ~ U[0, 0.2) when the answer is correct, e ~ U[0.8, 1.8) when wrong.
// Confidence elicitations (prompts carrying a "Proposed answer:" line) reply
// with a number in [0.7, 0.95] when the proposed answer equals the ground
// truth and [0.05, 0.3] otherwise. Review prompts are answered by picking the
// ground truth among the listed candidates with probability
// `oracle_accuracy` (hint present); without a hint the reviewer echoes
// candidate A. These rules are what tests/oracle_sim.hpp models.
//
// The review and confidence behaviors parse the default prompt templates'
// "Candidate A:"/"Candidate B:"/"Proposed answer:" markers; template
// overrides must keep those markers for simulated runs.
struct SimBackendConfig {
    std::uint64_t seed = 0;
    double oracle_accuracy = 1.0;
    bool logprobs = true;
    int embedding_dim = 64;
    std::string model_name = "sim-model";
    std::string embedding_model_name = "sim-embed";
};

class SimulatedBackend : public Backend {
public:
    explicit SimulatedBackend(SimBackendConfig config);

    Prediction complete(const CompletionRequest& req) override;
    EmbeddingVector embed(const std::string& text) override;
    bool supports_logprobs() const override { return config_.logprobs; }
    std::string model_id(ExpertRole role) const override;
    std::string embedding_model_id() const override { return config_.embedding_model_name; }

private:
    bool draw_correct(const std::string& sample_id, ExpertRole role) const;
    std::string answer_for(const OracleHint& hint, ExpertRole role) const;
    std::string wrong_answer(const OracleHint& hint, ExpertRole role) const;

    SimBackendConfig config_;
};

}  // namespace datacure

#endif
