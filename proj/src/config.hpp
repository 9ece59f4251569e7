#ifndef DATACURE_CONFIG_HPP
#define DATACURE_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "detect.hpp"
#include "harness.hpp"
#include "json.hpp"
#include "prompts.hpp"

namespace datacure {

enum class BackendKind { Simulated, Http };

struct BackendSettings {
    BackendKind kind = BackendKind::Simulated;
    // simulated
    std::uint64_t seed = 0;
    double oracle_accuracy = 1.0;
    bool logprobs = true;
    int embedding_dim = 64;
    // http
    std::string base_url;
    std::string api_key_env = "DATACURE_API_KEY";
    std::map<std::string, std::string> models = {{"default", "gpt-4o-mini"}};
    std::string embedding_model = "text-embedding-3-small";
    int timeout_ms = 60000;
    int retry_max_attempts = 3;
    int retry_base_delay_ms = 250;
};

struct EvalGates {
    bool residual_below_injected = false;
    double min_detection_precision = -1.0;  // < 0 disables
    double min_detection_recall = -1.0;
};

// Whole-run configuration: one declarative file, env-interpolated secrets,
// flag overrides on top.
struct PipelineConfig {
    TaskKind task_kind = TaskKind::MultipleChoice;
    int k = 3;
    double beta = 0.5;
    int reflection_iterations = 2;
    CheckerPolicy checker_policy = CheckerPolicy::AnyMatch;
    int concurrency = 8;
    int max_tokens = 512;
    std::uint64_t seed = 0;
    std::string cache_dir;
    std::vector<std::string> options = {"a", "b", "c", "d"};
    BackendSettings backend;
    PromptSet prompts = PromptSet::defaults();
    // eval-only knobs
    NoiseModel noise_model = NoiseModel::UniformFlip;
    std::vector<double> eval_betas;  // empty = use beta
    EvalGates gates;

    void validate() const;
};

PipelineConfig load_config(const std::string& path);
PipelineConfig parse_config(const nlohmann::json& j);

// Dotted-key string override ("beta", "backend.oracle_accuracy", ...), used
// by CLI flags and the C API. Unknown keys and unparseable values raise.
void apply_override(PipelineConfig& config, const std::string& key, const std::string& value);

// Effective config as JSON for report audit trails (secrets stay out: only
// the env-var name is recorded).
nlohmann::ordered_json config_to_json(const PipelineConfig& config);

}  // namespace datacure

#endif
