#include "config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "util.hpp"

namespace datacure {

using nlohmann::json;

namespace {

// ${VAR} interpolation in string values, for secrets and endpoints.
std::string interpolate_env(const std::string& s) {
    std::string out;
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] == '$' && i + 1 < s.size() && s[i + 1] == '{') {
            std::size_t close = s.find('}', i + 2);
            if (close != std::string::npos) {
                const std::string name = s.substr(i + 2, close - i - 2);
                const char* value = std::getenv(name.c_str());
                if (value) out += value;
                i = close + 1;
                continue;
            }
        }
        out.push_back(s[i]);
        ++i;
    }
    return out;
}

void interpolate_tree(json& j) {
    if (j.is_string()) {
        j = interpolate_env(j.get<std::string>());
    } else if (j.is_object() || j.is_array()) {
        for (auto& child : j) interpolate_tree(child);
    }
}

double parse_double(const std::string& value, const std::string& key) {
    try {
        std::size_t consumed = 0;
        double v = std::stod(value, &consumed);
        if (consumed != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse '" + value + "' as a number for " + key);
    }
}

long parse_long(const std::string& value, const std::string& key) {
    try {
        std::size_t consumed = 0;
        long v = std::stol(value, &consumed);
        if (consumed != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse '" + value + "' as an integer for " + key);
    }
}

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("cannot parse '" + value + "' as a boolean for " + key);
}

}  // namespace

void PipelineConfig::validate() const {
    if (k < 1) throw ConfigError("k must be >= 1");
    if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("beta must be in (0, 1]");
    if (reflection_iterations < 1 || reflection_iterations > 4)
        throw ConfigError("reflection_iterations must be in [1, 4]");
    if (concurrency < 1) throw ConfigError("concurrency must be >= 1");
    if (max_tokens < 1) throw ConfigError("max_tokens must be >= 1");
    if (backend.kind == BackendKind::Simulated) {
        if (backend.oracle_accuracy < 0.0 || backend.oracle_accuracy > 1.0)
            throw ConfigError("backend.oracle_accuracy must be in [0, 1]");
        if (backend.embedding_dim < 1) throw ConfigError("backend.embedding_dim must be >= 1");
    } else if (backend.base_url.empty()) {
        throw ConfigError("http backend requires backend.base_url");
    }
    if (backend.retry_max_attempts < 1) throw ConfigError("retry.max_attempts must be >= 1");
    for (double b : eval_betas)
        if (!(b > 0.0 && b <= 1.0)) throw ConfigError("eval_betas entries must be in (0, 1]");
}

PipelineConfig parse_config(const json& raw) {
    json j = raw;
    interpolate_tree(j);
    if (!j.is_object()) throw ConfigError("config root must be an object");

    PipelineConfig c;
    if (j.contains("task_kind")) c.task_kind = task_kind_from_string(j["task_kind"]);
    if (j.contains("k")) c.k = j["k"].get<int>();
    if (j.contains("beta")) c.beta = j["beta"].get<double>();
    if (j.contains("reflection_iterations"))
        c.reflection_iterations = j["reflection_iterations"].get<int>();
    if (j.contains("checker_policy"))
        c.checker_policy = checker_policy_from_string(j["checker_policy"]);
    if (j.contains("concurrency")) c.concurrency = j["concurrency"].get<int>();
    if (j.contains("max_tokens")) c.max_tokens = j["max_tokens"].get<int>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("cache_dir")) c.cache_dir = j["cache_dir"].get<std::string>();
    if (j.contains("options")) {
        c.options.clear();
        for (const auto& o : j["options"]) c.options.push_back(o.get<std::string>());
    }
    if (j.contains("noise_model")) c.noise_model = noise_model_from_string(j["noise_model"]);
    if (j.contains("eval_betas")) {
        c.eval_betas.clear();
        for (const auto& b : j["eval_betas"]) c.eval_betas.push_back(b.get<double>());
    }

    if (j.contains("backend")) {
        const json& b = j["backend"];
        if (b.contains("kind")) {
            const std::string kind = b["kind"].get<std::string>();
            if (kind == "simulated") c.backend.kind = BackendKind::Simulated;
            else if (kind == "http") c.backend.kind = BackendKind::Http;
            else throw ConfigError("backend.kind must be 'simulated' or 'http'");
        }
        if (b.contains("seed")) c.backend.seed = b["seed"].get<std::uint64_t>();
        else if (j.contains("seed")) c.backend.seed = c.seed;
        if (b.contains("oracle_accuracy"))
            c.backend.oracle_accuracy = b["oracle_accuracy"].get<double>();
        if (b.contains("logprobs")) c.backend.logprobs = b["logprobs"].get<bool>();
        if (b.contains("embedding_dim")) c.backend.embedding_dim = b["embedding_dim"].get<int>();
        if (b.contains("base_url")) c.backend.base_url = b["base_url"].get<std::string>();
        if (b.contains("api_key_env")) c.backend.api_key_env = b["api_key_env"].get<std::string>();
        if (b.contains("embedding_model"))
            c.backend.embedding_model = b["embedding_model"].get<std::string>();
        if (b.contains("timeout_ms")) c.backend.timeout_ms = b["timeout_ms"].get<int>();
        if (b.contains("models")) {
            for (auto it = b["models"].begin(); it != b["models"].end(); ++it)
                c.backend.models[it.key()] = it.value().get<std::string>();
        }
        if (b.contains("retry")) {
            const json& r = b["retry"];
            if (r.contains("max_attempts"))
                c.backend.retry_max_attempts = r["max_attempts"].get<int>();
            if (r.contains("base_delay_ms"))
                c.backend.retry_base_delay_ms = r["base_delay_ms"].get<int>();
        }
    } else if (j.contains("seed")) {
        c.backend.seed = c.seed;
    }

    if (j.contains("prompts")) {
        const json& p = j["prompts"];
        auto get = [&](const char* name, std::string& slot) {
            if (p.contains(name)) slot = p[name].get<std::string>();
        };
        get("system", c.prompts.system);
        get("task", c.prompts.task);
        get("reasoning", c.prompts.reasoning);
        get("reflection", c.prompts.reflection);
        get("context", c.prompts.context);
        get("review", c.prompts.review);
        get("confidence", c.prompts.confidence);
    }

    if (j.contains("gates")) {
        const json& g = j["gates"];
        if (g.contains("residual_below_injected"))
            c.gates.residual_below_injected = g["residual_below_injected"].get<bool>();
        if (g.contains("min_detection_precision"))
            c.gates.min_detection_precision = g["min_detection_precision"].get<double>();
        if (g.contains("min_detection_recall"))
            c.gates.min_detection_recall = g["min_detection_recall"].get<double>();
    }
    return c;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    json j = json::parse(buf.str(), nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw ParseError("config file is not valid JSON: " + path);
    return parse_config(j);
}

void apply_override(PipelineConfig& c, const std::string& key, const std::string& value) {
    if (key == "task_kind") c.task_kind = task_kind_from_string(value);
    else if (key == "k") c.k = static_cast<int>(parse_long(value, key));
    else if (key == "beta") c.beta = parse_double(value, key);
    else if (key == "reflection_iterations")
        c.reflection_iterations = static_cast<int>(parse_long(value, key));
    else if (key == "checker_policy") c.checker_policy = checker_policy_from_string(value);
    else if (key == "concurrency") c.concurrency = static_cast<int>(parse_long(value, key));
    else if (key == "max_tokens") c.max_tokens = static_cast<int>(parse_long(value, key));
    else if (key == "seed") {
        c.seed = static_cast<std::uint64_t>(parse_long(value, key));
        c.backend.seed = c.seed;
    } else if (key == "cache_dir") c.cache_dir = value;
    else if (key == "noise_model") c.noise_model = noise_model_from_string(value);
    else if (key == "options") {
        c.options = split(value, ',');
        if (c.options.empty()) throw ConfigError("options override is empty");
    } else if (key == "eval_betas") {
        c.eval_betas.clear();
        for (const auto& part : split(value, ','))
            c.eval_betas.push_back(parse_double(part, key));
    } else if (key == "backend.kind") {
        if (value == "simulated") c.backend.kind = BackendKind::Simulated;
        else if (value == "http") c.backend.kind = BackendKind::Http;
        else throw ConfigError("backend.kind must be 'simulated' or 'http'");
    } else if (key == "backend.seed")
        c.backend.seed = static_cast<std::uint64_t>(parse_long(value, key));
    else if (key == "backend.oracle_accuracy") c.backend.oracle_accuracy = parse_double(value, key);
    else if (key == "backend.logprobs") c.backend.logprobs = parse_bool(value, key);
    else if (key == "backend.embedding_dim")
        c.backend.embedding_dim = static_cast<int>(parse_long(value, key));
    else if (key == "backend.base_url") c.backend.base_url = value;
    else if (key == "backend.api_key_env") c.backend.api_key_env = value;
    else if (key == "backend.embedding_model") c.backend.embedding_model = value;
    else if (key == "backend.timeout_ms")
        c.backend.timeout_ms = static_cast<int>(parse_long(value, key));
    else if (key == "backend.retry.max_attempts")
        c.backend.retry_max_attempts = static_cast<int>(parse_long(value, key));
    else if (key == "backend.retry.base_delay_ms")
        c.backend.retry_base_delay_ms = static_cast<int>(parse_long(value, key));
    else if (key.rfind("backend.models.", 0) == 0)
        c.backend.models[key.substr(15)] = value;
    else if (key == "gates.residual_below_injected")
        c.gates.residual_below_injected = parse_bool(value, key);
    else if (key == "gates.min_detection_precision")
        c.gates.min_detection_precision = parse_double(value, key);
    else if (key == "gates.min_detection_recall")
        c.gates.min_detection_recall = parse_double(value, key);
    else throw ConfigError("unknown config key '" + key + "'");
}

nlohmann::ordered_json config_to_json(const PipelineConfig& c) {
    nlohmann::ordered_json j;
    j["task_kind"] = to_string(c.task_kind);
    j["k"] = c.k;
    j["beta"] = c.beta;
    j["reflection_iterations"] = c.reflection_iterations;
    j["checker_policy"] = to_string(c.checker_policy);
    j["concurrency"] = c.concurrency;
    j["max_tokens"] = c.max_tokens;
    j["seed"] = c.seed;
    j["cache_dir"] = c.cache_dir;
    j["options"] = c.options;
    j["prompt_version"] = kPromptVersion;
    nlohmann::ordered_json b;
    b["kind"] = c.backend.kind == BackendKind::Simulated ? "simulated" : "http";
    if (c.backend.kind == BackendKind::Simulated) {
        b["seed"] = c.backend.seed;
        b["oracle_accuracy"] = c.backend.oracle_accuracy;
        b["logprobs"] = c.backend.logprobs;
        b["embedding_dim"] = c.backend.embedding_dim;
    } else {
        b["base_url"] = c.backend.base_url;
        b["api_key_env"] = c.backend.api_key_env;
        b["models"] = c.backend.models;
        b["embedding_model"] = c.backend.embedding_model;
        b["timeout_ms"] = c.backend.timeout_ms;
        b["retry"] = {{"max_attempts", c.backend.retry_max_attempts},
                      {"base_delay_ms", c.backend.retry_base_delay_ms}};
    }
    j["backend"] = b;
    return j;
}

}  // namespace datacure
