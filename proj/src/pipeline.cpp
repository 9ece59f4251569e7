#include "pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "http_backend.hpp"
#include "sim_backend.hpp"
#include "util.hpp"

namespace datacure {

using nlohmann::ordered_json;

namespace {

void log_stderr(const std::string& msg) { std::fprintf(stderr, "[datacure] %s\n", msg.c_str()); }

class StageTimer {
public:
    explicit StageTimer(std::map<std::string, double>& sink) : sink_(sink) {}
    template <typename Fn>
    auto run(const std::string& name, Fn&& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            finish(name, t0);
        } else {
            auto out = fn();
            finish(name, t0);
            return out;
        }
    }

private:
    void finish(const std::string& name, std::chrono::steady_clock::time_point t0) {
        const auto dt = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
        sink_[name] = dt;
        char buf[160];
        std::snprintf(buf, sizeof(buf), "stage %s finished in %.1f ms", name.c_str(), dt);
        log_stderr(buf);
    }

    std::map<std::string, double>& sink_;
};

ordered_json entropy_or_null(double e) {
    if (std::isfinite(e)) return e;
    return nullptr;
}

double safe_ratio(long num, long den, double empty_value) {
    return den == 0 ? empty_value : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

BackendStack build_backend(const PipelineConfig& config) {
    std::shared_ptr<Backend> base;
    if (config.backend.kind == BackendKind::Simulated) {
        SimBackendConfig sim;
        sim.seed = config.backend.seed;
        sim.oracle_accuracy = config.backend.oracle_accuracy;
        sim.logprobs = config.backend.logprobs;
        sim.embedding_dim = config.backend.embedding_dim;
        base = std::make_shared<SimulatedBackend>(sim);
    } else {
        HttpBackendConfig http;
        http.base_url = config.backend.base_url;
        const char* key = std::getenv(config.backend.api_key_env.c_str());
        http.api_key = key ? key : "";
        http.models = config.backend.models;
        http.embedding_model = config.backend.embedding_model;
        http.logprobs = config.backend.logprobs;
        http.timeout_ms = config.backend.timeout_ms;
        http.retry.max_attempts = config.backend.retry_max_attempts;
        http.retry.base_delay_ms = config.backend.retry_base_delay_ms;
        base = std::make_shared<HttpBackend>(http);
    }

    BackendStack stack;
    stack.counter = std::make_shared<CountingBackend>(base);
    if (!config.cache_dir.empty()) {
        stack.cache = std::make_shared<CachedBackend>(stack.counter, config.cache_dir);
        stack.outer = stack.cache;
    } else {
        stack.outer = stack.counter;
    }
    return stack;
}

PipelineOutcome run_pipeline(const Dataset& input, const PipelineConfig& config) {
    config.validate();
    if (input.empty()) throw PreconditionError("input dataset is empty");

    Dataset dataset = input;
    dataset.task_kind = config.task_kind;

    BackendStack stack = build_backend(config);
    Backend& backend = *stack.outer;

    PipelineOutcome out;
    StageTimer timer(out.report.timings_ms);
    out.report.input_count = static_cast<long>(dataset.size());

    DetectConfig detect_config;
    detect_config.reflection_iterations = config.reflection_iterations;
    detect_config.policy = config.checker_policy;
    detect_config.concurrency = config.concurrency;
    detect_config.max_tokens = config.max_tokens;
    detect_config.prompts = config.prompts;
    const std::vector<std::string> options =
        config.task_kind == TaskKind::MultipleChoice ? config.options
                                                     : std::vector<std::string>{};

    out.partition = timer.run("detect", [&] { return detect(dataset, backend, detect_config, options); });
    out.report.clean_count = static_cast<long>(out.partition.clean.size());
    out.report.noisy_count = static_cast<long>(out.partition.noisy.size());
    for (const auto& [id, rec] : out.partition.records) {
        if (rec.error_note) out.report.detect_errors++;
        const std::string label_norm =
            normalize_answer(dataset.find(id)->label, dataset.task_kind);
        const bool b = rec.base_answer.parseable && rec.base_answer.normalized == label_norm;
        const bool r = rec.reas_answer.parseable && rec.reas_answer.normalized == label_norm;
        if (b && r) out.report.agreement_both++;
        else if (b) out.report.agreement_base_only++;
        else if (r) out.report.agreement_reas_only++;
        else out.report.agreement_neither++;
    }

    DenoiseConfig denoise_config;
    denoise_config.k = config.k;
    denoise_config.concurrency = config.concurrency;
    denoise_config.max_tokens = config.max_tokens;
    denoise_config.prompts = config.prompts;

    if (out.partition.noisy.empty()) {
        out.denoised.relabeled.task_kind = config.task_kind;
    } else if (out.partition.clean.empty()) {
        log_stderr("warning: clean partition is empty; skipping denoise stage");
        out.denoised.relabeled.task_kind = config.task_kind;
    } else {
        EmbeddingIndex index = timer.run("index", [&] {
            return build_index(out.partition.clean, backend, config.concurrency, log_stderr);
        });
        out.denoised = timer.run("denoise", [&] {
            return denoise(out.partition.noisy, out.partition.clean, index,
                           out.partition.records, backend, denoise_config, options);
        });
    }
    for (const auto& [id, rec] : out.denoised.records) {
        switch (rec.resolution) {
            case ReviewResolution::Resolved: out.report.resolved++; break;
            case ReviewResolution::Fallback: out.report.fallback++; break;
            case ReviewResolution::Unresolvable: out.report.unresolvable++; break;
        }
        if (rec.fast_path) out.report.fast_path++;
    }
    out.report.candidate_agreement_rate = safe_ratio(
        out.report.fast_path, static_cast<long>(out.denoised.records.size()), 0.0);

    timer.run("select", [&] {
        out.selected.task_kind = config.task_kind;
        if (out.denoised.relabeled.empty()) return;
        for (const auto& sample : out.denoised.relabeled.samples) {
            const DenoiseRecord& rec = out.denoised.records.at(sample.id);
            std::vector<std::pair<std::string, std::string>> exemplars;
            for (const auto& id : rec.context_ids) {
                const Sample* ex = out.partition.clean.find(id);
                if (ex) exemplars.emplace_back(ex->query, ex->label);
            }
            out.scored.push_back(score_relabeled(sample, rec, backend, denoise_config,
                                                 config.task_kind, exemplars));
        }
        out.selected = select_samples(out.scored, config.beta, config.task_kind);
    });
    out.report.scored_count = static_cast<long>(out.scored.size());
    out.report.kept_count = static_cast<long>(out.selected.size());
    out.report.dropped_count = out.report.scored_count - out.report.kept_count;
    {
        // Cutoff = highest entropy among kept samples; histogram over all scored.
        std::set<std::string> kept_ids;
        for (const auto& s : out.selected.samples) kept_ids.insert(s.id);
        double cutoff = 0.0;
        out.report.entropy_histogram.assign(11, 0);
        for (const auto& sc : out.scored) {
            if (kept_ids.count(sc.sample.id) && std::isfinite(sc.entropy))
                cutoff = std::max(cutoff, sc.entropy);
            const std::size_t bin =
                std::isfinite(sc.entropy)
                    ? std::min<std::size_t>(static_cast<std::size_t>(sc.entropy / 0.25), 10)
                    : 10;
            out.report.entropy_histogram[bin]++;
        }
        out.report.cutoff_entropy = cutoff;
    }

    timer.run("assemble", [&] { out.ft = assemble_ft(out.partition.clean, out.selected); });
    out.report.ft_size = static_cast<long>(out.ft.size());

    out.report.backend_calls = stack.counter->total_calls();
    if (stack.cache) {
        const auto stats = stack.cache->stats();
        out.report.cache_hits = stats.hits;
        out.report.cache_misses = stats.misses;
    }
    return out;
}

ordered_json curation_report_to_json(const CurationReport& r, const PipelineConfig& config) {
    ordered_json j;
    j["input_count"] = r.input_count;
    j["detection"] = {{"clean", r.clean_count},
                      {"noisy", r.noisy_count},
                      {"errors", r.detect_errors},
                      {"agreement_histogram",
                       {{"both", r.agreement_both},
                        {"base_only", r.agreement_base_only},
                        {"reas_only", r.agreement_reas_only},
                        {"neither", r.agreement_neither}}}};
    j["denoise"] = {{"resolved", r.resolved},
                    {"fallback", r.fallback},
                    {"unresolvable", r.unresolvable},
                    {"fast_path", r.fast_path},
                    {"candidate_agreement_rate", r.candidate_agreement_rate}};
    j["selection"] = {{"scored", r.scored_count},
                      {"kept", r.kept_count},
                      {"dropped", r.dropped_count},
                      {"cutoff_entropy", r.cutoff_entropy},
                      {"entropy_histogram", r.entropy_histogram}};
    j["assemble"] = {{"ft_size", r.ft_size}};
    j["backend"] = {{"calls", r.backend_calls},
                    {"cache_hits", r.cache_hits},
                    {"cache_misses", r.cache_misses}};
    j["config"] = config_to_json(config);
    j["timings_ms"] = r.timings_ms;
    return j;
}

ordered_json records_to_json_lines(const PipelineOutcome& outcome, const Dataset& input) {
    ordered_json lines = ordered_json::array();
    for (const auto& sample : input.samples) {
        const DetectionRecord& det = outcome.partition.records.at(sample.id);
        ordered_json rec;
        rec["id"] = sample.id;
        rec["verdict"] = det.verdict;
        rec["stage"] = det.verdict == 1 ? "clean" : "relabel";
        rec["base_answer"] = det.base_answer.normalized;
        rec["base_parseable"] = det.base_answer.parseable;
        rec["reas_answer"] = det.reas_answer.normalized;
        rec["reas_parseable"] = det.reas_answer.parseable;
        ordered_json trace = ordered_json::array();
        for (const auto& [reasoning, reflection] : det.reflection_trace)
            trace.push_back({{"reasoning", reasoning}, {"reflection", reflection}});
        rec["reflection_trace"] = trace;
        if (det.error_note) rec["error"] = *det.error_note;

        auto den_it = outcome.denoised.records.find(sample.id);
        if (den_it != outcome.denoised.records.end()) {
            const DenoiseRecord& den = den_it->second;
            rec["context_ids"] = den.context_ids;
            rec["cont_answer"] = den.cont_answer.normalized;
            rec["reviewed_label"] = den.reviewed_label;
            rec["review_raw"] = den.review_raw;
            rec["resolution"] = to_string(den.resolution);
            rec["review_fast_path"] = den.fast_path;
            if (den.error_note) rec["denoise_error"] = *den.error_note;
            for (const auto& sc : outcome.scored) {
                if (sc.sample.id != sample.id) continue;
                rec["entropy"] = entropy_or_null(sc.entropy);
                rec["token_count"] = sc.token_count;
                break;
            }
            bool selected = false;
            for (const auto& s : outcome.selected.samples)
                if (s.id == sample.id) selected = true;
            rec["selected"] = selected;
        }
        lines.push_back(std::move(rec));
    }
    return lines;
}

CurationReport run_curate(const std::string& input_path, const std::string& output_path,
                          const PipelineConfig& config) {
    config.validate();  // usage errors fire before any backend work
    Dataset input = load_dataset(input_path);
    if (input.empty()) throw PreconditionError("input dataset is empty: " + input_path);

    PipelineOutcome outcome = run_pipeline(input, config);
    input.task_kind = config.task_kind;

    save_dataset(outcome.ft, output_path);
    {
        std::ofstream rec_out(output_path + ".records.jsonl", std::ios::trunc);
        if (!rec_out) throw IoError("cannot write records sidecar for " + output_path);
        for (const auto& line : records_to_json_lines(outcome, input))
            rec_out << line.dump() << "\n";
    }
    {
        std::ofstream rep_out(output_path + ".report.json", std::ios::trunc);
        if (!rep_out) throw IoError("cannot write report sidecar for " + output_path);
        rep_out << curation_report_to_json(outcome.report, config).dump(2) << "\n";
    }
    return outcome.report;
}

HarnessReport evaluate(const Dataset& corpus, const NoiseSpec& spec,
                       const PipelineConfig& config) {
    config.validate();
    Dataset corpus_typed = corpus;
    corpus_typed.task_kind = config.task_kind;
    const Dataset noisy_input = inject_noise(corpus_typed, spec);

    PipelineOutcome outcome = run_pipeline(noisy_input, config);

    HarnessReport report;
    report.noise_rate = spec.rate;
    report.noise_model = to_string(spec.model);
    report.beta = config.beta;
    report.sample_count = static_cast<long>(noisy_input.size());
    report.timings_ms = outcome.report.timings_ms;
    report.backend_calls = outcome.report.backend_calls;
    report.cache_hits = outcome.report.cache_hits;

    std::set<std::string> injected;
    for (const auto& s : noisy_input.samples)
        if (s.has_tag(kTagInjectedNoise)) injected.insert(s.id);
    report.injected_count = static_cast<long>(injected.size());

    long tp = 0, fp = 0, fn = 0;
    for (const auto& s : outcome.partition.noisy.samples)
        injected.count(s.id) ? tp++ : fp++;
    for (const auto& s : outcome.partition.clean.samples)
        if (injected.count(s.id)) fn++;
    report.detected_noisy = tp + fp;
    report.clean_partition = static_cast<long>(outcome.partition.clean.size());
    report.detection_precision = safe_ratio(tp, tp + fp, 1.0);
    report.detection_recall = safe_ratio(tp, tp + fn, 1.0);

    auto is_correct = [&](const Sample& s) {
        return s.ground_truth &&
               normalize_answer(s.label, config.task_kind) ==
                   normalize_answer(*s.ground_truth, config.task_kind);
    };
    long relabel_correct = 0;
    for (const auto& s : outcome.denoised.relabeled.samples)
        if (is_correct(s)) relabel_correct++;
    report.relabeled_count = static_cast<long>(outcome.denoised.relabeled.size());
    report.relabel_accuracy = safe_ratio(relabel_correct, report.relabeled_count, 1.0);

    report.kept_count = static_cast<long>(outcome.selected.size());
    report.ft_size = static_cast<long>(outcome.ft.size());
    for (const auto& s : outcome.ft.samples)
        if (!is_correct(s)) report.ft_wrong++;
    report.residual_noise_rate = safe_ratio(report.ft_wrong, report.ft_size, 0.0);

    const EvalGates& gates = config.gates;
    if (gates.residual_below_injected && spec.rate > 0.0 &&
        report.residual_noise_rate >= spec.rate) {
        report.gates_passed = false;
        report.gate_failures.push_back("residual_below_injected");
    }
    if (gates.min_detection_precision >= 0.0 &&
        report.detection_precision < gates.min_detection_precision) {
        report.gates_passed = false;
        report.gate_failures.push_back("min_detection_precision");
    }
    if (gates.min_detection_recall >= 0.0 &&
        report.detection_recall < gates.min_detection_recall) {
        report.gates_passed = false;
        report.gate_failures.push_back("min_detection_recall");
    }
    return report;
}

std::vector<HarnessReport> run_eval(const Dataset& corpus, const std::vector<double>& rates,
                                    const PipelineConfig& config) {
    if (rates.empty()) throw ConfigError("eval requires at least one noise rate");
    for (const auto& s : corpus.samples)
        if (!s.ground_truth)
            throw PreconditionError("eval corpus must carry ground truth (sample " + s.id + ")");

    std::vector<double> betas = config.eval_betas.empty() ? std::vector<double>{config.beta}
                                                          : config.eval_betas;
    std::vector<HarnessReport> reports;
    for (double rate : rates) {
        for (double beta : betas) {
            PipelineConfig cell = config;
            cell.beta = beta;
            NoiseSpec spec;
            spec.rate = rate;
            spec.model = config.noise_model;
            spec.seed = stable_hash({"inject", std::to_string(rate)}, config.seed);
            spec.options = config.options;
            char buf[96];
            std::snprintf(buf, sizeof(buf), "eval cell: rate=%.2f beta=%.2f", rate, beta);
            log_stderr(buf);
            reports.push_back(evaluate(corpus, spec, cell));
        }
    }
    return reports;
}

ordered_json harness_report_to_json(const HarnessReport& r) {
    ordered_json j;
    j["noise_rate"] = r.noise_rate;
    j["noise_model"] = r.noise_model;
    j["beta"] = r.beta;
    j["sample_count"] = r.sample_count;
    j["injected_count"] = r.injected_count;
    j["detection"] = {{"precision", r.detection_precision},
                      {"recall", r.detection_recall},
                      {"detected_noisy", r.detected_noisy},
                      {"clean_partition", r.clean_partition}};
    j["relabel"] = {{"count", r.relabeled_count}, {"accuracy", r.relabel_accuracy}};
    j["selection"] = {{"kept", r.kept_count}};
    j["ft"] = {{"size", r.ft_size},
               {"wrong", r.ft_wrong},
               {"residual_noise_rate", r.residual_noise_rate}};
    j["backend"] = {{"calls", r.backend_calls}, {"cache_hits", r.cache_hits}};
    j["gates"] = {{"passed", r.gates_passed}, {"failures", r.gate_failures}};
    j["timings_ms"] = r.timings_ms;
    return j;
}

ordered_json eval_reports_to_json(const std::vector<HarnessReport>& reports,
                                  const PipelineConfig& config) {
    ordered_json j;
    j["config"] = config_to_json(config);
    ordered_json arr = ordered_json::array();
    bool all_passed = true;
    for (const auto& r : reports) {
        arr.push_back(harness_report_to_json(r));
        all_passed = all_passed && r.gates_passed;
    }
    j["reports"] = arr;
    j["gates_passed"] = all_passed;
    return j;
}

ordered_json inspect_records(const std::string& output_path, const std::string& sample_id) {
    const std::string records_path = output_path + ".records.jsonl";
    std::ifstream in(records_path);
    if (!in) throw IoError("cannot open records sidecar: " + records_path);
    ordered_json out = ordered_json::array();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim_view(line).empty()) continue;
        ordered_json rec = ordered_json::parse(line, nullptr, /*allow_exceptions=*/false);
        if (rec.is_discarded())
            throw ParseError(records_path + ":" + std::to_string(line_no) + ": malformed record");
        if (!sample_id.empty() && rec.value("id", "") != sample_id) continue;
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace datacure
