#ifndef DATACURE_PIPELINE_HPP
#define DATACURE_PIPELINE_HPP

#include <memory>
#include <string>
#include <vector>

#include "cache.hpp"
#include "config.hpp"
#include "denoise.hpp"
#include "detect.hpp"
#include "harness.hpp"
#include "selection.hpp"

namespace datacure {

struct BackendStack {
    std::shared_ptr<Backend> outer;            // what the stages talk to
    std::shared_ptr<CountingBackend> counter;  // sits below the cache: counts real calls
    std::shared_ptr<CachedBackend> cache;      // null when cache_dir is empty
};
BackendStack build_backend(const PipelineConfig& config);

struct CurationReport {
    long input_count = 0;
    long clean_count = 0;
    long noisy_count = 0;
    long detect_errors = 0;
    long agreement_both = 0;
    long agreement_base_only = 0;
    long agreement_reas_only = 0;
    long agreement_neither = 0;
    long resolved = 0;
    long fallback = 0;
    long unresolvable = 0;
    long fast_path = 0;
    double candidate_agreement_rate = 0.0;
    long scored_count = 0;
    long kept_count = 0;
    long dropped_count = 0;
    double cutoff_entropy = 0.0;  // entropy of the last kept sample
    std::vector<long> entropy_histogram;  // 0.25-wide bins from 0, last bin = overflow
    long ft_size = 0;
    long backend_calls = 0;
    long cache_hits = 0;
    long cache_misses = 0;
    std::map<std::string, double> timings_ms;
};

// detect -> denoise -> select -> assemble on an in-memory dataset, stage
// barriers in that order. The per-sample audit trail survives in the
// partition/denoise records.
struct PipelineOutcome {
    Partition partition;
    DenoiseResult denoised;
    std::vector<ScoredSample> scored;
    Dataset selected;
    Dataset ft;
    CurationReport report;
};
PipelineOutcome run_pipeline(const Dataset& input, const PipelineConfig& config);

nlohmann::ordered_json curation_report_to_json(const CurationReport& report,
                                               const PipelineConfig& config);
nlohmann::ordered_json records_to_json_lines(const PipelineOutcome& outcome,
                                             const Dataset& input);

// CLI entry points. run_curate writes output_path (the fine-tuning set),
// output_path + ".records.jsonl" and output_path + ".report.json".
CurationReport run_curate(const std::string& input_path, const std::string& output_path,
                          const PipelineConfig& config);

HarnessReport evaluate(const Dataset& corpus, const NoiseSpec& spec,
                       const PipelineConfig& config);

// One report per (rate, beta) cell; betas default to {config.beta}.
std::vector<HarnessReport> run_eval(const Dataset& corpus, const std::vector<double>& rates,
                                    const PipelineConfig& config);

nlohmann::ordered_json harness_report_to_json(const HarnessReport& report);
nlohmann::ordered_json eval_reports_to_json(const std::vector<HarnessReport>& reports,
                                            const PipelineConfig& config);

// Reads a records sidecar written by run_curate, optionally filtered by id.
nlohmann::ordered_json inspect_records(const std::string& output_path,
                                       const std::string& sample_id);

}  // namespace datacure

#endif
