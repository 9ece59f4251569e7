#ifndef DATACURE_CORPUS_HPP
#define DATACURE_CORPUS_HPP

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace datacure {

enum class TaskKind { MultipleChoice, ShortAnswer, FreeText };

TaskKind task_kind_from_string(const std::string& s);
std::string to_string(TaskKind kind);

// Provenance tags carried by samples across pipeline stages.
inline constexpr const char* kTagOriginal = "original";
inline constexpr const char* kTagRelabeled = "relabeled";
inline constexpr const char* kTagInjectedNoise = "injected-noise";

struct Sample {
    std::string id;
    std::string query;
    std::string label;
    std::optional<std::string> ground_truth;  // present only in harness runs
    std::set<std::string> tags;
    // Unknown record fields, preserved opaquely on round-trip.
    nlohmann::ordered_json extra = nlohmann::ordered_json::object();

    bool has_tag(const std::string& t) const { return tags.count(t) > 0; }
};

struct Dataset {
    std::vector<Sample> samples;
    TaskKind task_kind = TaskKind::FreeText;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
    const Sample* find(const std::string& id) const;
};

enum class DatasetFormat { Jsonl };

// Line-delimited JSON records with fields {id?, query, label, ground_truth?,
// tags?}. Missing ids become "s<zero-padded index>"; order is preserved.
// Malformed records and duplicate explicit ids raise ParseError naming the line.
Dataset load_dataset(const std::string& path, DatasetFormat format = DatasetFormat::Jsonl);
Dataset parse_dataset(std::istream& in, const std::string& origin);

void save_dataset(const Dataset& d, const std::string& path);
nlohmann::ordered_json sample_to_json(const Sample& s);

// Canonical answer form used by every consistency comparison: trim, ASCII
// case-fold, collapse internal whitespace; multiple-choice additionally
// extracts the first standalone option identifier, short-answer strips
// surrounding punctuation. Idempotent, never longer than its input.
std::string normalize_answer(const std::string& raw, TaskKind kind);

}  // namespace datacure

#endif
