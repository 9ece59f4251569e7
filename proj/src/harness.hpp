#ifndef DATACURE_HARNESS_HPP
#define DATACURE_HARNESS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "corpus.hpp"

namespace datacure {

enum class NoiseModel {
    UniformFlip,    // multiple-choice: uniform wrong option
    ShuffleLabels,  // swap labels between corrupted samples
    CorruptText,    // replace with plausible wrong free text
};
NoiseModel noise_model_from_string(const std::string& s);
std::string to_string(NoiseModel model);

struct NoiseSpec {
    double rate = 0.3;
    NoiseModel model = NoiseModel::UniformFlip;
    std::uint64_t seed = 0;
    std::vector<std::string> options;  // uniform-flip option set
};

// Corrupts exactly round(rate * n) labels, chosen by a seeded draw. Corrupted
// samples gain the injected-noise tag and keep their ground truth; the
// corrupted label always differs from it. Ids, queries and order are
// untouched. Samples without a ground_truth get it stamped from the label;
// a ground_truth differing from the label means the corpus is not clean.
Dataset inject_noise(const Dataset& clean, const NoiseSpec& spec);

struct HarnessReport {
    double noise_rate = 0.0;
    std::string noise_model;
    double beta = 0.0;
    long sample_count = 0;
    long injected_count = 0;
    long detected_noisy = 0;
    long clean_partition = 0;
    double detection_precision = 1.0;  // noisy is the positive class
    double detection_recall = 1.0;
    long relabeled_count = 0;
    double relabel_accuracy = 1.0;
    long kept_count = 0;
    long ft_size = 0;
    long ft_wrong = 0;
    double residual_noise_rate = 0.0;
    long backend_calls = 0;
    long cache_hits = 0;
    std::map<std::string, double> timings_ms;
    bool gates_passed = true;
    std::vector<std::string> gate_failures;
};

// Synthetic multiple-choice corpus with known ground truth: n distinct
// queries, labels drawn over option letters, ground_truth = label.
Dataset make_synthetic_mc(std::size_t n, int num_options, std::uint64_t seed);
std::vector<std::string> option_letters(int num_options);

}  // namespace datacure

#endif
