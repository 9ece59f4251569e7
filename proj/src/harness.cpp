#include "harness.hpp"

#include <algorithm>
#include <cmath>

#include "util.hpp"

namespace datacure {

NoiseModel noise_model_from_string(const std::string& s) {
    if (s == "uniform-flip") return NoiseModel::UniformFlip;
    if (s == "shuffle-labels") return NoiseModel::ShuffleLabels;
    if (s == "corrupt-text") return NoiseModel::CorruptText;
    throw ConfigError("unknown noise model '" + s +
                      "' (expected uniform-flip, shuffle-labels or corrupt-text)");
}

std::string to_string(NoiseModel model) {
    switch (model) {
        case NoiseModel::UniformFlip: return "uniform-flip";
        case NoiseModel::ShuffleLabels: return "shuffle-labels";
        case NoiseModel::CorruptText: return "corrupt-text";
    }
    return "uniform-flip";
}

std::vector<std::string> option_letters(int num_options) {
    if (num_options < 2 || num_options > 26)
        throw ConfigError("option count must be in [2, 26]");
    std::vector<std::string> out;
    for (int i = 0; i < num_options; ++i) out.emplace_back(1, static_cast<char>('a' + i));
    return out;
}

namespace {

// Plausible wrong free-text labels; the bracketed case tag keeps every
// corrupted label globally unique, which the prompt-audit tests rely on.
const char* kWrongPhrases[] = {
    "The available evidence does not support that conclusion.",
    "The opposite relationship holds in this setting.",
    "This cannot be determined from the given information.",
    "The premise conflates two unrelated quantities.",
};

std::vector<std::size_t> pick_corrupted(std::size_t n, std::size_t count, std::uint64_t seed) {
    std::vector<std::size_t> indices(n);
    for (std::size_t i = 0; i < n; ++i) indices[i] = i;
    DetRng rng(splitmix64(seed ^ 0x6e6f697365ULL));  // "noise"
    rng.shuffle(indices);
    indices.resize(count);
    std::sort(indices.begin(), indices.end());
    return indices;
}

void flip_uniform(Dataset& out, const std::vector<std::size_t>& chosen, const NoiseSpec& spec) {
    if (out.task_kind != TaskKind::MultipleChoice)
        throw ConfigError("uniform-flip noise requires a multiple-choice task");
    const std::vector<std::string>& options =
        spec.options.empty() ? option_letters(4) : spec.options;
    for (std::size_t idx : chosen) {
        Sample& s = out.samples[idx];
        const std::string& gt = *s.ground_truth;
        std::vector<std::string> distractors;
        for (const auto& o : options)
            if (o != gt) distractors.push_back(o);
        if (distractors.empty())
            throw ConfigError("sample " + s.id + ": ground truth '" + gt +
                              "' leaves no wrong option to flip to");
        DetRng rng(stable_hash({"flip", s.id}, spec.seed));
        s.label = distractors[rng.bounded(distractors.size())];
    }
}

void shuffle_labels(Dataset& out, const std::vector<std::size_t>& chosen, const NoiseSpec& spec) {
    if (chosen.size() < 2)
        throw ConfigError("shuffle-labels needs at least 2 corrupted samples");
    std::vector<std::size_t> order = chosen;
    DetRng rng(stable_hash({"shuffle"}, spec.seed));
    rng.shuffle(order);

    // Rotate labels along the shuffled order, then repair positions where the
    // incoming label still equals the ground truth by swapping assignments.
    const std::size_t m = order.size();
    std::vector<std::string> incoming(m);
    for (std::size_t i = 0; i < m; ++i)
        incoming[i] = out.samples[order[(i + 1) % m]].label;
    for (std::size_t i = 0; i < m; ++i) {
        if (incoming[i] != *out.samples[order[i]].ground_truth) continue;
        bool fixed = false;
        for (std::size_t j = 0; j < m && !fixed; ++j) {
            if (j == i) continue;
            if (incoming[j] != *out.samples[order[i]].ground_truth &&
                incoming[i] != *out.samples[order[j]].ground_truth) {
                std::swap(incoming[i], incoming[j]);
                fixed = true;
            }
        }
        if (!fixed)
            throw ConfigError(
                "shuffle-labels cannot produce corrupted labels: too few distinct label values");
    }
    for (std::size_t i = 0; i < m; ++i) out.samples[order[i]].label = incoming[i];
}

void corrupt_text(Dataset& out, const std::vector<std::size_t>& chosen, const NoiseSpec& spec) {
    constexpr std::size_t pool = sizeof(kWrongPhrases) / sizeof(kWrongPhrases[0]);
    for (std::size_t idx : chosen) {
        Sample& s = out.samples[idx];
        const std::uint64_t h = stable_hash({"corrupt", s.id}, spec.seed);
        std::string phrase = kWrongPhrases[h % pool];
        phrase += " [case " + to_hex(h, 8) + "]";
        if (normalize_answer(phrase, out.task_kind) ==
            normalize_answer(*s.ground_truth, out.task_kind))
            phrase += " x";
        s.label = phrase;
    }
}

}  // namespace

Dataset inject_noise(const Dataset& clean, const NoiseSpec& spec) {
    if (spec.rate < 0.0 || spec.rate > 1.0) throw ConfigError("noise rate must be in [0, 1]");

    Dataset out = clean;
    for (Sample& s : out.samples) {
        if (!s.ground_truth) {
            s.ground_truth = s.label;
        } else if (*s.ground_truth != s.label) {
            throw PreconditionError("sample " + s.id +
                                    ": ground_truth differs from label; corpus is not clean");
        }
    }

    const auto count = static_cast<std::size_t>(std::lround(spec.rate * double(out.size())));
    if (count == 0) return out;
    const std::vector<std::size_t> chosen = pick_corrupted(out.size(), count, spec.seed);

    switch (spec.model) {
        case NoiseModel::UniformFlip: flip_uniform(out, chosen, spec); break;
        case NoiseModel::ShuffleLabels: shuffle_labels(out, chosen, spec); break;
        case NoiseModel::CorruptText: corrupt_text(out, chosen, spec); break;
    }

    for (std::size_t idx : chosen) {
        Sample& s = out.samples[idx];
        if (s.label == *s.ground_truth)
            throw Error("internal: injected label equals ground truth for " + s.id);
        s.tags.insert(kTagInjectedNoise);
    }
    return out;
}

Dataset make_synthetic_mc(std::size_t n, int num_options, std::uint64_t seed) {
    const std::vector<std::string> options = option_letters(num_options);
    Dataset out;
    out.task_kind = TaskKind::MultipleChoice;
    out.samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Sample s;
        std::string digits = std::to_string(i);
        if (digits.size() < 6) digits.insert(0, 6 - digits.size(), '0');
        s.id = "s" + digits;
        const std::uint64_t h = stable_hash({"synth", s.id}, seed);
        s.query = "Problem " + std::to_string(i) + " [key " + to_hex(h, 8) +
                  "]: which option satisfies the stated condition?";
        s.label = options[h % options.size()];
        s.ground_truth = s.label;
        s.tags.insert(kTagOriginal);
        out.samples.push_back(std::move(s));
    }
    return out;
}

}  // namespace datacure
