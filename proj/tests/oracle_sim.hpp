#ifndef DATACURE_TESTS_ORACLE_SIM_HPP
#define DATACURE_TESTS_ORACLE_SIM_HPP

// Independent Monte-Carlo model of the curation pipeline's decision rules.
// Deliberately self-contained: it simulates the agreement-pattern, review,
// entropy-band and selection rules directly from their definitions and shares
// no code with src/. Used to freeze expected statistics before comparing them
// against the real pipeline.
//
// Rules modelled (multiple-choice task, option set of size `num_options`,
// canonical ground truth = option 0 per sample):
//   - injection: exactly round(rate*n) samples get a label drawn uniformly
//     from the options other than the ground truth
//   - each expert (base, reasoning, context, review) answers correctly with
//     probability `accuracy`, otherwise uniformly picks a wrong option;
//     draws are independent across experts and samples
//   - checker any-match: sample is clean iff label == base or label == reas;
//     strict both-match: label == base and label == reas
//   - denoise fast path: context == reasoning answer -> that answer;
//     otherwise the reviewer returns the ground truth with probability
//     `accuracy` when it is among the candidates (else the other candidate);
//     when neither candidate is right it echoes the context answer
//   - entropy of the context answer: uniform in [0, 0.2) when the context
//     answer is correct, uniform in [0.8, 1.8) otherwise
//   - selection keeps the ceil(beta * m) lowest-entropy relabeled samples
//   - final set = clean partition (original labels) + kept relabels

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace oracle_sim {

struct Params {
    int n = 1000;
    double noise_rate = 0.3;
    double accuracy = 0.85;
    int num_options = 4;
    double beta = 0.5;
    bool strict_checker = false;
    int trials = 500;
    std::uint64_t seed = 20260810;
};

struct Expectation {
    double detection_precision = 1.0;
    double detection_recall = 1.0;
    double relabel_accuracy = 1.0;
    double residual_noise_rate = 0.0;
};

inline double uniform01(std::mt19937_64& rng) {
    return (rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound) without std::uniform_int_distribution
// (keeps the oracle byte-reproducible across standard libraries).
inline int uniform_int(std::mt19937_64& rng, int bound) {
    return static_cast<int>(uniform01(rng) * bound) % bound;
}

struct TrialCounts {
    long tp = 0, fp = 0, fn = 0;
    long relabeled = 0, relabeled_correct = 0;
    long ft_size = 0, ft_wrong = 0;
};

inline TrialCounts run_trial(const Params& p, std::mt19937_64& rng) {
    const int gt = 0;
    const int wrong_options = p.num_options - 1;
    const long injected = std::lround(p.noise_rate * p.n);

    auto draw_answer = [&](bool forced_wrong) {
        if (!forced_wrong && uniform01(rng) < p.accuracy) return gt;
        return 1 + uniform_int(rng, wrong_options);
    };

    TrialCounts c;
    std::vector<double> entropies;
    std::vector<int> reviewed_labels;
    std::vector<bool> clean_part_wrong;

    for (int i = 0; i < p.n; ++i) {
        const bool is_injected = i < injected;
        const int label = is_injected ? 1 + uniform_int(rng, wrong_options) : gt;

        const int base = draw_answer(false);
        const int reas = draw_answer(false);
        const bool base_match = base == label;
        const bool reas_match = reas == label;
        const bool clean = p.strict_checker ? (base_match && reas_match)
                                            : (base_match || reas_match);

        if (clean) {
            clean_part_wrong.push_back(label != gt);
            if (is_injected) c.fn++;
            continue;
        }
        if (is_injected) c.tp++; else c.fp++;

        const int cont = draw_answer(false);
        int reviewed;
        if (cont == reas) {
            reviewed = cont;
        } else if (uniform01(rng) < p.accuracy) {
            reviewed = (cont == gt || reas == gt) ? gt : cont;
        } else {
            if (cont == gt) reviewed = reas;
            else if (reas == gt) reviewed = cont;
            else reviewed = cont;
        }
        const double entropy = (cont == gt) ? 0.2 * uniform01(rng)
                                            : 0.8 + uniform01(rng);
        entropies.push_back(entropy);
        reviewed_labels.push_back(reviewed);
        c.relabeled++;
        if (reviewed == gt) c.relabeled_correct++;
    }

    // Selection: keep the ceil(beta*m) lowest entropies.
    const long m = static_cast<long>(entropies.size());
    long keep = m == 0 ? 0 : static_cast<long>(std::ceil(p.beta * m - 1e-9));
    std::vector<int> order(entropies.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return entropies[a] < entropies[b];
    });

    c.ft_size = static_cast<long>(clean_part_wrong.size()) + keep;
    for (bool w : clean_part_wrong)
        if (w) c.ft_wrong++;
    for (long j = 0; j < keep; ++j)
        if (reviewed_labels[order[j]] != gt) c.ft_wrong++;
    return c;
}

inline Expectation expect(const Params& p) {
    std::mt19937_64 rng(p.seed);
    double prec = 0, rec = 0, relab = 0, resid = 0;
    for (int t = 0; t < p.trials; ++t) {
        TrialCounts c = run_trial(p, rng);
        prec += (c.tp + c.fp) == 0 ? 1.0 : double(c.tp) / double(c.tp + c.fp);
        rec += (c.tp + c.fn) == 0 ? 1.0 : double(c.tp) / double(c.tp + c.fn);
        relab += c.relabeled == 0 ? 1.0 : double(c.relabeled_correct) / double(c.relabeled);
        resid += c.ft_size == 0 ? 0.0 : double(c.ft_wrong) / double(c.ft_size);
    }
    Expectation e;
    e.detection_precision = prec / p.trials;
    e.detection_recall = rec / p.trials;
    e.relabel_accuracy = relab / p.trials;
    e.residual_noise_rate = resid / p.trials;
    return e;
}

// Checker policy truth table, enumerated from the rule statement rather than
// the implementation. A prediction only ever matches when it is parseable.
inline int checker_table(bool strict, bool base_match, bool reas_match,
                         bool base_parseable, bool reas_parseable) {
    const bool b = base_parseable && base_match;
    const bool r = reas_parseable && reas_match;
    return (strict ? (b && r) : (b || r)) ? 1 : 0;
}

}  // namespace oracle_sim

#endif
