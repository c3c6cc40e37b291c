#ifndef RBMROLL_ANALYSIS_HPP
#define RBMROLL_ANALYSIS_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rbmroll/composer.hpp"
#include "rbmroll/pianoroll.hpp"
#include "rbmroll/random.hpp"
#include "rbmroll/rbm.hpp"
#include "rbmroll/tsne.hpp"

namespace rbmroll {

struct EnergyReport {
    std::string label;
    double mean_energy = 0.0;
    double stddev = 0.0;
    std::size_t samples = 0;
};

/// Feeds the window into the visible layer, samples the hidden layer
/// `samples` times, and reports mean and sample standard deviation of the
/// joint energy. Ten samples is the reference protocol.
inline EnergyReport energy_protocol(const RbmParams& params, const PianoRoll& window, std::size_t samples, Rng& rng,
                                    std::string label = {}) {
    if (samples < 2) throw std::invalid_argument("energy_protocol: needs at least 2 samples");
    const VisibleState v = flatten(window);
    check_visible(params, v);
    std::vector<double> energies(samples);
    const ProbVector h_prob = hidden_conditional(params, v);
    for (std::size_t s = 0; s < samples; ++s) {
        const HiddenState h = sample_bernoulli(h_prob, rng);
        energies[s] = energy(params, v, h);
    }
    double mean = 0.0;
    for (double e : energies) mean += e;
    mean /= double(samples);
    double var = 0.0;
    for (double e : energies) var += (e - mean) * (e - mean);
    var /= double(samples - 1);
    return {std::move(label), mean, std::sqrt(var), samples};
}

/// Joint energy at every step of a budgeted composition: entry t is
/// energy(v_t, h_t) where v_t holds exactly t notes and h_t is the hidden
/// sample drawn from it.
inline std::vector<double> energy_trace(const RbmParams& params, std::size_t N, Rng& rng) {
    std::vector<double> trace;
    trace.reserve(N);
    compose_window(params, N, rng, [&](std::size_t, const VisibleState& v, const HiddenState& h) {
        trace.push_back(energy(params, v, h));
    });
    return trace;
}

enum class EmbeddingMode { probabilities, sampled };

/// Hidden-layer representation of a window: the conditional probabilities
/// (deterministic, default) or one binary sample.
inline std::vector<double> hidden_embedding(const RbmParams& params, const PianoRoll& window, EmbeddingMode mode,
                                            Rng& rng) {
    const VisibleState v = flatten(window);
    check_visible(params, v);
    const ProbVector probs = hidden_conditional(params, v);
    if (mode == EmbeddingMode::probabilities) return probs;
    const HiddenState h = sample_bernoulli(probs, rng);
    return std::vector<double>(h.begin(), h.end());
}

struct EmbeddingItem {
    std::string label;
    std::vector<double> activation;                   // length P
    std::optional<std::array<double, 2>> projection;  // filled after t-SNE
};

struct EmbeddingSet {
    std::vector<EmbeddingItem> items;
};

/// Projects every activation in the set with exact t-SNE.
inline void project_embeddings(EmbeddingSet& set, double perplexity, std::size_t iterations, std::uint64_t seed) {
    std::vector<std::vector<double>> activations;
    activations.reserve(set.items.size());
    for (const EmbeddingItem& item : set.items) activations.push_back(item.activation);
    const auto projected = tsne(activations, perplexity, iterations, seed);
    for (std::size_t n = 0; n < set.items.size(); ++n) set.items[n].projection = projected[n];
}

/// Number of major-scale pitch classes shared between a key and its
/// transposition by `shift` semitones: |S ∩ (S + shift mod 12)| with
/// S = {0,2,4,5,7,9,11}.
inline int scale_overlap(int shift) {
    constexpr std::array<int, 7> scale = {0, 2, 4, 5, 7, 9, 11};
    bool member[12] = {};
    for (int tone : scale) member[tone] = true;
    const int offset = ((shift % 12) + 12) % 12;
    int shared = 0;
    for (int tone : scale) shared += member[(tone + offset) % 12] ? 1 : 0;
    return shared;
}

inline double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace rbmroll

#endif  // RBMROLL_ANALYSIS_HPP
