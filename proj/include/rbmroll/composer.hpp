#ifndef RBMROLL_COMPOSER_HPP
#define RBMROLL_COMPOSER_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include "rbmroll/pianoroll.hpp"
#include "rbmroll/random.hpp"
#include "rbmroll/rbm.hpp"

namespace rbmroll {

struct ComposeConfig {
    std::size_t initial_budget = 1000;   // ones in the opening two measures
    std::size_t extension_budget = 500;  // ones in each newly generated measure pair half
    std::size_t extensions = 6;          // appended measures beyond the first two
    std::uint64_t seed = 0;
};

/// Observer invoked once per growth step with (t, v_t, h_t): the current
/// visible state (exactly t ones) and the hidden sample drawn from it.
using ComposeObserver = std::function<void(std::size_t, const VisibleState&, const HiddenState&)>;

namespace compose_detail {

/// Sets out[i] = 1 for the k largest entries of values restricted to
/// `candidates`, ties broken by lowest flat index. Everything else is 0.
inline void select_top_k(const std::vector<double>& values, std::span<const std::size_t> candidates, std::size_t k,
                         VisibleState& out) {
    std::fill(out.begin(), out.end(), 0);
    if (k == 0) return;
    std::vector<std::size_t> order(candidates.begin(), candidates.end());
    std::nth_element(order.begin(), order.begin() + (k - 1), order.end(), [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) return values[a] > values[b];
        return a < b;
    });
    for (std::size_t n = 0; n < k; ++n) out[order[n]] = 1;
}

}  // namespace compose_detail

/// Grows a two-measure window from silence. Step t samples a hidden state
/// from the current visible state, takes the expected visible state, and
/// keeps its t+1 largest entries, so the note count rises by exactly one per
/// step and finishes at N. Previously set cells may switch off.
inline PianoRoll compose_window(const RbmParams& params, std::size_t N, Rng& rng,
                                const ComposeObserver& observer = nullptr) {
    if (params.num_visible != kVisibleUnits)
        throw std::invalid_argument("compose_window: model is not window-shaped (D != 13,824)");
    if (N > params.num_visible) throw std::invalid_argument("compose_window: N exceeds the number of visible units");

    std::vector<std::size_t> all(params.num_visible);
    std::iota(all.begin(), all.end(), 0);

    VisibleState v(params.num_visible, 0);
    VisibleState next(params.num_visible, 0);
    for (std::size_t t = 0; t < N; ++t) {
        const HiddenState h = sample_bernoulli(hidden_conditional(params, v), rng);
        if (observer) observer(t, v, h);
        const ProbVector expected = visible_conditional(params, h);
        compose_detail::select_top_k(expected, all, t + 1, next);
        std::swap(v, next);
    }
    return unflatten(v);
}

/// Extends a composition: the left measure is clamped to the right measure of
/// `prev` and only the right measure is regrown, one note per step up to N.
inline PianoRoll extend_window(const RbmParams& params, const PianoRoll& prev, std::size_t N, Rng& rng,
                               const ComposeObserver& observer = nullptr) {
    if (params.num_visible != kVisibleUnits)
        throw std::invalid_argument("extend_window: model is not window-shaped (D != 13,824)");
    if (!prev.is_window()) throw std::invalid_argument("extend_window: prev is not a 192-column window");
    if (N > params.num_visible / 2)
        throw std::invalid_argument("extend_window: N exceeds the right-half cell count");

    // Clamped left half = right measure of prev; right half starts silent.
    PianoRoll seed(kWindowColumns);
    for (int row = 0; row < kPitchRows; ++row)
        for (int col = 0; col < kMeasureColumns; ++col) seed.at(row, col) = prev.at(row, col + kMeasureColumns);
    VisibleState u = flatten(seed);

    // Flat indices of the mutable right measure (columns 96..191).
    std::vector<std::size_t> right;
    right.reserve(kVisibleUnits / 2);
    for (int row = 0; row < kPitchRows; ++row)
        for (int col = kMeasureColumns; col < kWindowColumns; ++col)
            right.push_back(std::size_t(row) * kWindowColumns + col);

    VisibleState right_next(params.num_visible, 0);
    for (std::size_t t = 0; t < N; ++t) {
        const HiddenState h = sample_bernoulli(hidden_conditional(params, u), rng);
        if (observer) observer(t, u, h);
        const ProbVector expected = visible_conditional(params, h);
        compose_detail::select_top_k(expected, right, t + 1, right_next);
        for (std::size_t index : right) u[index] = right_next[index];
    }
    return unflatten(u);
}

/// Chains the two procedures: one budgeted two-measure window, then
/// `extensions` one-measure continuations, concatenated into a strip of
/// 2 + extensions measures.
inline PianoRoll compose_piece(const RbmParams& params, const ComposeConfig& config) {
    Rng rng(config.seed);
    PianoRoll window = compose_window(params, config.initial_budget, rng);

    PianoRoll strip(kWindowColumns + int(config.extensions) * kMeasureColumns);
    for (int row = 0; row < kPitchRows; ++row)
        for (int col = 0; col < kWindowColumns; ++col) strip.at(row, col) = window.at(row, col);

    int cursor = kWindowColumns;
    for (std::size_t n = 0; n < config.extensions; ++n) {
        window = extend_window(params, window, config.extension_budget, rng);
        for (int row = 0; row < kPitchRows; ++row)
            for (int col = 0; col < kMeasureColumns; ++col)
                strip.at(row, cursor + col) = window.at(row, col + kMeasureColumns);
        cursor += kMeasureColumns;
    }
    return strip;
}

}  // namespace rbmroll

#endif  // RBMROLL_COMPOSER_HPP
