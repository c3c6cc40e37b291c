#ifndef RBMROLL_RBM_HPP
#define RBMROLL_RBM_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rbmroll/random.hpp"

namespace rbmroll {

using VisibleState = std::vector<std::uint8_t>;  // entries 0/1, length D
using HiddenState = std::vector<std::uint8_t>;   // entries 0/1, length P
using ProbVector = std::vector<double>;

/// Numerically safe logistic sigmoid.
inline double logistic(double x) {
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

/// log(1 + exp(x)) without overflow for large |x|.
inline double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

/// Parameters of a Bernoulli-Bernoulli RBM: couplings between D visible and
/// P hidden units plus per-unit biases. Stored as 64-bit floats, weights
/// row-major (visible index major), immutable-by-convention once trained.
struct RbmParams {
    std::size_t num_visible = 0;  // D
    std::size_t num_hidden = 0;   // P
    std::vector<double> weights;  // D x P, weights[i * P + j]
    std::vector<double> visible_bias;  // b, length D
    std::vector<double> hidden_bias;   // c, length P

    RbmParams() = default;
    RbmParams(std::size_t D, std::size_t P)
        : num_visible(D), num_hidden(P), weights(D * P, 0.0), visible_bias(D, 0.0), hidden_bias(P, 0.0) {
        if (D < 1 || P < 1) throw std::invalid_argument("RbmParams: D and P must be >= 1");
    }

    double& w(std::size_t i, std::size_t j) { return weights[i * num_hidden + j]; }
    double w(std::size_t i, std::size_t j) const { return weights[i * num_hidden + j]; }
};

inline void check_visible(const RbmParams& params, const VisibleState& v) {
    if (v.size() != params.num_visible) throw std::invalid_argument("visible state length does not match D");
}

inline void check_hidden(const RbmParams& params, const HiddenState& h) {
    if (h.size() != params.num_hidden) throw std::invalid_argument("hidden state length does not match P");
}

/// Joint energy  E(v,h) = -sum_ij w_ij v_i h_j - sum_i v_i b_i - sum_j h_j c_j.
/// Binary states let us skip rows with v_i = 0 entirely.
inline double energy(const RbmParams& params, const VisibleState& v, const HiddenState& h) {
    check_visible(params, v);
    check_hidden(params, h);
    const std::size_t P = params.num_hidden;
    double coupling = 0.0, vis = 0.0, hid = 0.0;
    for (std::size_t i = 0; i < params.num_visible; ++i) {
        if (!v[i]) continue;
        vis += params.visible_bias[i];
        const double* row = params.weights.data() + i * P;
        double acc = 0.0;
        for (std::size_t j = 0; j < P; ++j)
            if (h[j]) acc += row[j];
        coupling += acc;
    }
    for (std::size_t j = 0; j < P; ++j)
        if (h[j]) hid += params.hidden_bias[j];
    return -coupling - vis - hid;
}

/// Pre-sigmoid hidden activations  c_j + sum_i w_ij v_i.
inline std::vector<double> hidden_activation(const RbmParams& params, const VisibleState& v) {
    check_visible(params, v);
    const std::size_t P = params.num_hidden;
    std::vector<double> act(params.hidden_bias);
    for (std::size_t i = 0; i < params.num_visible; ++i) {
        if (!v[i]) continue;
        const double* row = params.weights.data() + i * P;
        for (std::size_t j = 0; j < P; ++j) act[j] += row[j];
    }
    return act;
}

/// Pre-sigmoid visible activations  b_i + sum_j w_ij h_j.
inline std::vector<double> visible_activation(const RbmParams& params, const HiddenState& h) {
    check_hidden(params, h);
    const std::size_t P = params.num_hidden;
    std::vector<std::size_t> on;
    for (std::size_t j = 0; j < P; ++j)
        if (h[j]) on.push_back(j);
    std::vector<double> act(params.visible_bias);
    for (std::size_t i = 0; i < params.num_visible; ++i) {
        const double* row = params.weights.data() + i * P;
        double acc = 0.0;
        for (std::size_t j : on) acc += row[j];
        act[i] += acc;
    }
    return act;
}

/// p(h_j = 1 | v), factorized over hidden units.
inline ProbVector hidden_conditional(const RbmParams& params, const VisibleState& v) {
    std::vector<double> act = hidden_activation(params, v);
    for (double& a : act) a = logistic(a);
    return act;
}

/// p(v_i = 1 | h), factorized over visible units.
inline ProbVector visible_conditional(const RbmParams& params, const HiddenState& h) {
    std::vector<double> act = visible_activation(params, h);
    for (double& a : act) a = logistic(a);
    return act;
}

/// One Bernoulli draw per entry. Entries must lie in [0, 1].
inline std::vector<std::uint8_t> sample_bernoulli(const ProbVector& probs, Rng& rng) {
    std::vector<std::uint8_t> out(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double p = probs[i];
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sample_bernoulli: probability outside [0,1]");
        out[i] = rng.next_bernoulli(p) ? 1 : 0;
    }
    return out;
}

/// k full Gibbs sweeps from v0, sweep order h|v then v|h. Returns the final
/// (v_k, h_k) pair, h_k being the hidden sample from the last sweep.
inline std::pair<VisibleState, HiddenState> gibbs_chain(const RbmParams& params, const VisibleState& v0,
                                                        std::size_t k, Rng& rng) {
    if (k < 1) throw std::invalid_argument("gibbs_chain: k must be >= 1");
    check_visible(params, v0);
    VisibleState v = v0;
    HiddenState h;
    for (std::size_t step = 0; step < k; ++step) {
        h = sample_bernoulli(hidden_conditional(params, v), rng);
        v = sample_bernoulli(visible_conditional(params, h), rng);
    }
    return {std::move(v), std::move(h)};
}

/// Free energy  F(v) = -sum_i b_i v_i - sum_j log(1 + exp(c_j + sum_i w_ij v_i)),
/// i.e. -log sum_h exp(-E(v,h)).
inline double free_energy(const RbmParams& params, const VisibleState& v) {
    const std::vector<double> act = hidden_activation(params, v);
    double bias = 0.0;
    for (std::size_t i = 0; i < params.num_visible; ++i)
        if (v[i]) bias += params.visible_bias[i];
    double hidden = 0.0;
    for (double a : act) hidden += softplus(a);
    return -bias - hidden;
}

namespace detail {

constexpr std::size_t kEnumerationLimit = 24;  // D + P above this is refused

inline void check_enumerable(const RbmParams& params) {
    if (params.num_visible + params.num_hidden > kEnumerationLimit)
        throw std::invalid_argument("model too large for exact enumeration (D + P > 24)");
}

/// Visible state for a bit mask, unit i = bit i.
inline VisibleState visible_from_mask(std::size_t D, std::uint32_t mask) {
    VisibleState v(D);
    for (std::size_t i = 0; i < D; ++i) v[i] = (mask >> i) & 1u;
    return v;
}

}  // namespace detail

/// log Z via log-sum-exp of -F(v) over all 2^D visible states. Marginalizing
/// the hidden layer analytically keeps this exact while only the visible
/// states are enumerated.
inline double log_exact_partition(const RbmParams& params) {
    detail::check_enumerable(params);
    const std::size_t D = params.num_visible;
    const std::uint64_t count = std::uint64_t(1) << D;
    double max_term = -std::numeric_limits<double>::infinity();
    std::vector<double> terms(count);
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        const double t = -free_energy(params, detail::visible_from_mask(D, std::uint32_t(mask)));
        terms[mask] = t;
        if (t > max_term) max_term = t;
    }
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - max_term);
    return max_term + std::log(sum);
}

/// Partition function Z, exact, for tiny models (D + P <= 24).
inline double exact_partition(const RbmParams& params) { return std::exp(log_exact_partition(params)); }

/// p(v) = exp(-F(v)) / Z, exact, for tiny models.
inline double exact_marginal(const RbmParams& params, const VisibleState& v) {
    detail::check_enumerable(params);
    return std::exp(-free_energy(params, v) - log_exact_partition(params));
}

}  // namespace rbmroll

#endif  // RBMROLL_RBM_HPP
