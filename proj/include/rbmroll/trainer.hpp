#ifndef RBMROLL_TRAINER_HPP
#define RBMROLL_TRAINER_HPP

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rbmroll/parallel.hpp"
#include "rbmroll/random.hpp"
#include "rbmroll/rbm.hpp"

namespace rbmroll {

/// Parameter-shaped gradient estimate (dW, db, dc).
struct GradientTriple {
    std::vector<double> d_weights;       // D x P row-major
    std::vector<double> d_visible_bias;  // D
    std::vector<double> d_hidden_bias;   // P

    GradientTriple() = default;
    GradientTriple(std::size_t D, std::size_t P)
        : d_weights(D * P, 0.0), d_visible_bias(D, 0.0), d_hidden_bias(P, 0.0) {}
};

struct TrainConfig {
    std::size_t hidden_units = 1000;
    std::size_t cd_steps = 1;
    double learning_rate = 0.01;
    std::size_t epochs = 50;
    std::size_t batch_size = 64;
    std::uint64_t seed = 0;
    double weight_init_stddev = 0.01;
};

/// One record per completed epoch.
struct EpochRecord {
    // Mean pixel mismatch between each item and the thresholded mean at the
    // end of its CD chain (the reconstruct() convention).
    double reconstruction_error = 0.0;
    double holdout_free_energy = 0.0;  // mean free energy of the monitoring batch
    double seconds = 0.0;
};

struct TrainReport {
    std::vector<EpochRecord> epochs;
};

namespace detail {

inline std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t n) {
    std::uint64_t h = 1469598103934665603ull;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= data[i];
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace detail

/// CD-k gradient over a batch. Positive phase pairs each data vector with its
/// hidden conditional probabilities; the negative phase runs a k-step sampled
/// Gibbs chain from the data and again uses hidden probabilities at the chain
/// end. Sign convention: ascending this gradient decreases KL[q || p].
///
/// Each item's chain gets its own substream keyed by the item's content, so
/// the estimate for a batch of identical items equals the single-item
/// estimate and is independent of batch order.
inline GradientTriple cd_gradient(const RbmParams& params, std::span<const VisibleState> batch, std::size_t k,
                                  Rng& rng) {
    if (batch.empty()) throw std::invalid_argument("cd_gradient: empty batch");
    if (k < 1) throw std::invalid_argument("cd_gradient: k must be >= 1");
    const std::size_t D = params.num_visible;
    const std::size_t P = params.num_hidden;
    GradientTriple grad(D, P);
    const std::uint64_t base = rng.next_u64();
    for (const VisibleState& v : batch) {
        check_visible(params, v);
        Rng item_rng(base ^ detail::fnv1a64(v.data(), v.size()));
        const ProbVector h_data = hidden_conditional(params, v);
        const VisibleState v_model = gibbs_chain(params, v, k, item_rng).first;
        const ProbVector h_model = hidden_conditional(params, v_model);
        for (std::size_t i = 0; i < D; ++i) {
            double* row = grad.d_weights.data() + i * P;
            if (v[i])
                for (std::size_t j = 0; j < P; ++j) row[j] += h_data[j];
            if (v_model[i])
                for (std::size_t j = 0; j < P; ++j) row[j] -= h_model[j];
            grad.d_visible_bias[i] += double(v[i]) - double(v_model[i]);
        }
        for (std::size_t j = 0; j < P; ++j) grad.d_hidden_bias[j] += h_data[j] - h_model[j];
    }
    const double inv = 1.0 / double(batch.size());
    for (double& g : grad.d_weights) g *= inv;
    for (double& g : grad.d_visible_bias) g *= inv;
    for (double& g : grad.d_hidden_bias) g *= inv;
    return grad;
}

/// Exact gradient of -KL[q || p] for tiny models: positive phase is the data
/// expectation of (v, p(h|v)) statistics, negative phase the model
/// expectation obtained by enumerating every visible state.
inline GradientTriple exact_gradient(const RbmParams& params, std::span<const VisibleState> data) {
    detail::check_enumerable(params);
    if (data.empty()) throw std::invalid_argument("exact_gradient: empty data");
    const std::size_t D = params.num_visible;
    const std::size_t P = params.num_hidden;
    GradientTriple grad(D, P);

    auto accumulate = [&](const VisibleState& v, double weight) {
        const ProbVector h = hidden_conditional(params, v);
        for (std::size_t i = 0; i < D; ++i) {
            if (!v[i]) continue;
            double* row = grad.d_weights.data() + i * P;
            for (std::size_t j = 0; j < P; ++j) row[j] += weight * h[j];
            grad.d_visible_bias[i] += weight;
        }
        for (std::size_t j = 0; j < P; ++j) grad.d_hidden_bias[j] += weight * h[j];
    };

    const double data_weight = 1.0 / double(data.size());
    for (const VisibleState& v : data) {
        check_visible(params, v);
        accumulate(v, data_weight);
    }

    const double log_z = log_exact_partition(params);
    const std::uint64_t count = std::uint64_t(1) << D;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        const VisibleState v = detail::visible_from_mask(D, std::uint32_t(mask));
        const double p = std::exp(-free_energy(params, v) - log_z);
        accumulate(v, -p);
    }
    return grad;
}

/// KL[q || p] with q the empirical distribution of `data`, exact for tiny
/// models. Nonnegative by Gibbs' inequality.
inline double exact_kl(const RbmParams& params, std::span<const VisibleState> data) {
    detail::check_enumerable(params);
    if (data.empty()) throw std::invalid_argument("exact_kl: empty data");
    const double log_z = log_exact_partition(params);

    // Empirical counts over the support of q.
    std::vector<std::pair<VisibleState, std::size_t>> support;
    for (const VisibleState& v : data) {
        check_visible(params, v);
        bool found = false;
        for (auto& [state, count] : support)
            if (state == v) {
                ++count;
                found = true;
                break;
            }
        if (!found) support.emplace_back(v, 1);
    }

    double kl = 0.0;
    const double n = double(data.size());
    for (const auto& [state, count] : support) {
        const double q = double(count) / n;
        const double log_p = -free_energy(params, state) - log_z;
        kl += q * (std::log(q) - log_p);
    }
    return kl;
}

/// Applies theta <- theta + lr * grad in place.
inline void apply_gradient(RbmParams& params, const GradientTriple& grad, double learning_rate) {
    for (std::size_t n = 0; n < params.weights.size(); ++n) params.weights[n] += learning_rate * grad.d_weights[n];
    for (std::size_t i = 0; i < params.num_visible; ++i)
        params.visible_bias[i] += learning_rate * grad.d_visible_bias[i];
    for (std::size_t j = 0; j < params.num_hidden; ++j)
        params.hidden_bias[j] += learning_rate * grad.d_hidden_bias[j];
}

/// Fresh parameters: W ~ Normal(0, stddev^2), biases zero.
inline RbmParams init_params(std::size_t D, std::size_t P, double weight_init_stddev, Rng& rng) {
    RbmParams params(D, P);
    for (double& w : params.weights) w = weight_init_stddev == 0.0 ? 0.0 : weight_init_stddev * rng.next_normal();
    return params;
}

namespace detail {

/// Per-epoch diagnostics accumulated while the CD chains run, so monitoring
/// adds no extra Gibbs passes.
struct EpochStats {
    std::size_t mismatched_pixels = 0;
    std::size_t total_pixels = 0;
};

}  // namespace detail

/// Continues CD training from existing parameters. The monitoring batch for
/// the free-energy column is the first min(batch_size, n) items of the
/// dataset in its given order; it is not excluded from training (it tracks
/// fit, not generalization).
///
/// `threads` parallelizes the per-item CD phase inside each minibatch. Item
/// chains use content-keyed substreams and the gradient is reduced serially
/// in item order, so the result is bit-identical for every thread count.
inline TrainReport train_from(RbmParams& params, std::span<const VisibleState> dataset, const TrainConfig& config,
                              std::size_t threads = 1) {
    if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
    const std::size_t D = params.num_visible;
    for (const VisibleState& v : dataset)
        if (v.size() != D) throw std::invalid_argument("train: dataset item length does not match D");
    if (config.batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
    if (config.learning_rate <= 0.0) throw std::invalid_argument("train: learning_rate must be positive");
    if (config.cd_steps < 1) throw std::invalid_argument("train: cd_steps must be >= 1");

    const std::size_t P = params.num_hidden;
    Rng rng(config.seed);
    Rng shuffle_rng = rng.split();
    Rng chain_rng = rng.split();

    const std::size_t monitor_count = std::min(config.batch_size, dataset.size());
    TrainReport report;
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);

    struct ItemPhase {
        ProbVector h_data;
        VisibleState v_model;
        ProbVector h_model;
        std::size_t recon_mismatch = 0;  // vs the thresholded mean at the chain end
    };
    std::vector<ItemPhase> phases(config.batch_size);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        shuffle_rng.shuffle(order);
        detail::EpochStats stats;

        std::size_t cursor = 0;
        while (cursor < order.size()) {
            const std::size_t take = std::min(config.batch_size, order.size() - cursor);
            const std::uint64_t base = chain_rng.next_u64();

            parallel_for(take, threads, [&](std::size_t begin, std::size_t end) {
                for (std::size_t n = begin; n < end; ++n) {
                    const VisibleState& v = dataset[order[cursor + n]];
                    Rng item_rng(base ^ detail::fnv1a64(v.data(), v.size()));
                    phases[n].h_data = hidden_conditional(params, v);
                    VisibleState v_chain = v;
                    ProbVector v_probs;
                    for (std::size_t step = 0; step < config.cd_steps; ++step) {
                        const HiddenState h = sample_bernoulli(hidden_conditional(params, v_chain), item_rng);
                        v_probs = visible_conditional(params, h);
                        v_chain = sample_bernoulli(v_probs, item_rng);
                    }
                    phases[n].recon_mismatch = 0;
                    for (std::size_t i = 0; i < D; ++i)
                        phases[n].recon_mismatch += std::size_t(v[i] != (v_probs[i] >= 0.5 ? 1 : 0));
                    phases[n].v_model = std::move(v_chain);
                    phases[n].h_model = hidden_conditional(params, phases[n].v_model);
                }
            });

            GradientTriple grad(D, P);
            for (std::size_t n = 0; n < take; ++n) {
                const VisibleState& v = dataset[order[cursor + n]];
                const ItemPhase& phase = phases[n];
                for (std::size_t i = 0; i < D; ++i) {
                    double* row = grad.d_weights.data() + i * P;
                    if (v[i])
                        for (std::size_t j = 0; j < P; ++j) row[j] += phase.h_data[j];
                    if (phase.v_model[i])
                        for (std::size_t j = 0; j < P; ++j) row[j] -= phase.h_model[j];
                    grad.d_visible_bias[i] += double(v[i]) - double(phase.v_model[i]);
                }
                for (std::size_t j = 0; j < P; ++j) grad.d_hidden_bias[j] += phase.h_data[j] - phase.h_model[j];
                stats.mismatched_pixels += phase.recon_mismatch;
                stats.total_pixels += D;
            }
            const double scale = config.learning_rate / double(take);
            for (std::size_t n = 0; n < params.weights.size(); ++n) params.weights[n] += scale * grad.d_weights[n];
            for (std::size_t i = 0; i < D; ++i) params.visible_bias[i] += scale * grad.d_visible_bias[i];
            for (std::size_t j = 0; j < P; ++j) params.hidden_bias[j] += scale * grad.d_hidden_bias[j];
            cursor += take;
        }

        EpochRecord record;
        record.reconstruction_error =
            stats.total_pixels == 0 ? 0.0 : double(stats.mismatched_pixels) / double(stats.total_pixels);
        double fe = 0.0;
        for (std::size_t n = 0; n < monitor_count; ++n) fe += free_energy(params, dataset[n]);
        record.holdout_free_energy = fe / double(monitor_count);
        record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        report.epochs.push_back(record);
    }
    return report;
}

/// Full training run: initialize, then CD-k over shuffled minibatches.
/// Deterministic given (dataset, config).
inline std::pair<RbmParams, TrainReport> train(std::span<const VisibleState> dataset, const TrainConfig& config) {
    if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
    Rng init_rng(config.seed ^ 0x9D2C5680AAD137EEull);
    RbmParams params = init_params(dataset.front().size(), config.hidden_units, config.weight_init_stddev, init_rng);
    TrainReport report = train_from(params, dataset, config);
    return {std::move(params), std::move(report)};
}

/// k Gibbs sweeps from v; the final visible layer is the thresholded mean of
/// the last sweep, with the 0.5 tie resolving to 1.
inline VisibleState reconstruct(const RbmParams& params, const VisibleState& v, std::size_t k, Rng& rng) {
    if (k < 1) throw std::invalid_argument("reconstruct: k must be >= 1");
    check_visible(params, v);
    VisibleState current = v;
    HiddenState h;
    for (std::size_t step = 0; step + 1 < k; ++step) {
        h = sample_bernoulli(hidden_conditional(params, current), rng);
        current = sample_bernoulli(visible_conditional(params, h), rng);
    }
    h = sample_bernoulli(hidden_conditional(params, current), rng);
    const ProbVector mean = visible_conditional(params, h);
    VisibleState out(mean.size());
    for (std::size_t i = 0; i < mean.size(); ++i) out[i] = mean[i] >= 0.5 ? 1 : 0;
    return out;
}

}  // namespace rbmroll

#endif  // RBMROLL_TRAINER_HPP
