#ifndef RBMROLL_TSNE_HPP
#define RBMROLL_TSNE_HPP

#include <array>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rbmroll/random.hpp"

namespace rbmroll {

/// Exact (non-approximated) t-SNE with the canonical optimizer settings:
/// early exaggeration 12 for the first 250 iterations, learning rate 200,
/// momentum 0.5 switching to 0.8 at iteration 250, adaptive per-coordinate
/// gains. Deterministic given the seed.
struct TsneSettings {
    double early_exaggeration = 12.0;
    std::size_t exaggeration_iters = 250;
    double learning_rate = 200.0;
    double initial_momentum = 0.5;
    double final_momentum = 0.8;
    std::size_t momentum_switch_iter = 250;
};

namespace tsne_detail {

inline std::vector<double> squared_distances(const std::vector<std::vector<double>>& points) {
    const std::size_t n = points.size();
    std::vector<double> d2(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < points[i].size(); ++k) {
                const double diff = points[i][k] - points[j][k];
                acc += diff * diff;
            }
            d2[i * n + j] = acc;
            d2[j * n + i] = acc;
        }
    }
    return d2;
}

/// Fills row i of the conditional affinity matrix for a given bandwidth
/// beta = 1/(2 sigma^2); returns the achieved perplexity exp(H). Distances
/// are shifted by the row minimum before exponentiating, which cancels in
/// the normalization but keeps large beta away from total underflow.
inline double row_affinities(const std::vector<double>& d2, std::size_t n, std::size_t i, double beta,
                             std::vector<double>& p) {
    double shift = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j)
        if (j != i) shift = std::min(shift, d2[i * n + j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        p[j] = j == i ? 0.0 : std::exp(-beta * (d2[i * n + j] - shift));
        sum += p[j];
    }
    if (sum < DBL_MIN) sum = DBL_MIN;
    double entropy = 0.0;  // in nats
    for (std::size_t j = 0; j < n; ++j) {
        p[j] /= sum;
        if (p[j] > DBL_MIN) entropy -= p[j] * std::log(p[j]);
    }
    return std::exp(entropy);
}

}  // namespace tsne_detail

/// Row-stochastic conditional affinities P(j|i) with per-point bandwidths
/// found by binary search so each row's perplexity matches the target to
/// within 1e-5. Zero diagonal; each row sums to 1.
inline std::vector<double> tsne_conditional_affinities(const std::vector<std::vector<double>>& points,
                                                       double perplexity) {
    const std::size_t n = points.size();
    if (n < 3) throw std::invalid_argument("t-SNE needs at least 3 points");
    if (!(perplexity > 0.0) || perplexity >= double(n))
        throw std::invalid_argument("perplexity must be positive and below the point count");

    const std::vector<double> d2 = tsne_detail::squared_distances(points);
    double max_d2 = 0.0;
    for (double d : d2) max_d2 = std::max(max_d2, d);
    if (max_d2 == 0.0) throw std::invalid_argument("t-SNE inputs are all identical");

    std::vector<double> conditional(n * n, 0.0);
    std::vector<double> row(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double beta = 1.0;
        double beta_min = 0.0;
        double beta_max = std::numeric_limits<double>::infinity();
        double achieved = tsne_detail::row_affinities(d2, n, i, beta, row);
        for (int iter = 0; iter < 200 && std::abs(achieved - perplexity) > 1e-5; ++iter) {
            if (achieved > perplexity) {  // too many effective neighbors: narrow the kernel
                beta_min = beta;
                beta = std::isinf(beta_max) ? beta * 2.0 : (beta + beta_max) / 2.0;
            } else {
                beta_max = beta;
                beta = (beta + beta_min) / 2.0;
            }
            achieved = tsne_detail::row_affinities(d2, n, i, beta, row);
        }
        for (std::size_t j = 0; j < n; ++j) conditional[i * n + j] = row[j];
    }
    return conditional;
}

/// Symmetrized joint affinities p_ij = (p(j|i) + p(i|j)) / 2n: symmetric,
/// nonnegative, zero diagonal, summing to 1.
inline std::vector<double> tsne_joint_affinities(const std::vector<std::vector<double>>& points, double perplexity) {
    const std::size_t n = points.size();
    std::vector<double> p = tsne_conditional_affinities(points, perplexity);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double joint = (p[i * n + j] + p[j * n + i]) / (2.0 * double(n));
            p[i * n + j] = joint;
            p[j * n + i] = joint;
        }
        p[i * n + i] = 0.0;
    }
    return p;
}

/// Embeds `points` into the plane by exact t-SNE. `kl_trace`, when given,
/// receives the KL divergence at every iteration (it is not monotone under
/// momentum). Throws on fewer than 3 points, perplexity >= count, or
/// all-identical inputs.
inline std::vector<std::array<double, 2>> tsne(const std::vector<std::vector<double>>& points, double perplexity,
                                               std::size_t iterations, std::uint64_t seed,
                                               std::vector<double>* kl_trace = nullptr,
                                               const TsneSettings& settings = {}) {
    const std::size_t n = points.size();
    std::vector<double> p = tsne_joint_affinities(points, perplexity);
    if (kl_trace) kl_trace->clear();

    // Early exaggeration.
    for (double& v : p) v *= settings.early_exaggeration;

    Rng rng(seed);
    std::vector<std::array<double, 2>> y(n);
    for (auto& point : y) {
        point[0] = 1e-4 * rng.next_normal();
        point[1] = 1e-4 * rng.next_normal();
    }

    std::vector<std::array<double, 2>> velocity(n, {0.0, 0.0});
    std::vector<std::array<double, 2>> gains(n, {1.0, 1.0});
    std::vector<double> numerator(n * n, 0.0);
    double momentum = settings.initial_momentum;

    for (std::size_t iter = 0; iter < iterations; ++iter) {
        // Student-t numerators and their total.
        double z = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double dx = y[i][0] - y[j][0];
                const double dy = y[i][1] - y[j][1];
                const double value = 1.0 / (1.0 + dx * dx + dy * dy);
                numerator[i * n + j] = value;
                numerator[j * n + i] = value;
                z += 2.0 * value;
            }
        }
        if (z < DBL_MIN) z = DBL_MIN;

        double kl = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double grad_x = 0.0, grad_y = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const double q = std::max(numerator[i * n + j] / z, DBL_MIN);
                const double mult = (p[i * n + j] - q) * numerator[i * n + j];
                grad_x += mult * (y[i][0] - y[j][0]);
                grad_y += mult * (y[i][1] - y[j][1]);
                if (kl_trace && p[i * n + j] > DBL_MIN) kl += p[i * n + j] * std::log(p[i * n + j] / q);
            }
            grad_x *= 4.0;
            grad_y *= 4.0;

            for (int d = 0; d < 2; ++d) {
                const double grad = d == 0 ? grad_x : grad_y;
                // Gains grow when gradient and velocity disagree in sign.
                const auto sign = [](double x) { return (x > 0.0) - (x < 0.0); };
                gains[i][d] = sign(grad) != sign(velocity[i][d]) ? gains[i][d] + 0.2 : gains[i][d] * 0.8;
                gains[i][d] = std::max(gains[i][d], 0.1);
                velocity[i][d] = momentum * velocity[i][d] - settings.learning_rate * gains[i][d] * grad;
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            y[i][0] += velocity[i][0];
            y[i][1] += velocity[i][1];
        }

        // Recenter.
        double mean_x = 0.0, mean_y = 0.0;
        for (const auto& point : y) {
            mean_x += point[0];
            mean_y += point[1];
        }
        mean_x /= double(n);
        mean_y /= double(n);
        for (auto& point : y) {
            point[0] -= mean_x;
            point[1] -= mean_y;
        }

        if (kl_trace) kl_trace->push_back(kl);

        if (iter + 1 == settings.exaggeration_iters)
            for (double& v : p) v /= settings.early_exaggeration;
        if (iter + 1 == settings.momentum_switch_iter) momentum = settings.final_momentum;
    }
    return y;
}

}  // namespace rbmroll

#endif  // RBMROLL_TSNE_HPP
