#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rbmroll/random.hpp"
#include "rbmroll/tsne.hpp"

using namespace rbmroll;

namespace {

std::vector<std::vector<double>> random_points(std::size_t n, std::size_t dims, Rng& rng) {
    std::vector<std::vector<double>> points(n, std::vector<double>(dims));
    for (auto& p : points)
        for (double& x : p) x = rng.next_normal();
    return points;
}

/// Three well-separated Gaussian clusters in high dimension.
std::vector<std::vector<double>> clustered_points(std::size_t per_cluster, std::size_t dims, double separation,
                                                  Rng& rng) {
    std::vector<std::vector<double>> points;
    for (int cluster = 0; cluster < 3; ++cluster) {
        std::vector<double> center(dims, 0.0);
        center[cluster] = separation;
        for (std::size_t n = 0; n < per_cluster; ++n) {
            std::vector<double> p(dims);
            for (std::size_t d = 0; d < dims; ++d) p[d] = center[d] + rng.next_normal();
            points.push_back(std::move(p));
        }
    }
    return points;
}

/// Mean silhouette over 2-D points with known cluster labels.
double silhouette(const std::vector<std::array<double, 2>>& points, const std::vector<int>& labels) {
    const std::size_t n = points.size();
    auto distance = [&](std::size_t a, std::size_t b) {
        const double dx = points[a][0] - points[b][0];
        const double dy = points[a][1] - points[b][1];
        return std::sqrt(dx * dx + dy * dy);
    };
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double own = 0.0;
        std::size_t own_count = 0;
        double best_other = 1e300;
        for (int cluster = 0; cluster < 3; ++cluster) {
            double sum = 0.0;
            std::size_t count = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (labels[j] != cluster || j == i) continue;
                sum += distance(i, j);
                ++count;
            }
            if (cluster == labels[i]) {
                own = sum / double(count);
                own_count = count;
            } else {
                best_other = std::min(best_other, sum / double(count));
            }
        }
        (void)own_count;
        total += (best_other - own) / std::max(best_other, own);
    }
    return total / double(n);
}

double row_perplexity(const std::vector<double>& conditional, std::size_t n, std::size_t i) {
    double entropy = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double p = conditional[i * n + j];
        if (p > 0.0) entropy -= p * std::log(p);
    }
    return std::exp(entropy);
}

}  // namespace

TEST_CASE("three equidistant points get uniform conditional affinities") {
    // One-hot corners are mutually equidistant in exact arithmetic; every
    // off-diagonal conditional is 1/2 and the true row perplexity is 2.
    std::vector<std::vector<double>> points{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
    const auto conditional = tsne_conditional_affinities(points, 2.0);
    for (std::size_t i = 0; i < 3; ++i) {
        REQUIRE(conditional[i * 3 + i] == 0.0);
        for (std::size_t j = 0; j < 3; ++j)
            if (j != i) REQUIRE(conditional[i * 3 + j] == Catch::Approx(0.5).margin(1e-9));
    }
}

TEST_CASE("bandwidth search hits the target perplexity within 1e-5") {
    Rng rng(77);
    const auto points = random_points(40, 8, rng);
    for (double perplexity : {5.0, 10.0, 20.0}) {
        const auto conditional = tsne_conditional_affinities(points, perplexity);
        for (std::size_t i = 0; i < points.size(); ++i)
            REQUIRE(row_perplexity(conditional, points.size(), i) == Catch::Approx(perplexity).margin(1e-5));
    }
}

TEST_CASE("joint affinities are symmetric, nonnegative, zero-diagonal, and sum to one") {
    Rng rng(99);
    const auto points = random_points(30, 5, rng);
    const auto joint = tsne_joint_affinities(points, 8.0);
    const std::size_t n = points.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        REQUIRE(joint[i * n + i] == 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            REQUIRE(joint[i * n + j] >= 0.0);
            REQUIRE(joint[i * n + j] == Catch::Approx(joint[j * n + i]).margin(1e-15));
            sum += joint[i * n + j];
        }
    }
    REQUIRE(sum == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("tsne returns one 2-D point per input and is deterministic") {
    Rng rng(123);
    const auto points = random_points(25, 6, rng);
    const auto a = tsne(points, 8.0, 100, 42);
    const auto b = tsne(points, 8.0, 100, 42);
    REQUIRE(a.size() == 25);
    REQUIRE(a == b);
    const auto c = tsne(points, 8.0, 100, 43);
    REQUIRE(a != c);
}

TEST_CASE("tsne rejects degenerate inputs") {
    std::vector<std::vector<double>> two{{0.0}, {1.0}};
    REQUIRE_THROWS_AS(tsne(two, 1.0, 10, 1), std::invalid_argument);

    Rng rng(5);
    const auto points = random_points(10, 3, rng);
    REQUIRE_THROWS_AS(tsne(points, 10.0, 10, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(tsne(points, 25.0, 10, 1), std::invalid_argument);

    std::vector<std::vector<double>> identical(5, std::vector<double>{1.0, 2.0});
    REQUIRE_THROWS_AS(tsne(identical, 2.0, 10, 1), std::invalid_argument);
}

TEST_CASE("three separated clusters embed with silhouette above 0.5") {
    Rng rng(2718);
    const auto points = clustered_points(30, 50, 10.0, rng);
    std::vector<int> labels;
    for (int cluster = 0; cluster < 3; ++cluster)
        for (int n = 0; n < 30; ++n) labels.push_back(cluster);

    std::vector<double> kl_trace;
    const auto embedded = tsne(points, 10.0, 1000, 7, &kl_trace);
    REQUIRE(embedded.size() == 90);
    REQUIRE(kl_trace.size() == 1000);
    REQUIRE(silhouette(embedded, labels) > 0.5);
    // The optimizer should have made progress overall even though momentum
    // breaks per-step monotonicity.
    REQUIRE(kl_trace.back() < kl_trace.front());
}
