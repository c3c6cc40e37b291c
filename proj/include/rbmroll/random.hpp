#ifndef RBMROLL_RANDOM_HPP
#define RBMROLL_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace rbmroll {

/// Counter-based deterministic random stream (splitmix64). The same seed
/// always produces the same stream, on any platform, and split() derives an
/// independent child stream so parallel consumers stay reproducible without
/// sharing state.
///
/// std::uniform_real_distribution and friends are implementation-defined, so
/// everything downstream of a seed goes through this class instead.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53 bits of entropy.
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    bool next_bernoulli(double p) { return next_double() < p; }

    /// Uniform integer in [0, n). Fixed-point multiply keeps the draw
    /// deterministic; the bias for n << 2^64 is negligible.
    std::uint64_t next_below(std::uint64_t n) {
        return std::uint64_t((static_cast<__uint128_t>(next_u64()) * n) >> 64);
    }

    /// Standard normal via Box-Muller. Consumes two uniforms per pair of
    /// draws; the spare is cached.
    double next_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        double u2 = next_double();
        // Avoid log(0).
        while (u1 == 0.0) u1 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    /// Child stream seeded from the next output. Parent advances by one
    /// step; child and parent streams are disjoint for practical purposes.
    Rng split() { return Rng(next_u64()); }

    /// In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = std::size_t(next_below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace rbmroll

#endif  // RBMROLL_RANDOM_HPP
