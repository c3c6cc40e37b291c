#include <catch2/catch_amalgamated.hpp>

#include "rbmroll/composer.hpp"
#include "support/oracles.hpp"

using namespace rbmroll;

namespace {

/// Window-shaped model (D = 13,824) with a small hidden layer and random
/// couplings on a sparse subset so tests stay fast.
RbmParams window_model(std::size_t hidden, double scale, std::uint64_t seed) {
    RbmParams params(kVisibleUnits, hidden);
    Rng rng(seed);
    for (double& w : params.weights) w = scale * rng.next_normal();
    for (double& b : params.visible_bias) b = 0.1 * rng.next_normal();
    for (double& c : params.hidden_bias) c = 0.1 * rng.next_normal();
    return params;
}

}  // namespace

TEST_CASE("compose_window with a zero budget is silent") {
    const RbmParams params = window_model(4, 0.01, 1);
    Rng rng(2);
    const PianoRoll window = compose_window(params, 0, rng);
    REQUIRE(window.is_window());
    REQUIRE(window.popcount() == 0);
}

TEST_CASE("compose_window grows the note count by one per step") {
    const RbmParams params = window_model(6, 0.05, 3);
    Rng rng(4);
    std::size_t steps_seen = 0;
    const PianoRoll window =
        compose_window(params, 40, rng, [&](std::size_t t, const VisibleState& v, const HiddenState& h) {
            std::size_t ones = 0;
            for (auto bit : v) ones += bit;
            REQUIRE(ones == t);
            REQUIRE(h.size() == 6);
            ++steps_seen;
        });
    REQUIRE(steps_seen == 40);
    REQUIRE(window.popcount() == 40);
}

TEST_CASE("compose_window is deterministic and validates N") {
    const RbmParams params = window_model(4, 0.05, 5);
    Rng a(9), b(9);
    REQUIRE(compose_window(params, 25, a) == compose_window(params, 25, b));
    Rng c(9);
    REQUIRE_THROWS_AS(compose_window(params, kVisibleUnits + 1, c), std::invalid_argument);

    RbmParams tiny(8, 2);
    Rng d(1);
    REQUIRE_THROWS_AS(compose_window(tiny, 1, d), std::invalid_argument);
}

TEST_CASE("top-k tie-breaking prefers the lowest flat index") {
    // Zero parameters give every cell probability 0.5, so the first t+1 flat
    // indices win at every step.
    const RbmParams params(kVisibleUnits, 2);
    Rng rng(11);
    const PianoRoll window = compose_window(params, 10, rng);
    const VisibleState v = flatten(window);
    for (std::size_t n = 0; n < 10; ++n) REQUIRE(v[n] == 1);
    for (std::size_t n = 10; n < v.size(); ++n) REQUIRE(v[n] == 0);
}

TEST_CASE("extend_window clamps the left measure bit-exactly") {
    const RbmParams params = window_model(6, 0.05, 7);
    Rng seed_rng(13);
    PianoRoll prev(kWindowColumns);
    for (auto& cell : prev.cells) cell = seed_rng.next_bernoulli(0.07) ? 1 : 0;

    Rng rng(17);
    std::size_t checked = 0;
    const PianoRoll out =
        extend_window(params, prev, 30, rng, [&](std::size_t t, const VisibleState& u, const HiddenState&) {
            // Left measure equals prev's right measure at every step.
            for (int row = 0; row < kPitchRows; ++row)
                for (int col = 0; col < kMeasureColumns; ++col)
                    REQUIRE(u[std::size_t(row) * kWindowColumns + col] == prev.at(row, col + kMeasureColumns));
            // The mutable half holds exactly t ones.
            std::size_t ones = 0;
            for (int row = 0; row < kPitchRows; ++row)
                for (int col = kMeasureColumns; col < kWindowColumns; ++col)
                    ones += u[std::size_t(row) * kWindowColumns + col];
            REQUIRE(ones == t);
            ++checked;
        });
    REQUIRE(checked == 30);

    for (int row = 0; row < kPitchRows; ++row)
        for (int col = 0; col < kMeasureColumns; ++col)
            REQUIRE(out.at(row, col) == prev.at(row, col + kMeasureColumns));

    std::size_t right_ones = 0;
    for (int row = 0; row < kPitchRows; ++row)
        for (int col = kMeasureColumns; col < kWindowColumns; ++col) right_ones += out.at(row, col);
    REQUIRE(right_ones == 30);
}

TEST_CASE("extend_window with a zero budget returns the clamp alone") {
    const RbmParams params = window_model(4, 0.05, 19);
    PianoRoll prev(kWindowColumns);
    prev.at(10, 100) = 1;
    prev.at(20, 191) = 1;
    Rng rng(23);
    const PianoRoll out = extend_window(params, prev, 0, rng);
    REQUIRE(out.at(10, 4) == 1);    // column 100 shifted left a measure
    REQUIRE(out.at(20, 95) == 1);   // column 191 shifted left a measure
    REQUIRE(out.popcount() == 2);
}

TEST_CASE("extend_window validates its budget and shape") {
    const RbmParams params = window_model(4, 0.05, 29);
    Rng rng(31);
    REQUIRE_THROWS_AS(extend_window(params, PianoRoll(96), 10, rng), std::invalid_argument);
    REQUIRE_THROWS_AS(extend_window(params, PianoRoll(kWindowColumns), kVisibleUnits / 2 + 1, rng),
                      std::invalid_argument);
}

TEST_CASE("compose_piece assembles the budgeted strip") {
    const RbmParams params = window_model(6, 0.05, 37);

    ComposeConfig two_measures;
    two_measures.initial_budget = 50;
    two_measures.extensions = 0;
    two_measures.seed = 41;
    const PianoRoll short_strip = compose_piece(params, two_measures);
    REQUIRE(short_strip.width == kWindowColumns);
    REQUIRE(short_strip.popcount() == 50);

    ComposeConfig eight_measures;
    eight_measures.initial_budget = 60;
    eight_measures.extension_budget = 25;
    eight_measures.extensions = 6;
    eight_measures.seed = 43;
    const PianoRoll strip = compose_piece(params, eight_measures);
    REQUIRE(strip.width == 768);
    REQUIRE(strip.width / kMeasureColumns == 8);
    REQUIRE(strip.popcount() == 60 + 6 * 25);

    // Deterministic in the seed.
    REQUIRE(compose_piece(params, eight_measures) == strip);
}
