// Synthetic desk-scale fixtures: a diatonic 4/4 corpus (scales, arpeggios,
// triad progressions in many keys), white-noise windows, and blocky digit
// images standing in for MNIST when the real file is absent.
#ifndef RBMROLL_TESTS_FIXTURES_HPP
#define RBMROLL_TESTS_FIXTURES_HPP

#include <string>
#include <vector>

#include "rbmroll/idx.hpp"
#include "rbmroll/midi.hpp"
#include "rbmroll/pianoroll.hpp"
#include "rbmroll/random.hpp"

namespace fixtures {

using namespace rbmroll;

constexpr int kMajorDegrees[8] = {0, 2, 4, 5, 7, 9, 11, 12};
constexpr int kPatternCount = 6;

/// One two-measure 4/4 score (tpq 480, 3840 ticks) built from a diatonic
/// pattern on the given root pitch.
inline Score pattern_score(int root, int pattern) {
    Score score;
    score.ticks_per_quarter = 480;
    score.time_signatures.push_back({0, 4, 4});
    auto add = [&](int offset, long onset, long duration) { score.notes.push_back({root + offset, onset, duration}); };

    switch (pattern % kPatternCount) {
        case 0:  // ascending scale, quarters
            for (int n = 0; n < 8; ++n) add(kMajorDegrees[n], n * 480L, 480);
            break;
        case 1:  // descending scale, quarters
            for (int n = 0; n < 8; ++n) add(kMajorDegrees[7 - n], n * 480L, 480);
            break;
        case 2:  // up-down scale, eighths
            for (int n = 0; n < 8; ++n) add(kMajorDegrees[n], n * 240L, 240);
            for (int n = 0; n < 8; ++n) add(kMajorDegrees[7 - n], (8 + n) * 240L, 240);
            break;
        case 3: {  // I-IV-V-I triads, half notes
            const int chords[4][3] = {{0, 4, 7}, {5, 9, 12}, {7, 11, 14}, {0, 4, 7}};
            for (int c = 0; c < 4; ++c)
                for (int voice = 0; voice < 3; ++voice) add(chords[c][voice], c * 960L, 960);
            break;
        }
        case 4:  // broken-chord arpeggio, eighths
            for (int rep = 0; rep < 2; ++rep) {
                const int up[4] = {0, 4, 7, 12};
                for (int n = 0; n < 4; ++n) add(up[n], (rep * 8 + n) * 240L, 240);
                for (int n = 0; n < 4; ++n) add(up[3 - n], (rep * 8 + 4 + n) * 240L, 240);
            }
            break;
        default:  // scale in parallel thirds, quarters
            for (int n = 0; n < 8; ++n) {
                add(kMajorDegrees[n], n * 480L, 480);
                add(kMajorDegrees[n] + (n % 2 == 0 ? 4 : 3), n * 480L, 480);
            }
            break;
    }
    std::sort(score.notes.begin(), score.notes.end(), [](const NoteEvent& a, const NoteEvent& b) {
        return std::tie(a.onset, a.pitch) < std::tie(b.onset, b.pitch);
    });
    return score;
}

/// Exactly one 72x192 window per (root, pattern) pair.
inline PianoRoll pattern_window(int root, int pattern) {
    const auto windows = segment(rasterize(pattern_score(root, pattern)));
    return windows.front();
}

/// The training corpus: every pattern in 12 keys at two octaves, plus half
/// the patterns at a third register. All pitches stay clear of the C1/B6
/// edges so +-2 semitone probes remain in range.
inline std::vector<PianoRoll> training_corpus() {
    std::vector<PianoRoll> windows;
    for (int key = -5; key <= 6; ++key) {
        for (int pattern = 0; pattern < kPatternCount; ++pattern)
            for (int root : {48, 60}) windows.push_back(pattern_window(root + key, pattern));
        for (int pattern : {0, 2, 3}) windows.push_back(pattern_window(54 + key, pattern));
    }
    return windows;  // 12 * (6*2 + 3) = 180 windows
}

/// Held-out windows from the same distribution but disjoint (root, pattern)
/// combinations.
inline std::vector<PianoRoll> holdout_corpus() {
    std::vector<PianoRoll> windows;
    for (int key = -5; key <= 6; ++key)
        for (int pattern : {1, 4, 5}) windows.push_back(pattern_window(54 + key, pattern));
    return windows;  // 36 windows
}

inline PianoRoll noise_window(Rng& rng, double density = 0.5) {
    PianoRoll window(kWindowColumns);
    for (auto& cell : window.cells) cell = rng.next_bernoulli(density) ? 1 : 0;
    return window;
}

/// 28x28 grayscale digit from a 5x7 bitmap font, scaled 4x. Nothing like a
/// piano roll, which is the point.
inline GrayImage digit_image(int digit) {
    static const char* font[10][7] = {
        {" ### ", "#   #", "#  ##", "# # #", "##  #", "#   #", " ### "},  // 0
        {"  #  ", " ##  ", "  #  ", "  #  ", "  #  ", "  #  ", " ### "},  // 1
        {" ### ", "#   #", "    #", "  ## ", " #   ", "#    ", "#####"},  // 2
        {" ### ", "#   #", "    #", " ### ", "    #", "#   #", " ### "},  // 3
        {"   # ", "  ## ", " # # ", "#  # ", "#####", "   # ", "   # "},  // 4
        {"#####", "#    ", "#### ", "    #", "    #", "#   #", " ### "},  // 5
        {" ### ", "#    ", "#    ", "#### ", "#   #", "#   #", " ### "},  // 6
        {"#####", "    #", "   # ", "  #  ", " #   ", " #   ", " #   "},  // 7
        {" ### ", "#   #", "#   #", " ### ", "#   #", "#   #", " ### "},  // 8
        {" ### ", "#   #", "#   #", " ####", "    #", "    #", " ### "},  // 9
    };
    GrayImage img;
    img.width = 28;
    img.height = 28;
    img.pixels.assign(28 * 28, 0);
    for (int row = 0; row < 7; ++row)
        for (int col = 0; col < 5; ++col) {
            if (font[digit][row][col] != '#') continue;
            for (int dy = 0; dy < 4; ++dy)
                for (int dx = 0; dx < 4; ++dx) img.pixels[std::size_t(row * 4 + dy) * 28 + (4 + col * 4 + dx)] = 255;
        }
    return img;
}

}  // namespace fixtures

#endif  // RBMROLL_TESTS_FIXTURES_HPP
