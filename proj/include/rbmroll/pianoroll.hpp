#ifndef RBMROLL_PIANOROLL_HPP
#define RBMROLL_PIANOROLL_HPP

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "rbmroll/common.hpp"
#include "rbmroll/idx.hpp"
#include "rbmroll/midi.hpp"
#include "rbmroll/rbm.hpp"

namespace rbmroll {

// Piano-roll geometry. 72 pitch rows cover C1 (MIDI 24, bottom row) up to
// B6 (MIDI 95, top row); one column is 1/24 quarter note, so a 4/4 measure
// is 96 columns and a two-measure window is 192, giving 13,824 cells.
constexpr int kPitchRows = 72;
constexpr int kTopPitch = 95;     // B6, row 0
constexpr int kBottomPitch = 24;  // C1, row 71
constexpr int kColumnsPerQuarter = 24;
constexpr int kMeasureColumns = 96;
constexpr int kWindowColumns = 192;
constexpr std::size_t kVisibleUnits = std::size_t(kPitchRows) * kWindowColumns;  // 13,824

constexpr int pitch_to_row(int pitch) { return kTopPitch - pitch; }
constexpr int row_to_pitch(int row) { return kTopPitch - row; }

/// Binary pitch-time grid, 72 rows by `width` columns, row-major storage.
struct PianoRoll {
    int width = 0;
    std::vector<std::uint8_t> cells;  // kPitchRows * width, cells[row * width + col]

    PianoRoll() = default;
    explicit PianoRoll(int w) : width(w), cells(std::size_t(kPitchRows) * w, 0) {}

    std::uint8_t& at(int row, int col) { return cells[std::size_t(row) * width + col]; }
    std::uint8_t at(int row, int col) const { return cells[std::size_t(row) * width + col]; }

    bool is_window() const { return width == kWindowColumns; }

    std::size_t popcount() const {
        std::size_t n = 0;
        for (std::uint8_t c : cells) n += c;
        return n;
    }

    friend bool operator==(const PianoRoll&, const PianoRoll&) = default;
};

/// Row-major flattening of a two-measure window into a visible state.
inline VisibleState flatten(const PianoRoll& window) {
    if (!window.is_window()) throw std::invalid_argument("flatten: not a 192-column window");
    return window.cells;
}

inline PianoRoll unflatten(const VisibleState& v) {
    if (v.size() != kVisibleUnits) throw std::invalid_argument("unflatten: state length is not 13,824");
    PianoRoll window(kWindowColumns);
    window.cells = v;
    return window;
}

/// Where a window came from: source file id, measure index within the strip,
/// transposition applied.
struct WindowProvenance {
    std::string source;
    int measure_index = 0;
    int shift = 0;
};

struct RollDataset {
    std::vector<PianoRoll> windows;
    std::vector<WindowProvenance> provenance;

    std::size_t size() const { return windows.size(); }
};

struct RasterizeStats {
    std::size_t dropped_notes = 0;  // pitch outside C1..B6
};

namespace roll_detail {

/// round(t * 24 / tpq) with round-half-up, in exact integer arithmetic.
inline long ticks_to_column(long ticks, long tpq) { return (2 * ticks * kColumnsPerQuarter + tpq) / (2 * tpq); }

inline int round_up_to_measure(long columns) {
    return int((columns + kMeasureColumns - 1) / kMeasureColumns) * kMeasureColumns;
}

}  // namespace roll_detail

/// Rasterizes a 4/4 score into a full-length strip at 24 columns per quarter.
/// Notes outside C1..B6 are dropped and counted; overlaps OR together; every
/// retained note covers at least one column. Strip width is the score length
/// in columns rounded up to a whole measure.
inline PianoRoll rasterize(const Score& score, RasterizeStats* stats = nullptr) {
    if (!is_common_time(score)) throw std::invalid_argument("rasterize: score is not in 4/4 time");
    const long tpq = score.ticks_per_quarter;
    if (tpq < 1) throw std::invalid_argument("rasterize: ticks_per_quarter must be positive");

    long total_ticks = 0;
    for (const NoteEvent& note : score.notes) total_ticks = std::max(total_ticks, note.onset + note.duration);
    const long total_columns = (total_ticks * kColumnsPerQuarter + tpq - 1) / tpq;  // ceil
    PianoRoll strip(roll_detail::round_up_to_measure(total_columns));

    RasterizeStats local;
    for (const NoteEvent& note : score.notes) {
        if (note.pitch < kBottomPitch || note.pitch > kTopPitch) {
            ++local.dropped_notes;
            continue;
        }
        const int row = pitch_to_row(note.pitch);
        const long start = roll_detail::ticks_to_column(note.onset, tpq);
        long end = roll_detail::ticks_to_column(note.onset + note.duration, tpq);
        if (end <= start) end = start + 1;  // sub-resolution notes keep one column
        for (long col = start; col < end && col < strip.width; ++col) strip.at(row, int(col)) = 1;
    }
    if (stats) *stats = local;
    return strip;
}

/// Cuts a strip into consecutive non-overlapping two-measure windows. A
/// trailing single measure is dropped.
inline std::vector<PianoRoll> segment(const PianoRoll& strip) {
    if (strip.width % kMeasureColumns != 0)
        throw std::invalid_argument("segment: strip width is not a multiple of 96");
    std::vector<PianoRoll> windows;
    for (int start = 0; start + kWindowColumns <= strip.width; start += kWindowColumns) {
        PianoRoll window(kWindowColumns);
        for (int row = 0; row < kPitchRows; ++row)
            for (int col = 0; col < kWindowColumns; ++col) window.at(row, col) = strip.at(row, start + col);
        windows.push_back(std::move(window));
    }
    return windows;
}

/// Shifts every set cell up by `semitones` rows of pitch (positive = up).
/// Returns nothing if any note would leave the C1..B6 range.
inline std::optional<PianoRoll> transpose_roll(const PianoRoll& window, int semitones) {
    if (semitones == 0) return window;
    PianoRoll out(window.width);
    for (int row = 0; row < kPitchRows; ++row) {
        for (int col = 0; col < window.width; ++col) {
            if (!window.at(row, col)) continue;
            const int target = row - semitones;  // up in pitch = toward row 0
            if (target < 0 || target >= kPitchRows) return std::nullopt;
            out.at(target, col) = 1;
        }
    }
    return out;
}

/// The augmentation schedule: 6 semitones up, 5 down.
inline std::vector<int> default_shifts() { return {-5, -4, -3, -2, -1, +1, +2, +3, +4, +5, +6}; }

/// Expands a dataset with transposed copies. Every window contributes its
/// original plus one copy per shift that stays in range; provenance records
/// the shift.
inline RollDataset augment(const RollDataset& dataset, const std::vector<int>& shifts = default_shifts()) {
    RollDataset out;
    for (std::size_t n = 0; n < dataset.windows.size(); ++n) {
        const WindowProvenance base =
            n < dataset.provenance.size() ? dataset.provenance[n] : WindowProvenance{};
        out.windows.push_back(dataset.windows[n]);
        out.provenance.push_back({base.source, base.measure_index, 0});
        for (int shift : shifts) {
            auto shifted = transpose_roll(dataset.windows[n], shift);
            if (!shifted) continue;
            out.windows.push_back(std::move(*shifted));
            out.provenance.push_back({base.source, base.measure_index, shift});
        }
    }
    return out;
}

/// Nearest-neighbor resize to window shape, then binarize at `threshold`
/// (pixel >= threshold becomes a note-on).
inline PianoRoll resize_binary(const GrayImage& img, std::uint8_t threshold = 128) {
    if (img.width == 0 || img.height == 0) throw std::invalid_argument("resize_binary: empty image");
    PianoRoll window(kWindowColumns);
    for (int row = 0; row < kPitchRows; ++row) {
        const std::size_t src_row = std::size_t(row) * img.height / kPitchRows;
        for (int col = 0; col < kWindowColumns; ++col) {
            const std::size_t src_col = std::size_t(col) * img.width / kWindowColumns;
            window.at(row, col) = img.at(src_row, src_col) >= threshold ? 1 : 0;
        }
    }
    return window;
}

/// Back-converts a roll to notes: every maximal horizontal run of set cells
/// becomes one note at 24 ticks per quarter (1 column = 1 tick). Adjacent
/// same-pitch notes with no gap merge; trailing empty measures are not
/// recoverable from the note list.
inline Score roll_to_score(const PianoRoll& roll) {
    Score score;
    score.ticks_per_quarter = kColumnsPerQuarter;
    score.time_signatures.push_back({0, 4, 4});
    for (int row = 0; row < kPitchRows; ++row) {
        int col = 0;
        while (col < roll.width) {
            if (!roll.at(row, col)) {
                ++col;
                continue;
            }
            int end = col;
            while (end < roll.width && roll.at(row, end)) ++end;
            score.notes.push_back({row_to_pitch(row), col, end - col});
            col = end;
        }
    }
    std::sort(score.notes.begin(), score.notes.end(),
              [](const NoteEvent& a, const NoteEvent& b) { return std::tie(a.onset, a.pitch) < std::tie(b.onset, b.pitch); });
    return score;
}

/// P4 PBM writer: 1 bit per cell, MSB first, rows padded to whole bytes.
inline Bytes write_pbm(const PianoRoll& roll) {
    ByteWriter w;
    w.text("P4\n" + std::to_string(roll.width) + " " + std::to_string(kPitchRows) + "\n");
    const int row_bytes = (roll.width + 7) / 8;
    for (int row = 0; row < kPitchRows; ++row) {
        for (int byte_index = 0; byte_index < row_bytes; ++byte_index) {
            std::uint8_t packed = 0;
            for (int bit = 0; bit < 8; ++bit) {
                const int col = byte_index * 8 + bit;
                if (col < roll.width && roll.at(row, col)) packed |= std::uint8_t(0x80u >> bit);
            }
            w.u8(packed);
        }
    }
    return w.take();
}

/// P4 PBM reader for rolls: height must be 72 and width a multiple of 96.
inline PianoRoll read_pbm(std::span<const std::uint8_t> bytes) {
    std::size_t pos = 0;
    auto skip_space = [&]() {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(int(bytes[pos]))) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto read_number = [&]() -> long {
        skip_space();
        long value = -1;
        while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
            if (value < 0) value = 0;
            value = value * 10 + (bytes[pos++] - '0');
            if (value > 1000000) throw ParseError("PBM dimension out of range");
        }
        if (value < 0) throw ParseError("malformed PBM header");
        return value;
    };

    if (bytes.size() < 2 || bytes[0] != 'P') throw ParseError("not a PBM file");
    if (bytes[1] == '1') throw ParseError("unsupported PBM variant (ASCII P1; expected binary P4)");
    if (bytes[1] != '4') throw ParseError("unsupported PBM variant (expected binary P4)");
    pos = 2;
    const long width = read_number();
    const long height = read_number();
    ++pos;  // single whitespace byte before the raster
    if (height != kPitchRows) throw ParseError("PBM height must be 72 pitch rows");
    if (width < kMeasureColumns || width % kMeasureColumns != 0)
        throw ParseError("PBM width must be a positive multiple of 96");

    const int row_bytes = int((width + 7) / 8);
    if (bytes.size() - pos < std::size_t(row_bytes) * kPitchRows) throw ParseError("truncated PBM payload");
    PianoRoll roll{int(width)};
    for (int row = 0; row < kPitchRows; ++row) {
        for (int col = 0; col < width; ++col) {
            const std::uint8_t byte = bytes[pos + std::size_t(row) * row_bytes + col / 8];
            roll.at(row, col) = (byte >> (7 - col % 8)) & 1u;
        }
    }
    return roll;
}

}  // namespace rbmroll

#endif  // RBMROLL_PIANOROLL_HPP
