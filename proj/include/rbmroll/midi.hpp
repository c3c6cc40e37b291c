#ifndef RBMROLL_MIDI_HPP
#define RBMROLL_MIDI_HPP

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "rbmroll/common.hpp"

namespace rbmroll {

struct NoteEvent {
    int pitch = 0;       // MIDI note number 0..127
    long onset = 0;      // ticks, >= 0
    long duration = 1;   // ticks, >= 1

    friend bool operator==(const NoteEvent&, const NoteEvent&) = default;
    friend auto operator<=>(const NoteEvent&, const NoteEvent&) = default;
};

struct TimeSignature {
    long tick = 0;
    int numerator = 4;
    int denominator = 4;

    friend bool operator==(const TimeSignature&, const TimeSignature&) = default;
};

/// Note list plus the metric context needed to rasterize it. Notes are kept
/// sorted by (onset, pitch).
struct Score {
    std::vector<NoteEvent> notes;
    long ticks_per_quarter = 480;
    std::vector<TimeSignature> time_signatures;
};

/// Ingest diagnostics the Score type itself does not carry.
struct MidiParseStats {
    std::size_t dangling_note_ons = 0;     // note-ons never closed; dropped
    std::size_t percussion_notes = 0;      // channel-10 notes; dropped
};

namespace midi_detail {

inline std::uint32_t read_vlq(ByteReader& r) {
    std::uint32_t value = 0;
    for (int i = 0; i < 4; ++i) {
        const std::uint8_t byte = r.u8();
        value = (value << 7) | (byte & 0x7F);
        if (!(byte & 0x80)) return value;
    }
    throw ParseError("variable-length quantity longer than four bytes");
}

inline void write_vlq(ByteWriter& w, std::uint32_t value) {
    if (value > 0x0FFFFFFF) throw std::invalid_argument("delta time exceeds VLQ range");
    std::uint8_t stack[4];
    int n = 0;
    stack[n++] = value & 0x7F;
    while (value >>= 7) stack[n++] = 0x80 | (value & 0x7F);
    while (n--) w.u8(stack[n]);
}

constexpr int kPercussionChannel = 9;  // "channel 10" in 1-based MIDI talk

struct TrackResult {
    std::vector<NoteEvent> notes;
    std::vector<TimeSignature> time_signatures;
};

/// Parses one MTrk payload. Notes are paired FIFO per (channel, pitch);
/// note-on with velocity zero counts as note-off.
inline TrackResult parse_track(std::span<const std::uint8_t> payload, MidiParseStats& stats) {
    TrackResult out;
    ByteReader r(payload);
    long tick = 0;
    int running_status = -1;
    std::map<std::pair<int, int>, std::deque<long>> open;  // (channel, pitch) -> onset ticks

    auto close_note = [&](int channel, int pitch, long off_tick) {
        auto it = open.find({channel, pitch});
        if (it == open.end() || it->second.empty()) return;  // unmatched note-off, ignored
        const long onset = it->second.front();
        it->second.pop_front();
        if (channel == kPercussionChannel) {
            ++stats.percussion_notes;
            return;
        }
        out.notes.push_back({pitch, onset, std::max(1L, off_tick - onset)});
    };

    while (!r.at_end()) {
        tick += long(read_vlq(r));
        const std::uint8_t lead = r.u8();

        int status;
        int data1 = -1;
        if (lead & 0x80) {
            status = lead;
        } else {
            if (running_status < 0) throw ParseError("data byte without running status");
            status = running_status;
            data1 = lead;  // first data byte already consumed
        }

        if (status == 0xFF) {
            running_status = -1;
            const int type = r.u8();
            const std::uint32_t length = read_vlq(r);
            auto data = r.bytes(length);
            if (type == 0x58 && length >= 2) {
                out.time_signatures.push_back({tick, int(data[0]), 1 << int(data[1])});
            } else if (type == 0x2F) {
                break;  // end of track
            }
            continue;
        }
        if (status == 0xF0 || status == 0xF7) {
            running_status = -1;
            r.skip(read_vlq(r));
            continue;
        }
        if (status >= 0xF1) throw ParseError("unsupported system message in track");

        running_status = status;
        const int kind = status & 0xF0;
        const int channel = status & 0x0F;
        if (data1 < 0) data1 = r.u8();
        if (kind == 0xC0 || kind == 0xD0) continue;  // single data byte events
        const int data2 = r.u8();
        if (kind == 0x90) {
            if (data2 > 0)
                open[{channel, data1}].push_back(tick);
            else
                close_note(channel, data1, tick);
        } else if (kind == 0x80) {
            close_note(channel, data1, tick);
        }
        // 0xA0/0xB0/0xE0 carry two data bytes and are otherwise ignored.
    }

    for (auto& [key, onsets] : open) stats.dangling_note_ons += onsets.size();
    return out;
}

}  // namespace midi_detail

/// Parses an SMF format 0 or 1 file. All tracks are merged, percussion
/// (channel 10) is dropped, and notes come back sorted by (onset, pitch).
/// Dangling note-ons are dropped and counted in `stats` when provided.
inline Score parse_midi(std::span<const std::uint8_t> bytes, MidiParseStats* stats = nullptr) {
    ByteReader r(bytes);
    MidiParseStats local_stats;

    auto magic = r.bytes(4);
    if (!std::equal(magic.begin(), magic.end(), "MThd")) throw ParseError("bad SMF header magic");
    const std::uint32_t header_length = r.u32be();
    if (header_length < 6) throw ParseError("SMF header too short");
    const std::uint16_t format = r.u16be();
    const std::uint16_t track_count = r.u16be();
    const std::uint16_t division = r.u16be();
    r.skip(header_length - 6);
    if (format > 1) throw ParseError("unsupported SMF format (only 0 and 1)");
    if (division & 0x8000) throw ParseError("SMPTE time division not supported");
    if (division == 0) throw ParseError("ticks-per-quarter must be positive");

    Score score;
    score.ticks_per_quarter = division;

    std::size_t tracks_seen = 0;
    while (tracks_seen < track_count && !r.at_end()) {
        auto chunk_type = r.bytes(4);
        const std::uint32_t chunk_length = r.u32be();
        auto payload = r.bytes(chunk_length);
        if (!std::equal(chunk_type.begin(), chunk_type.end(), "MTrk")) continue;  // alien chunk, skipped
        ++tracks_seen;
        auto track = midi_detail::parse_track(payload, local_stats);
        score.notes.insert(score.notes.end(), track.notes.begin(), track.notes.end());
        score.time_signatures.insert(score.time_signatures.end(), track.time_signatures.begin(),
                                     track.time_signatures.end());
    }
    if (tracks_seen < track_count) throw ParseError("truncated SMF: missing track chunk");

    std::sort(score.notes.begin(), score.notes.end(),
              [](const NoteEvent& a, const NoteEvent& b) { return std::tie(a.onset, a.pitch) < std::tie(b.onset, b.pitch); });
    std::sort(score.time_signatures.begin(), score.time_signatures.end(),
              [](const TimeSignature& a, const TimeSignature& b) { return a.tick < b.tick; });
    if (stats) *stats = local_stats;
    return score;
}

/// True iff every time-signature event is 4/4. A score with no
/// time-signature events defaults to 4/4, per SMF convention.
inline bool is_common_time(const Score& score) {
    for (const TimeSignature& ts : score.time_signatures)
        if (ts.numerator != 4 || ts.denominator != 4) return false;
    return true;
}

/// Emits SMF format 0: one track, 4/4 meta, 120 BPM tempo meta, note-on
/// velocity 80. parse_midi(write_midi(s)) reproduces s.notes exactly as long
/// as no two notes of the same pitch overlap (FIFO pairing cannot tell such
/// overlaps apart).
inline Bytes write_midi(const Score& score) {
    if (score.ticks_per_quarter < 1 || score.ticks_per_quarter > 0x7FFF)
        throw std::invalid_argument("ticks_per_quarter outside SMF range");
    struct Event {
        long tick;
        bool is_on;
        int pitch;
    };
    std::vector<Event> events;
    events.reserve(score.notes.size() * 2);
    for (const NoteEvent& note : score.notes) {
        events.push_back({note.onset, true, note.pitch});
        events.push_back({note.onset + note.duration, false, note.pitch});
    }
    // Offs sort before ons at the same tick so back-to-back same-pitch notes
    // re-pair correctly.
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        return std::tie(a.tick, a.is_on, a.pitch) < std::tie(b.tick, b.is_on, b.pitch);
    });

    ByteWriter track;
    // Time signature 4/4 (24 MIDI clocks per metronome, 8 32nds per quarter).
    midi_detail::write_vlq(track, 0);
    for (std::uint8_t byte : {0xFF, 0x58, 0x04, 0x04, 0x02, 0x18, 0x08}) track.u8(byte);
    // Tempo 120 BPM = 500000 us per quarter.
    midi_detail::write_vlq(track, 0);
    for (std::uint8_t byte : {0xFF, 0x51, 0x03, 0x07, 0xA1, 0x20}) track.u8(byte);

    long cursor = 0;
    for (const Event& e : events) {
        midi_detail::write_vlq(track, std::uint32_t(e.tick - cursor));
        cursor = e.tick;
        track.u8(e.is_on ? 0x90 : 0x80);
        track.u8(std::uint8_t(e.pitch));
        track.u8(e.is_on ? 80 : 0);
    }
    midi_detail::write_vlq(track, 0);
    for (std::uint8_t byte : {0xFF, 0x2F, 0x00}) track.u8(byte);

    ByteWriter out;
    out.text("MThd");
    out.u32be(6);
    out.u16be(0);  // format 0
    out.u16be(1);  // one track
    out.u16be(std::uint16_t(score.ticks_per_quarter));
    out.text("MTrk");
    out.u32be(std::uint32_t(track.size()));
    out.bytes(track.data());
    return out.take();
}

}  // namespace rbmroll

#endif  // RBMROLL_MIDI_HPP
