#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "rbmroll/idx.hpp"
#include "rbmroll/midi.hpp"
#include "rbmroll/random.hpp"

using namespace rbmroll;

namespace {

/// Hand-assembled SMF0 file: one track containing the given event bytes.
Bytes smf0(const std::vector<std::uint8_t>& track_events, std::uint16_t tpq = 480) {
    ByteWriter w;
    w.text("MThd");
    w.u32be(6);
    w.u16be(0);
    w.u16be(1);
    w.u16be(tpq);
    w.text("MTrk");
    w.u32be(std::uint32_t(track_events.size()));
    w.bytes(track_events);
    return w.take();
}

Score random_score(Rng& rng) {
    Score score;
    score.ticks_per_quarter = 480;
    score.time_signatures.push_back({0, 4, 4});
    // One onset slot per (pitch, slot) pair avoids same-pitch overlap, which
    // FIFO off-pairing cannot round-trip.
    const int note_count = 1 + int(rng.next_below(12));
    for (int n = 0; n < note_count; ++n) {
        const int pitch = 24 + int(rng.next_below(72));
        const long slot = long(rng.next_below(16));
        const long duration = 1 + long(rng.next_below(480));
        score.notes.push_back({pitch, slot * 481, duration});
    }
    std::sort(score.notes.begin(), score.notes.end());
    score.notes.erase(std::unique(score.notes.begin(), score.notes.end(),
                                  [](const NoteEvent& a, const NoteEvent& b) {
                                      return a.pitch == b.pitch && a.onset == b.onset;
                                  }),
                      score.notes.end());
    std::sort(score.notes.begin(), score.notes.end(), [](const NoteEvent& a, const NoteEvent& b) {
        return std::tie(a.onset, a.pitch) < std::tie(b.onset, b.pitch);
    });
    return score;
}

}  // namespace

TEST_CASE("parse_midi reads a hand-encoded one-note file") {
    // delta 0, note-on ch0 pitch 60 vel 64; delta 480, note-off.
    const Bytes bytes = smf0({0x00, 0x90, 60, 64, 0x83, 0x60, 0x80, 60, 0, 0x00, 0xFF, 0x2F, 0x00});
    const Score score = parse_midi(bytes);
    REQUIRE(score.ticks_per_quarter == 480);
    REQUIRE(score.notes.size() == 1);
    REQUIRE(score.notes[0] == NoteEvent{60, 0, 480});
}

TEST_CASE("parse_midi handles running status and velocity-zero note-offs") {
    // Status 0x90 set once; the following events reuse it. The second pair
    // closes with a velocity-0 note-on.
    const Bytes bytes = smf0({0x00, 0x90, 60, 64,    // on at tick 0
                              0x60, 62, 64,          // running status on at tick 96
                              0x60, 60, 0,           // running status off (vel 0) at tick 192
                              0x60, 62, 0,           // running status off (vel 0) at tick 288
                              0x00, 0xFF, 0x2F, 0x00});
    const Score score = parse_midi(bytes);
    REQUIRE(score.notes.size() == 2);
    REQUIRE(score.notes[0] == NoteEvent{60, 0, 192});
    REQUIRE(score.notes[1] == NoteEvent{62, 96, 192});
}

TEST_CASE("parse_midi records time signatures and spots non-4/4 meters") {
    // 3/4 at tick 0: FF 58 04 03 02 18 08.
    const Bytes waltz = smf0({0x00, 0xFF, 0x58, 0x04, 0x03, 0x02, 0x18, 0x08, 0x00, 0xFF, 0x2F, 0x00});
    const Score score = parse_midi(waltz);
    REQUIRE(score.time_signatures.size() == 1);
    REQUIRE(score.time_signatures[0].numerator == 3);
    REQUIRE(score.time_signatures[0].denominator == 4);
    REQUIRE_FALSE(is_common_time(score));

    const Bytes common = smf0({0x00, 0xFF, 0x58, 0x04, 0x04, 0x02, 0x18, 0x08, 0x00, 0xFF, 0x2F, 0x00});
    REQUIRE(is_common_time(parse_midi(common)));

    // No time-signature meta defaults to 4/4.
    REQUIRE(is_common_time(parse_midi(smf0({0x00, 0xFF, 0x2F, 0x00}))));
}

TEST_CASE("parse_midi drops percussion and reports dangling note-ons") {
    // Channel 10 (0x99) note plus an unclosed channel-0 note.
    const Bytes bytes = smf0({0x00, 0x99, 35, 64, 0x60, 0x89, 35, 0,  // percussion pair
                              0x00, 0x90, 60, 64,                     // never closed
                              0x00, 0xFF, 0x2F, 0x00});
    MidiParseStats stats;
    const Score score = parse_midi(bytes, &stats);
    REQUIRE(score.notes.empty());
    REQUIRE(stats.percussion_notes == 1);
    REQUIRE(stats.dangling_note_ons == 1);
}

TEST_CASE("parse_midi rejects malformed headers") {
    Bytes bad = smf0({0x00, 0xFF, 0x2F, 0x00});
    bad[0] = 'X';
    REQUIRE_THROWS_AS(parse_midi(bad), ParseError);
    REQUIRE_THROWS_AS(parse_midi(Bytes{'M', 'T', 'h', 'd', 0, 0}), ParseError);

    // Declared track missing entirely.
    ByteWriter w;
    w.text("MThd");
    w.u32be(6);
    w.u16be(0);
    w.u16be(1);
    w.u16be(480);
    REQUIRE_THROWS_AS(parse_midi(w.take()), ParseError);
}

TEST_CASE("parse_midi never crashes on fuzzed bytes") {
    Rng rng(20240);
    for (int trial = 0; trial < 300; ++trial) {
        Bytes bytes(rng.next_below(200));
        for (auto& b : bytes) b = std::uint8_t(rng.next_below(256));
        if (trial % 3 == 0 && bytes.size() >= 4) {
            bytes[0] = 'M';
            bytes[1] = 'T';
            bytes[2] = 'h';
            bytes[3] = 'd';
        }
        try {
            (void)parse_midi(bytes);
        } catch (const ParseError&) {
            // structured failure is the contract
        }
    }
}

TEST_CASE("write_midi produces an empty but valid file for an empty score") {
    Score empty;
    const Score back = parse_midi(write_midi(empty));
    REQUIRE(back.notes.empty());
    REQUIRE(back.time_signatures.size() == 1);
    REQUIRE(is_common_time(back));
}

TEST_CASE("one-note score round-trips") {
    Score score;
    score.notes.push_back({60, 0, 480});
    const Score back = parse_midi(write_midi(score));
    REQUIRE(back.notes == score.notes);
}

TEST_CASE("back-to-back same-pitch notes survive the round trip") {
    Score score;
    score.notes.push_back({60, 0, 100});
    score.notes.push_back({60, 100, 50});
    const Score back = parse_midi(write_midi(score));
    REQUIRE(back.notes == score.notes);
}

TEST_CASE("random scores round-trip exactly") {
    Rng rng(555);
    for (int trial = 0; trial < 1000; ++trial) {
        const Score score = random_score(rng);
        const Score back = parse_midi(write_midi(score));
        REQUIRE(back.notes == score.notes);
    }
}

TEST_CASE("variable-length quantities round-trip across the full range") {
    auto roundtrip = [](std::uint32_t value) {
        ByteWriter w;
        midi_detail::write_vlq(w, value);
        const Bytes bytes = w.take();
        ByteReader r(bytes);
        return midi_detail::read_vlq(r);
    };
    for (std::uint32_t v : {0u, 1u, 0x7Fu, 0x80u, 0x3FFFu, 0x4000u, 0x1FFFFFu, 0x200000u, 0x0FFFFFFFu})
        REQUIRE(roundtrip(v) == v);
    Rng rng(8);
    for (int trial = 0; trial < 5000; ++trial) {
        const std::uint32_t v = std::uint32_t(rng.next_below(0x10000000));
        REQUIRE(roundtrip(v) == v);
    }
}

TEST_CASE("parse_idx reads a hand-built two-by-two image") {
    ByteWriter w;
    w.u32be(0x00000803);
    w.u32be(1);
    w.u32be(2);
    w.u32be(2);
    for (std::uint8_t p : {1, 2, 3, 4}) w.u8(p);
    const auto images = parse_idx(w.take());
    REQUIRE(images.size() == 1);
    REQUIRE(images[0].width == 2);
    REQUIRE(images[0].height == 2);
    REQUIRE(images[0].pixels == std::vector<std::uint8_t>{1, 2, 3, 4});
}

TEST_CASE("parse_idx handles empty files and rejects bad input") {
    ByteWriter w;
    w.u32be(0x00000803);
    w.u32be(0);
    w.u32be(28);
    w.u32be(28);
    REQUIRE(parse_idx(w.take()).empty());

    ByteWriter bad_magic;
    bad_magic.u32be(0x00000801);
    bad_magic.u32be(0);
    bad_magic.u32be(1);
    bad_magic.u32be(1);
    REQUIRE_THROWS_AS(parse_idx(bad_magic.take()), ParseError);

    ByteWriter short_payload;
    short_payload.u32be(0x00000803);
    short_payload.u32be(1);
    short_payload.u32be(2);
    short_payload.u32be(2);
    short_payload.u8(7);
    REQUIRE_THROWS_AS(parse_idx(short_payload.take()), ParseError);
}

TEST_CASE("idx round-trips through write_idx") {
    Rng rng(31);
    std::vector<GrayImage> images(3);
    for (auto& img : images) {
        img.width = 4;
        img.height = 3;
        img.pixels.resize(12);
        for (auto& p : img.pixels) p = std::uint8_t(rng.next_below(256));
    }
    const auto back = parse_idx(write_idx(images));
    REQUIRE(back.size() == 3);
    for (std::size_t n = 0; n < 3; ++n) REQUIRE(back[n].pixels == images[n].pixels);
}

TEST_CASE("read_pgm parses P5 and rejects other variants") {
    ByteWriter w;
    w.text("P5\n# comment\n3 2\n255\n");
    for (std::uint8_t p : {10, 20, 30, 40, 50, 60}) w.u8(p);
    const GrayImage img = read_pgm(w.take());
    REQUIRE(img.width == 3);
    REQUIRE(img.height == 2);
    REQUIRE(img.at(1, 2) == 60);

    ByteWriter ascii;
    ascii.text("P2\n3 2\n255\n...");
    REQUIRE_THROWS_AS(read_pgm(ascii.take()), ParseError);
}
