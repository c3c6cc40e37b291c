#ifndef RBMROLL_COMMANDS_HPP
#define RBMROLL_COMMANDS_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbmroll/analysis.hpp"
#include "rbmroll/checkpoint.hpp"
#include "rbmroll/composer.hpp"
#include "rbmroll/idx.hpp"
#include "rbmroll/midi.hpp"
#include "rbmroll/pianoroll.hpp"
#include "rbmroll/runconfig.hpp"
#include "rbmroll/trainer.hpp"

namespace rbmroll {

// Process exit codes shared by every subcommand.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Manifest I/O: one window per line, tab-separated
// (path, source id, measure index, shift). Paths are relative to the
// manifest's own directory.

struct ManifestEntry {
    std::string path;
    WindowProvenance provenance;
};

inline void write_manifest(const std::string& manifest_path, const std::vector<ManifestEntry>& entries) {
    std::ofstream out(manifest_path);
    if (!out) throw std::runtime_error("cannot open manifest for writing: " + manifest_path);
    for (const ManifestEntry& e : entries)
        out << e.path << '\t' << e.provenance.source << '\t' << e.provenance.measure_index << '\t'
            << e.provenance.shift << '\n';
    if (!out) throw std::runtime_error("failed writing manifest: " + manifest_path);
}

inline std::vector<ManifestEntry> read_manifest(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw std::runtime_error("cannot open manifest: " + manifest_path);
    std::vector<ManifestEntry> entries;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        ManifestEntry e;
        std::string measure, shift;
        if (!std::getline(row, e.path, '\t') || !std::getline(row, e.provenance.source, '\t') ||
            !std::getline(row, measure, '\t') || !std::getline(row, shift))
            throw std::runtime_error("malformed manifest row: " + line);
        e.provenance.measure_index = std::stoi(measure);
        e.provenance.shift = std::stoi(shift);
        entries.push_back(std::move(e));
    }
    return entries;
}

/// Loads every window a manifest names; all must be 192-column windows.
inline RollDataset load_manifest_windows(const std::string& manifest_path) {
    const fs::path base = fs::path(manifest_path).parent_path();
    RollDataset dataset;
    for (const ManifestEntry& e : read_manifest(manifest_path)) {
        const fs::path path = fs::path(e.path).is_absolute() ? fs::path(e.path) : base / e.path;
        PianoRoll roll = read_pbm(read_file(path.string()));
        if (!roll.is_window())
            throw std::runtime_error("manifest window is not 192 columns wide: " + path.string());
        dataset.windows.push_back(std::move(roll));
        dataset.provenance.push_back(e.provenance);
    }
    return dataset;
}

// ---------------------------------------------------------------------------
// Image loading for reconstruct/energy: PBM windows directly, PGM and IDX
// grayscale images through the nearest-neighbor binarizer.

inline PianoRoll load_window_image(const std::string& path, std::size_t idx_index = 0) {
    const Bytes bytes = read_file(path);
    std::string ext = fs::path(path).extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    if (ext == ".pbm") {
        PianoRoll roll = read_pbm(bytes);
        if (!roll.is_window()) throw std::runtime_error("PBM input is not a 192-column window: " + path);
        return roll;
    }
    if (ext == ".pgm") return resize_binary(read_pgm(bytes));
    // Anything else is treated as IDX (the MNIST container).
    const std::vector<GrayImage> images = parse_idx(bytes);
    if (idx_index >= images.size())
        throw std::runtime_error("IDX index " + std::to_string(idx_index) + " out of range for " + path);
    return resize_binary(images[idx_index]);
}

// ---------------------------------------------------------------------------
// ingest

struct IngestOptions {
    std::string midi_dir;
    std::string out_dir;
    std::string manifest;  // defaults to <out_dir>/manifest.tsv
    std::vector<int> shifts = default_shifts();
    bool include_original = true;
    bool json = false;
};

inline int run_ingest(const IngestOptions& options, std::ostream& out, std::ostream& err) {
    if (options.midi_dir.empty() || options.out_dir.empty()) {
        err << "ingest: --midi-dir and --out-dir are required\n";
        return kExitUsage;
    }
    if (!fs::is_directory(options.midi_dir)) {
        err << "ingest: not a directory: " << options.midi_dir << "\n";
        return kExitData;
    }
    fs::create_directories(options.out_dir);
    const std::string manifest_path =
        options.manifest.empty() ? (fs::path(options.out_dir) / "manifest.tsv").string() : options.manifest;

    std::vector<fs::path> midi_files;
    for (const auto& entry : fs::directory_iterator(options.midi_dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return char(std::tolower(c)); });
        if (ext == ".mid" || ext == ".midi") midi_files.push_back(entry.path());
    }
    std::sort(midi_files.begin(), midi_files.end());

    std::size_t accepted = 0, rejected_meter = 0, unreadable = 0, dropped_notes = 0;
    RollDataset raw;
    for (const fs::path& path : midi_files) {
        Score score;
        try {
            score = parse_midi(read_file(path.string()));
        } catch (const std::exception& e) {
            err << "ingest: skipping unreadable " << path.string() << ": " << e.what() << "\n";
            ++unreadable;
            continue;
        }
        if (!is_common_time(score)) {
            ++rejected_meter;
            continue;
        }
        ++accepted;
        RasterizeStats stats;
        const PianoRoll strip = rasterize(score, &stats);
        dropped_notes += stats.dropped_notes;
        auto windows = segment(strip);
        for (std::size_t n = 0; n < windows.size(); ++n) {
            raw.windows.push_back(std::move(windows[n]));
            raw.provenance.push_back({path.stem().string(), int(n), 0});
        }
    }

    RollDataset augmented;
    std::size_t rejected_shifts = 0;
    if (options.include_original) {
        augmented = augment(raw, options.shifts);
        rejected_shifts = raw.windows.size() * (1 + options.shifts.size()) - augmented.size();
    } else {
        for (std::size_t n = 0; n < raw.windows.size(); ++n)
            for (int shift : options.shifts) {
                auto shifted = transpose_roll(raw.windows[n], shift);
                if (!shifted) {
                    ++rejected_shifts;
                    continue;
                }
                augmented.windows.push_back(std::move(*shifted));
                augmented.provenance.push_back(
                    {raw.provenance[n].source, raw.provenance[n].measure_index, shift});
            }
    }

    if (augmented.windows.empty()) {
        err << "ingest: no 4/4 input produced any windows\n";
        return kExitData;
    }

    std::vector<ManifestEntry> entries;
    for (std::size_t n = 0; n < augmented.windows.size(); ++n) {
        const WindowProvenance& p = augmented.provenance[n];
        std::ostringstream name;
        name << p.source << "__m" << std::setw(4) << std::setfill('0') << p.measure_index << "__s"
             << (p.shift < 0 ? "m" : "p") << std::abs(p.shift) << ".pbm";
        const fs::path file = fs::path(options.out_dir) / name.str();
        write_file(file.string(), write_pbm(augmented.windows[n]));
        entries.push_back({name.str(), p});
    }
    write_manifest(manifest_path, entries);

    if (options.json) {
        nlohmann::json summary = {{"command", "ingest"},
                                  {"files_accepted", accepted},
                                  {"files_rejected_meter", rejected_meter},
                                  {"files_unreadable", unreadable},
                                  {"windows", augmented.windows.size()},
                                  {"rejected_transpositions", rejected_shifts},
                                  {"dropped_notes", dropped_notes},
                                  {"manifest", manifest_path}};
        out << summary.dump() << "\n";
    } else {
        out << "files accepted: " << accepted << "\n"
            << "files rejected (not 4/4): " << rejected_meter << "\n"
            << "files unreadable: " << unreadable << "\n"
            << "windows written: " << augmented.windows.size() << "\n"
            << "rejected transpositions: " << rejected_shifts << "\n"
            << "dropped out-of-range notes: " << dropped_notes << "\n"
            << "manifest: " << manifest_path << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// train

struct TrainOptions {
    std::string manifest;
    std::string checkpoint;
    std::string report;  // optional per-epoch report path
    std::string resume;  // optional checkpoint to continue from
    TrainConfig config;
    bool json = false;
};

inline void write_train_report(const std::string& path, const TrainReport& report) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open report for writing: " + path);
    out << "epoch\treconstruction_error\tholdout_free_energy\tseconds\n";
    for (std::size_t n = 0; n < report.epochs.size(); ++n) {
        const EpochRecord& r = report.epochs[n];
        out << n << '\t' << std::setprecision(17) << r.reconstruction_error << '\t' << r.holdout_free_energy << '\t'
            << r.seconds << '\n';
    }
}

inline int run_train(const TrainOptions& options, std::ostream& out, std::ostream& err) {
    if (options.manifest.empty() || options.checkpoint.empty()) {
        err << "train: --manifest and --checkpoint are required\n";
        return kExitUsage;
    }
    const RollDataset dataset = load_manifest_windows(options.manifest);
    if (dataset.windows.empty()) {
        err << "train: manifest lists no windows\n";
        return kExitData;
    }
    std::vector<VisibleState> states;
    states.reserve(dataset.size());
    for (const PianoRoll& window : dataset.windows) states.push_back(flatten(window));

    RbmParams params;
    TrainReport report;
    if (!options.resume.empty()) {
        params = load_checkpoint(options.resume);
        if (params.num_visible != states.front().size()) {
            err << "train: resume checkpoint D does not match window size\n";
            return kExitData;
        }
        report = train_from(params, states, options.config);
    } else {
        auto [trained, train_report] = train(states, options.config);
        params = std::move(trained);
        report = std::move(train_report);
    }

    save_checkpoint(options.checkpoint, params);
    if (!options.report.empty()) write_train_report(options.report, report);

    const double final_error = report.epochs.empty() ? 0.0 : report.epochs.back().reconstruction_error;
    if (options.json) {
        nlohmann::json summary = {{"command", "train"},
                                  {"windows", states.size()},
                                  {"epochs", report.epochs.size()},
                                  {"hidden_units", params.num_hidden},
                                  {"final_reconstruction_error", final_error},
                                  {"checkpoint", options.checkpoint}};
        out << summary.dump() << "\n";
    } else {
        out << "trained on " << states.size() << " windows for " << report.epochs.size() << " epochs\n"
            << "final reconstruction error: " << final_error << "\n"
            << "checkpoint: " << options.checkpoint << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// compose

struct ComposeOptions {
    std::string checkpoint;
    std::string out_prefix;
    ComposeConfig config;
    bool json = false;
};

inline int run_compose(const ComposeOptions& options, std::ostream& out, std::ostream& err) {
    if (options.checkpoint.empty() || options.out_prefix.empty()) {
        err << "compose: --checkpoint and --out-prefix are required\n";
        return kExitUsage;
    }
    const RbmParams params = load_checkpoint(options.checkpoint);
    if (params.num_visible != kVisibleUnits) {
        err << "compose: checkpoint is not window-shaped (D != 13824)\n";
        return kExitData;
    }
    const PianoRoll strip = compose_piece(params, options.config);
    const std::string pbm_path = options.out_prefix + ".pbm";
    const std::string midi_path = options.out_prefix + ".mid";
    write_file(pbm_path, write_pbm(strip));
    write_file(midi_path, write_midi(roll_to_score(strip)));

    if (options.json) {
        nlohmann::json summary = {{"command", "compose"},     {"width", strip.width},
                                  {"measures", strip.width / kMeasureColumns},
                                  {"notes_on", strip.popcount()},
                                  {"pbm", pbm_path},          {"midi", midi_path}};
        out << summary.dump() << "\n";
    } else {
        out << "composed " << strip.width / kMeasureColumns << " measures (" << strip.width << " columns, "
            << strip.popcount() << " cells on)\n"
            << "wrote " << pbm_path << " and " << midi_path << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// reconstruct

struct ReconstructOptions {
    std::string checkpoint;
    std::string image;
    std::string out;  // defaults to <image>.recon.pbm
    std::size_t gibbs_steps = 1;
    std::size_t idx_index = 0;
    std::uint64_t seed = 0;
    bool json = false;
};

struct PixelScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

inline PixelScore pixel_f1(const PianoRoll& truth, const PianoRoll& predicted) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t n = 0; n < truth.cells.size(); ++n) {
        if (truth.cells[n] && predicted.cells[n]) ++tp;
        else if (!truth.cells[n] && predicted.cells[n]) ++fp;
        else if (truth.cells[n] && !predicted.cells[n]) ++fn;
    }
    PixelScore score;
    score.precision = tp + fp == 0 ? 0.0 : double(tp) / double(tp + fp);
    score.recall = tp + fn == 0 ? 0.0 : double(tp) / double(tp + fn);
    score.f1 = score.precision + score.recall == 0.0
                   ? 0.0
                   : 2.0 * score.precision * score.recall / (score.precision + score.recall);
    return score;
}

inline int run_reconstruct(const ReconstructOptions& options, std::ostream& out, std::ostream& err) {
    if (options.checkpoint.empty() || options.image.empty()) {
        err << "reconstruct: --checkpoint and --image are required\n";
        return kExitUsage;
    }
    if (options.gibbs_steps < 1) {
        err << "reconstruct: --k must be >= 1\n";
        return kExitUsage;
    }
    const RbmParams params = load_checkpoint(options.checkpoint);
    if (params.num_visible != kVisibleUnits) {
        err << "reconstruct: checkpoint is not window-shaped (D != 13824)\n";
        return kExitData;
    }
    const PianoRoll input = load_window_image(options.image, options.idx_index);
    Rng rng(options.seed);
    const VisibleState result = reconstruct(params, flatten(input), options.gibbs_steps, rng);
    const PianoRoll output = unflatten(result);
    const std::string out_path = options.out.empty() ? options.image + ".recon.pbm" : options.out;
    write_file(out_path, write_pbm(output));
    const PixelScore score = pixel_f1(input, output);

    if (options.json) {
        nlohmann::json summary = {{"command", "reconstruct"}, {"precision", score.precision},
                                  {"recall", score.recall},   {"f1", score.f1},
                                  {"k", options.gibbs_steps}, {"output", out_path}};
        out << summary.dump() << "\n";
    } else {
        out << "precision: " << score.precision << "\nrecall: " << score.recall << "\nf1: " << score.f1 << "\n"
            << "wrote " << out_path << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// energy

struct EnergyOptions {
    std::string checkpoint;
    std::vector<std::string> images;
    std::size_t samples = 10;
    std::uint64_t seed = 0;
    bool json = false;
};

inline int run_energy(const EnergyOptions& options, std::ostream& out, std::ostream& err) {
    if (options.checkpoint.empty() || options.images.empty()) {
        err << "energy: --checkpoint and at least one image are required\n";
        return kExitUsage;
    }
    const RbmParams params = load_checkpoint(options.checkpoint);
    if (params.num_visible != kVisibleUnits) {
        err << "energy: checkpoint is not window-shaped (D != 13824)\n";
        return kExitData;
    }
    Rng rng(options.seed);
    std::vector<EnergyReport> reports;
    for (const std::string& path : options.images) {
        const PianoRoll window = load_window_image(path);
        reports.push_back(energy_protocol(params, window, options.samples, rng, fs::path(path).filename().string()));
    }
    std::sort(reports.begin(), reports.end(),
              [](const EnergyReport& a, const EnergyReport& b) { return a.mean_energy < b.mean_energy; });

    if (options.json) {
        nlohmann::json rows = nlohmann::json::array();
        for (const EnergyReport& r : reports)
            rows.push_back({{"label", r.label}, {"mean", r.mean_energy}, {"stddev", r.stddev}, {"samples", r.samples}});
        out << nlohmann::json({{"command", "energy"}, {"rows", rows}}).dump() << "\n";
    } else {
        out << "label\tmean\tstddev\n";
        for (const EnergyReport& r : reports)
            out << r.label << '\t' << r.mean_energy << '\t' << r.stddev << '\n';
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// embed

struct EmbedOptions {
    std::string checkpoint;
    std::string manifest;
    std::string out_path;
    double perplexity = 30.0;
    std::size_t iterations = 1000;
    std::uint64_t seed = 0;
    EmbeddingMode mode = EmbeddingMode::probabilities;
    bool json = false;
};

inline int run_embed(const EmbedOptions& options, std::ostream& out, std::ostream& err) {
    if (options.checkpoint.empty() || options.manifest.empty() || options.out_path.empty()) {
        err << "embed: --checkpoint, --manifest and --out are required\n";
        return kExitUsage;
    }
    const RbmParams params = load_checkpoint(options.checkpoint);
    const RollDataset dataset = load_manifest_windows(options.manifest);
    if (dataset.size() < 3) {
        err << "embed: need at least 3 windows, got " << dataset.size() << "\n";
        return kExitData;
    }
    Rng rng(options.seed);
    EmbeddingSet set;
    for (std::size_t n = 0; n < dataset.size(); ++n) {
        const WindowProvenance& p = dataset.provenance[n];
        std::ostringstream label;
        label << p.source << "#m" << p.measure_index << "#s" << p.shift;
        set.items.push_back({label.str(), hidden_embedding(params, dataset.windows[n], options.mode, rng), {}});
    }
    project_embeddings(set, options.perplexity, options.iterations, options.seed);

    std::ofstream file(options.out_path);
    if (!file) {
        err << "embed: cannot open output: " << options.out_path << "\n";
        return kExitData;
    }
    file << std::setprecision(17);
    for (const EmbeddingItem& item : set.items)
        file << item.label << '\t' << (*item.projection)[0] << '\t' << (*item.projection)[1] << '\n';

    if (options.json) {
        out << nlohmann::json({{"command", "embed"}, {"points", set.items.size()}, {"output", options.out_path}})
                   .dump()
            << "\n";
    } else {
        out << "projected " << set.items.size() << " windows to " << options.out_path << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// bench

struct BenchOptions {
    std::string idx_path;
    std::vector<std::size_t> hidden_counts = {64, 256, 1024};
    std::size_t threads = 1;
    std::size_t limit = 0;  // 0 = use every image
    std::uint64_t seed = 0;
    bool json = false;
};

struct BenchRow {
    std::size_t hidden_units = 0;
    std::size_t threads = 0;
    double seconds_per_epoch = 0.0;
};

/// One CD-1 epoch per hidden-unit count over a binarized IDX image set.
inline std::vector<BenchRow> bench_epochs(const std::vector<VisibleState>& data,
                                          const std::vector<std::size_t>& hidden_counts, std::size_t threads,
                                          std::uint64_t seed) {
    std::vector<BenchRow> rows;
    for (std::size_t hidden : hidden_counts) {
        TrainConfig config;
        config.hidden_units = hidden;
        config.cd_steps = 1;
        config.epochs = 1;
        config.batch_size = 64;
        config.seed = seed;
        Rng init_rng(seed ^ 0x9D2C5680AAD137EEull);
        RbmParams params = init_params(data.front().size(), hidden, config.weight_init_stddev, init_rng);
        const TrainReport report = train_from(params, data, config, threads);
        rows.push_back({hidden, threads, report.epochs.front().seconds});
    }
    return rows;
}

inline int run_bench(const BenchOptions& options, std::ostream& out, std::ostream& err) {
    if (options.idx_path.empty() || options.hidden_counts.empty()) {
        err << "bench: --idx and at least one hidden count are required\n";
        return kExitUsage;
    }
    const std::vector<GrayImage> images = parse_idx(read_file(options.idx_path));
    if (images.empty()) {
        err << "bench: IDX file contains no images\n";
        return kExitData;
    }
    const std::size_t count = options.limit == 0 ? images.size() : std::min(options.limit, images.size());
    std::vector<VisibleState> data;
    data.reserve(count);
    for (std::size_t n = 0; n < count; ++n) {
        const GrayImage& img = images[n];
        VisibleState v(img.pixels.size());
        for (std::size_t p = 0; p < v.size(); ++p) v[p] = img.pixels[p] >= 128 ? 1 : 0;
        data.push_back(std::move(v));
    }

    const std::vector<BenchRow> rows = bench_epochs(data, options.hidden_counts, options.threads, options.seed);

    if (options.json) {
        nlohmann::json json_rows = nlohmann::json::array();
        for (const BenchRow& r : rows)
            json_rows.push_back(
                {{"hidden_units", r.hidden_units}, {"threads", r.threads}, {"seconds_per_epoch", r.seconds_per_epoch}});
        out << nlohmann::json({{"command", "bench"}, {"images", count}, {"rows", json_rows}}).dump() << "\n";
    } else {
        out << "images: " << count << "\nhidden_units\tthreads\tseconds_per_epoch\n";
        for (const BenchRow& r : rows)
            out << r.hidden_units << '\t' << r.threads << '\t' << r.seconds_per_epoch << '\n';
    }
    return kExitOk;
}

}  // namespace rbmroll

#endif  // RBMROLL_COMMANDS_HPP
