// rbmroll command line: ingest a MIDI corpus into piano-roll windows, train
// a Bernoulli-Bernoulli RBM on them, compose new pieces with the budgeted
// Gibbs procedures, and run the analysis commands.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rbmroll/commands.hpp"

namespace {

using namespace rbmroll;

/// Loads --config, or $RBMROLL_CONFIG when the flag is absent.
RunConfig load_run_config(const std::string& config_flag) {
    std::string path = config_flag;
    if (path.empty()) {
        if (const char* env = std::getenv("RBMROLL_CONFIG")) path = env;
    }
    if (path.empty()) return {};
    const Bytes bytes = read_file(path);
    return parse_run_config(std::string(bytes.begin(), bytes.end()));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"piano-roll RBM toolkit"};
    app.require_subcommand(1);
    bool json = false;
    std::string config_path;
    app.add_flag("--json", json, "print a machine-readable JSON summary");
    app.add_option("--config", config_path, "run configuration file (default: $RBMROLL_CONFIG)");

    // ingest
    IngestOptions ingest;
    auto* ingest_cmd = app.add_subcommand("ingest", "convert a directory of MIDI files into training windows");
    ingest_cmd->add_option("--midi-dir", ingest.midi_dir, "directory of .mid files")->required();
    ingest_cmd->add_option("--out-dir", ingest.out_dir, "output directory for PBM windows")->required();
    ingest_cmd->add_option("--manifest", ingest.manifest, "manifest path (default <out-dir>/manifest.tsv)");
    ingest_cmd->add_option("--shifts", ingest.shifts, "transposition shifts in semitones");
    ingest_cmd->add_flag("!--no-original", ingest.include_original, "omit the untransposed windows");

    // train
    TrainOptions train_options;
    auto* train_cmd = app.add_subcommand("train", "train an RBM on a window manifest");
    train_cmd->add_option("--manifest", train_options.manifest, "window manifest");
    train_cmd->add_option("--checkpoint", train_options.checkpoint, "output checkpoint path");
    train_cmd->add_option("--report", train_options.report, "per-epoch report path");
    train_cmd->add_option("--resume", train_options.resume, "checkpoint to continue training from");
    train_cmd->add_option("--hidden-units", train_options.config.hidden_units, "hidden unit count");
    train_cmd->add_option("--cd-steps", train_options.config.cd_steps, "contrastive divergence steps");
    train_cmd->add_option("--learning-rate", train_options.config.learning_rate, "learning rate");
    train_cmd->add_option("--epochs", train_options.config.epochs, "training epochs");
    train_cmd->add_option("--batch-size", train_options.config.batch_size, "minibatch size");
    train_cmd->add_option("--seed", train_options.config.seed, "random seed");
    train_cmd->add_option("--weight-init-stddev", train_options.config.weight_init_stddev,
                          "weight initialization stddev");

    // compose
    ComposeOptions compose;
    auto* compose_cmd = app.add_subcommand("compose", "generate a multi-measure piece from a checkpoint");
    compose_cmd->add_option("--checkpoint", compose.checkpoint, "trained checkpoint");
    compose_cmd->add_option("--out-prefix", compose.out_prefix, "output prefix for .pbm and .mid");
    compose_cmd->add_option("--initial-budget", compose.config.initial_budget, "notes in the first two measures");
    compose_cmd->add_option("--extension-budget", compose.config.extension_budget, "notes per appended measure");
    compose_cmd->add_option("--extensions", compose.config.extensions, "measures appended after the first two");
    compose_cmd->add_option("--seed", compose.config.seed, "random seed");

    // reconstruct
    ReconstructOptions reconstruct;
    auto* reconstruct_cmd = app.add_subcommand("reconstruct", "reconstruct an image through Gibbs sampling");
    reconstruct_cmd->add_option("--checkpoint", reconstruct.checkpoint, "trained checkpoint")->required();
    reconstruct_cmd->add_option("--image", reconstruct.image, "PBM window, PGM image, or IDX file")->required();
    reconstruct_cmd->add_option("--out", reconstruct.out, "output PBM (default <image>.recon.pbm)");
    reconstruct_cmd->add_option("--k", reconstruct.gibbs_steps, "Gibbs sweeps (>= 1)");
    reconstruct_cmd->add_option("--index", reconstruct.idx_index, "image index within an IDX file");
    reconstruct_cmd->add_option("--seed", reconstruct.seed, "random seed");

    // energy
    EnergyOptions energy;
    auto* energy_cmd = app.add_subcommand("energy", "sampled-energy table for input images");
    energy_cmd->add_option("--checkpoint", energy.checkpoint, "trained checkpoint")->required();
    energy_cmd->add_option("images", energy.images, "input images")->required();
    energy_cmd->add_option("--samples", energy.samples, "hidden samples per image (default 10)");
    energy_cmd->add_option("--seed", energy.seed, "random seed");

    // embed
    EmbedOptions embed;
    auto* embed_cmd = app.add_subcommand("embed", "t-SNE projection of hidden activations");
    embed_cmd->add_option("--checkpoint", embed.checkpoint, "trained checkpoint");
    embed_cmd->add_option("--manifest", embed.manifest, "window manifest");
    embed_cmd->add_option("--out", embed.out_path, "output projections file");
    embed_cmd->add_option("--perplexity", embed.perplexity, "t-SNE perplexity");
    embed_cmd->add_option("--iterations", embed.iterations, "t-SNE iterations");
    embed_cmd->add_option("--seed", embed.seed, "random seed");
    bool embed_sampled = false;
    embed_cmd->add_flag("--sampled", embed_sampled, "use one binary hidden sample instead of probabilities");

    // bench
    BenchOptions bench;
    auto* bench_cmd = app.add_subcommand("bench", "CD-1 epoch timing on an IDX image set");
    bench_cmd->add_option("--idx", bench.idx_path, "IDX image file (e.g. MNIST train images)")->required();
    bench_cmd->add_option("--hidden-counts", bench.hidden_counts, "hidden unit counts to time");
    bench_cmd->add_option("--threads", bench.threads, "worker threads for the CD phase");
    bench_cmd->add_option("--limit", bench.limit, "cap on the number of images (0 = all)");
    bench_cmd->add_option("--seed", bench.seed, "random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        const RunConfig run_config = load_run_config(config_path);

        if (*ingest_cmd) {
            if (ingest.manifest.empty() && run_config.manifest) ingest.manifest = *run_config.manifest;
            ingest.json = json;
            return run_ingest(ingest, std::cout, std::cerr);
        }
        if (*train_cmd) {
            auto fallback = [&](const char* flag, auto& target, const auto& maybe) {
                if (!train_cmd->count(flag) && maybe) target = *maybe;
            };
            fallback("--manifest", train_options.manifest, run_config.manifest);
            fallback("--checkpoint", train_options.checkpoint, run_config.checkpoint);
            fallback("--report", train_options.report, run_config.report);
            fallback("--hidden-units", train_options.config.hidden_units, run_config.hidden_units);
            fallback("--cd-steps", train_options.config.cd_steps, run_config.cd_steps);
            fallback("--learning-rate", train_options.config.learning_rate, run_config.learning_rate);
            fallback("--epochs", train_options.config.epochs, run_config.epochs);
            fallback("--batch-size", train_options.config.batch_size, run_config.batch_size);
            fallback("--seed", train_options.config.seed, run_config.seed);
            fallback("--weight-init-stddev", train_options.config.weight_init_stddev, run_config.weight_init_stddev);
            train_options.json = json;
            return run_train(train_options, std::cout, std::cerr);
        }
        if (*compose_cmd) {
            auto fallback = [&](const char* flag, auto& target, const auto& maybe) {
                if (!compose_cmd->count(flag) && maybe) target = *maybe;
            };
            fallback("--checkpoint", compose.checkpoint, run_config.checkpoint);
            fallback("--out-prefix", compose.out_prefix, run_config.out_prefix);
            fallback("--initial-budget", compose.config.initial_budget, run_config.initial_budget);
            fallback("--extension-budget", compose.config.extension_budget, run_config.extension_budget);
            fallback("--extensions", compose.config.extensions, run_config.extensions);
            fallback("--seed", compose.config.seed, run_config.seed);
            compose.json = json;
            return run_compose(compose, std::cout, std::cerr);
        }
        if (*reconstruct_cmd) {
            reconstruct.json = json;
            return run_reconstruct(reconstruct, std::cout, std::cerr);
        }
        if (*energy_cmd) {
            energy.json = json;
            return run_energy(energy, std::cout, std::cerr);
        }
        if (*embed_cmd) {
            auto fallback = [&](const char* flag, auto& target, const auto& maybe) {
                if (!embed_cmd->count(flag) && maybe) target = *maybe;
            };
            fallback("--checkpoint", embed.checkpoint, run_config.checkpoint);
            fallback("--manifest", embed.manifest, run_config.manifest);
            if (embed_sampled) embed.mode = EmbeddingMode::sampled;
            embed.json = json;
            return run_embed(embed, std::cout, std::cerr);
        }
        if (*bench_cmd) {
            bench.json = json;
            return run_bench(bench, std::cout, std::cerr);
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}
