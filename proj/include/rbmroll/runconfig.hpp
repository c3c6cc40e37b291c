#ifndef RBMROLL_RUNCONFIG_HPP
#define RBMROLL_RUNCONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "rbmroll/composer.hpp"
#include "rbmroll/trainer.hpp"

namespace rbmroll {

/// Key-value run configuration: `key = value` lines, `#` comments, unknown
/// keys rejected. Command-line flags override file values, so every field is
/// optional here.
struct RunConfig {
    std::optional<std::size_t> hidden_units;
    std::optional<std::size_t> cd_steps;
    std::optional<double> learning_rate;
    std::optional<std::size_t> epochs;
    std::optional<std::size_t> batch_size;
    std::optional<std::uint64_t> seed;
    std::optional<double> weight_init_stddev;
    std::optional<std::size_t> initial_budget;
    std::optional<std::size_t> extension_budget;
    std::optional<std::size_t> extensions;
    std::optional<std::string> manifest;
    std::optional<std::string> checkpoint;
    std::optional<std::string> out_prefix;
    std::optional<std::string> report;

    void apply_to(TrainConfig& config) const {
        if (hidden_units) config.hidden_units = *hidden_units;
        if (cd_steps) config.cd_steps = *cd_steps;
        if (learning_rate) config.learning_rate = *learning_rate;
        if (epochs) config.epochs = *epochs;
        if (batch_size) config.batch_size = *batch_size;
        if (seed) config.seed = *seed;
        if (weight_init_stddev) config.weight_init_stddev = *weight_init_stddev;
    }

    void apply_to(ComposeConfig& config) const {
        if (initial_budget) config.initial_budget = *initial_budget;
        if (extension_budget) config.extension_budget = *extension_budget;
        if (extensions) config.extensions = *extensions;
        if (seed) config.seed = *seed;
    }
};

namespace runconfig_detail {

inline std::string trim(const std::string& text) {
    std::size_t first = text.find_first_not_of(" \t\r");
    std::size_t last = text.find_last_not_of(" \t\r");
    if (first == std::string::npos) return "";
    return text.substr(first, last - first + 1);
}

template <typename T>
inline T parse_number(const std::string& key, const std::string& value) {
    std::istringstream in(value);
    T out{};
    in >> out;
    if (in.fail() || !(in >> std::ws).eof())
        throw std::runtime_error("config: bad value for '" + key + "': " + value);
    return out;
}

}  // namespace runconfig_detail

inline RunConfig parse_run_config(const std::string& text) {
    RunConfig config;
    std::istringstream in(text);
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = runconfig_detail::trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: line " + std::to_string(line_number) + " is not 'key = value'");
        const std::string key = runconfig_detail::trim(line.substr(0, eq));
        const std::string value = runconfig_detail::trim(line.substr(eq + 1));
        if (value.empty()) throw std::runtime_error("config: empty value for '" + key + "'");

        using runconfig_detail::parse_number;
        if (key == "hidden_units") config.hidden_units = parse_number<std::size_t>(key, value);
        else if (key == "cd_steps") config.cd_steps = parse_number<std::size_t>(key, value);
        else if (key == "learning_rate") config.learning_rate = parse_number<double>(key, value);
        else if (key == "epochs") config.epochs = parse_number<std::size_t>(key, value);
        else if (key == "batch_size") config.batch_size = parse_number<std::size_t>(key, value);
        else if (key == "seed") config.seed = parse_number<std::uint64_t>(key, value);
        else if (key == "weight_init_stddev") config.weight_init_stddev = parse_number<double>(key, value);
        else if (key == "initial_budget") config.initial_budget = parse_number<std::size_t>(key, value);
        else if (key == "extension_budget") config.extension_budget = parse_number<std::size_t>(key, value);
        else if (key == "extensions") config.extensions = parse_number<std::size_t>(key, value);
        else if (key == "manifest") config.manifest = value;
        else if (key == "checkpoint") config.checkpoint = value;
        else if (key == "out_prefix") config.out_prefix = value;
        else if (key == "report") config.report = value;
        else throw std::runtime_error("config: unknown key '" + key + "'");
    }
    return config;
}

}  // namespace rbmroll

#endif  // RBMROLL_RUNCONFIG_HPP
