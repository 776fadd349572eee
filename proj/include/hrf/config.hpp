#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hrf/scenario.hpp"

namespace hrf {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind { boundary, distance_sweep, min_bits, validate_fim };

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::boundary;
    std::string scenario_path;  // resolved against the experiment file's directory
    Scenario scenario;
    std::vector<int> bits = {1, 2, 4, 6, 8, 14};  // boundary resolutions
    std::vector<double> distances_m = {100, 120, 140, 160};
    int n_points = 12;       // boundary sweep resolution
    bool log_mu_grid = false;
    std::uint64_t seed = 1;
    int n_positions = 500;   // min-bits position sampler
    double radius_m = 200.0;
    double margin_db = 0.0;
    int fixed_bits = 14;     // distance-sweep ADC resolution
};

// Scenario file: INI-style sections [scenario], [ofdm], then one [target] /
// [user] section per entry. Angles are given in degrees (keys end in _deg),
// integer lists accept "a..b" ranges and comma separation.
Scenario load_scenario(const std::string& path);

// Experiment file: an [experiment] section whose `scenario` key names the
// scenario file, resolved relative to the experiment file's directory.
ExperimentConfig load_experiment(const std::string& path);

// FNV-1a over the experiment file bytes chained with the scenario file
// bytes, so editing either changes the reported hash.
std::uint64_t config_hash(const std::string& path);

const char* experiment_kind_name(ExperimentKind kind);

}  // namespace hrf
