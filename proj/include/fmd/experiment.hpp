#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fmd/noise.hpp"

namespace fmd {

// Degradation-sweep configuration. Defaults reproduce the desk-scale
// validation run: synthetic data, three motion lengths, six-point noise
// grids, 20 repetitions per cell.
struct ExperimentConfig {
    std::uint64_t master_seed = 42;

    // Data source: a directory of MOT1 clips, or synthetic when empty.
    std::string dataset_dir;
    int synth_clips = 500;
    int synth_joints = 17;
    int synth_frames = 64;
    double synth_fps = 30.0;

    std::vector<int> lengths{18, 34, 64};
    int latent_dim = 64;

    std::vector<double> gaussian_grid{0.0, 0.005, 0.01, 0.02, 0.05, 0.1};
    std::vector<double> salt_pepper_grid{0.0, 0.01, 0.05, 0.1, 0.2, 0.4};
    // A temporal zeta runs only at lengths L >= zeta; it must fit at least
    // the largest configured length.
    std::vector<int> temporal_grid{0, 2, 4, 8, 16, 32};

    int repetitions = 20;
    double train_fraction = 0.7;

    // Throws ConfigError naming the offending field.
    void validate() const;

    // Canonical key=value serialization; identical configs hash identically.
    std::string canonical_text() const;
    std::uint32_t hash() const;
};

// Parses a flat key=value config file ('#' comments allowed). Unknown keys
// are rejected. Keys mirror ExperimentConfig fields.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

// Applies one "key=value" override on top of an existing config.
void apply_config_override(ExperimentConfig& config, const std::string& assignment);

struct ReportCell {
    NoiseKind kind = NoiseKind::gaussian;
    int length = 0;
    double zeta = 0.0;
    double mean_fmd = 0.0;
    double std_fmd = 0.0;
    int reps = 0;
};

struct ExperimentReport {
    std::vector<ReportCell> cells;  // canonical order: kind, length, zeta
    std::uint32_t config_hash = 0;
    std::string version;
};

// Runs the full sweep: per length, split clips 70/30, window, fit the
// embedder on training windows, embed the clean test windows once as the
// reference, then score every (kind, zeta, repetition) cell against it.
// Deterministic given the config; the thread count never changes the result.
ExperimentReport run_experiment(const ExperimentConfig& config, int threads = 1);

}  // namespace fmd
