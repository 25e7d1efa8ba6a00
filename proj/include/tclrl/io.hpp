#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tclrl/experiment.hpp"

namespace tclrl::io {

inline constexpr const char* kToolVersion = "0.1.0";

/// Everything needed to reproduce a run: command, resolved configuration,
/// seed, and output location. Written as manifest.json next to every output.
struct RunManifest {
    std::string command;
    std::string out_dir;
    std::string binning; // descriptor string, e.g. "equal:0.9,1.7,10"
    std::string policy;  // "baseline", "k=0.5", "agent", ...
    std::vector<double> sweep_ks;
    std::string qtable_file;
    ExperimentConfig config;
};

void write_manifest(const std::filesystem::path& file, const RunManifest& manifest);

/// time,apl,rpl,voltage,k plus per-load theta/switch columns when recorded.
void write_trajectory_csv(const std::filesystem::path& file, const EpisodeRecord& record);

/// One row per entry: k (or "baseline"), n, median, mean, std, best flag.
void write_sweep_csv(const std::filesystem::path& file, const SweepResult& result);

/// episode,mean_mse,smoothed_mse with the smoothed column averaged over repeats.
void write_training_curve_csv(const std::filesystem::path& file, const TrainResult& result);

/// repeat,episode,mse over all greedy test episodes.
void write_test_mse_csv(const std::filesystem::path& file,
                        const std::vector<std::vector<double>>& mse_per_repeat);

/// episode,mse for a single evaluation run.
void write_eval_csv(const std::filesystem::path& file, const std::vector<double>& mses);

/// One value per line with a '#' provenance comment, loadable as historical data.
void write_historical(const std::filesystem::path& file, const std::vector<double>& samples,
                      const std::string& comment);

/// Locale-independent decimal formatting used by every emitter.
std::string format_double(double value);

} // namespace tclrl::io
