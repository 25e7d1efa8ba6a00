#include "tclrl/io.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace tclrl::io {

namespace {

std::ofstream open_out(const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) {
        throw std::runtime_error("cannot write file: " + file.string());
    }
    return out;
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buffer;
}

nlohmann::json profile_to_json(const ReferenceProfile& profile) {
    nlohmann::json j;
    j["kind"] = profile.kind == ReferenceProfile::Kind::Constant ? "constant" : "step";
    j["level_before"] = profile.level_before;
    j["level_after"] = profile.level_after;
    j["step_time"] = profile.step_time;
    return j;
}

nlohmann::json config_to_json(const ExperimentConfig& config) {
    nlohmann::json j;
    j["start_time"] = config.start_time;
    j["horizon"] = config.horizon;
    j["control_step"] = config.control_step;
    j["train_episodes"] = config.n_train_episodes;
    j["test_episodes"] = config.n_test_episodes;
    j["repeats"] = config.n_repeats;
    j["smoothing_window"] = config.smoothing_window;
    j["profile"] = profile_to_json(config.profile);
    j["stochastic"] = config.stochastic;
    j["apl_bin_edges"] = config.encoder.apl_bins.edges;
    j["rpl_bin_edges"] = config.encoder.rpl_bins.edges;
    j["agent"] = {{"learning_rate", config.agent.learning_rate},
                  {"exploration_rate", config.agent.exploration_rate},
                  {"exploration_decay", config.agent.exploration_decay},
                  {"discount", config.agent.discount},
                  {"actions", config.agent.actions},
                  {"reward_scale", config.agent.reward_scale}};
    j["seed"] = config.seed;
    j["v_min"] = config.limits.v_min;
    j["v_max"] = config.limits.v_max;
    if (config.test_horizon) {
        j["test_horizon"] = *config.test_horizon;
    }
    j["substeps_per_second"] = config.substeps_per_second;
    return j;
}

} // namespace

std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return buffer;
}

void write_manifest(const std::filesystem::path& file, const RunManifest& manifest) {
    nlohmann::json j;
    j["command"] = manifest.command;
    j["tool_version"] = kToolVersion;
    j["timestamp"] = utc_timestamp();
    j["out_dir"] = manifest.out_dir;
    j["seed"] = manifest.config.seed;
    if (!manifest.binning.empty()) {
        j["binning"] = manifest.binning;
    }
    if (!manifest.policy.empty()) {
        j["policy"] = manifest.policy;
    }
    if (!manifest.sweep_ks.empty()) {
        j["sweep_ks"] = manifest.sweep_ks;
    }
    if (!manifest.qtable_file.empty()) {
        j["qtable_file"] = manifest.qtable_file;
    }
    j["config"] = config_to_json(manifest.config);
    auto out = open_out(file);
    out << j.dump(2) << "\n";
}

void write_trajectory_csv(const std::filesystem::path& file, const EpisodeRecord& record) {
    auto out = open_out(file);
    const std::size_t n_loads =
        record.load_temps.empty() ? 0 : record.load_temps.front().size();
    out << "time,apl,rpl,voltage,k";
    for (std::size_t i = 1; i <= n_loads; ++i) {
        out << ",theta_" << i;
    }
    for (std::size_t i = 1; i <= n_loads; ++i) {
        out << ",switch_" << i;
    }
    out << "\n";
    for (std::size_t row = 0; row < record.times.size(); ++row) {
        out << format_double(record.times[row]) << ',' << format_double(record.apl[row])
            << ',' << format_double(record.rpl[row]) << ','
            << format_double(record.voltages[row]) << ','
            << format_double(record.actions[row]);
        if (n_loads > 0) {
            for (double temp : record.load_temps[row]) {
                out << ',' << format_double(temp);
            }
            for (int sw : record.load_switches[row]) {
                out << ',' << sw;
            }
        }
        out << "\n";
    }
}

void write_sweep_csv(const std::filesystem::path& file, const SweepResult& result) {
    auto out = open_out(file);
    out << "k,n_samples,median,mean,std,best\n";
    for (std::size_t i = 0; i < result.entries.size(); ++i) {
        const SweepEntry& entry = result.entries[i];
        if (entry.is_baseline) {
            out << "baseline";
        } else {
            out << format_double(entry.k);
        }
        out << ',' << entry.mses.size() << ',' << format_double(entry.stats.median) << ','
            << format_double(entry.stats.mean) << ',' << format_double(entry.stats.stddev)
            << ',' << (i == result.best_index ? 1 : 0) << "\n";
    }
}

void write_training_curve_csv(const std::filesystem::path& file, const TrainResult& result) {
    auto out = open_out(file);
    out << "episode,mean_mse,smoothed_mse\n";
    const std::size_t n_episodes = result.smoothed_curve.size();
    for (std::size_t e = 0; e < n_episodes; ++e) {
        double mean = 0.0;
        for (const auto& curve : result.train_mse) {
            mean += curve[e];
        }
        mean /= static_cast<double>(result.train_mse.size());
        out << e << ',' << format_double(mean) << ','
            << format_double(result.smoothed_curve[e]) << "\n";
    }
}

void write_test_mse_csv(const std::filesystem::path& file,
                        const std::vector<std::vector<double>>& mse_per_repeat) {
    auto out = open_out(file);
    out << "repeat,episode,mse\n";
    for (std::size_t r = 0; r < mse_per_repeat.size(); ++r) {
        for (std::size_t e = 0; e < mse_per_repeat[r].size(); ++e) {
            out << r << ',' << e << ',' << format_double(mse_per_repeat[r][e]) << "\n";
        }
    }
}

void write_eval_csv(const std::filesystem::path& file, const std::vector<double>& mses) {
    auto out = open_out(file);
    out << "episode,mse\n";
    for (std::size_t e = 0; e < mses.size(); ++e) {
        out << e << ',' << format_double(mses[e]) << "\n";
    }
}

void write_historical(const std::filesystem::path& file, const std::vector<double>& samples,
                      const std::string& comment) {
    auto out = open_out(file);
    if (!comment.empty()) {
        out << "# " << comment << "\n";
    }
    for (double sample : samples) {
        out << format_double(sample) << "\n";
    }
}

} // namespace tclrl::io
