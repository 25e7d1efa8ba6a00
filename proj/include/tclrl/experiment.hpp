#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "tclrl/agent.hpp"
#include "tclrl/binning.hpp"
#include "tclrl/control.hpp"
#include "tclrl/feeder.hpp"
#include "tclrl/rng.hpp"

namespace tclrl {

/// Full description of one experiment. Defaults follow the standard protocol:
/// 200 s horizon, 1 s control step, 100 training episodes, 50 test episodes,
/// 5 repeats, smoothing window 20, constant reference of 1.2 p.u.
struct ExperimentConfig {
    double start_time = 0.0;  // s; the feeder runs uncontrolled before this
    double horizon = 200.0;   // s of controlled simulation
    double control_step = 1.0; // s between control signal changes
    int n_train_episodes = 100;
    int n_test_episodes = 50;
    int n_repeats = 5;
    int smoothing_window = 20;
    ReferenceProfile profile = ReferenceProfile::constant(1.2);
    bool stochastic = false;
    StateEncoder encoder{equal_width_edges(0.9, 1.7, 10)};
    AgentConfig agent;
    std::uint64_t seed = 0;
    VoltageLimits limits;
    std::optional<double> test_horizon; // s, generalization runs only
    int substeps_per_second = 100;      // integrator granularity
    bool record_load_state = false;     // keep per-load traces in records
};

/// One episode's sampled trajectory. Lists hold one entry per control step;
/// apl is observed before the step's action takes effect.
struct EpisodeRecord {
    std::vector<double> times;    // s
    std::vector<double> apl;      // p.u.
    std::vector<double> rpl;      // p.u.
    std::vector<double> voltages; // p.u., commanded and held over the step
    std::vector<double> actions;  // k values
    std::vector<std::vector<double>> load_temps; // per step, when recorded
    std::vector<std::vector<int>> load_switches; // per step, when recorded
    double mse = 0.0;
};

struct SummaryStats {
    double median = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
};

/// Constant proportional control with the given k; k = 0 is the baseline.
struct FixedPolicy {
    double k = 0.0;
};

/// Greedy exploitation of a learnt table.
struct GreedyPolicy {
    const QTable* q = nullptr;
};

/// Epsilon-greedy acting plus per-step TD updates on the table.
struct LearningPolicy {
    QTable* q = nullptr;
    double eps = 0.0;
};

using Policy = std::variant<FixedPolicy, GreedyPolicy, LearningPolicy>;

/// Mean of (apl - rpl)^2 over the record's samples.
double episode_mse(const EpisodeRecord& record);

/// Trailing moving average; the first window-1 entries average the prefix.
std::vector<double> smooth_curve(const std::vector<double>& values, int window);

/// Median, mean, and sample (n-1) standard deviation; singleton std is 0.
SummaryStats summarize(std::vector<double> values);

/// Simulates one episode from start_time to start_time + horizon (preceded by
/// an uncontrolled warm-up from t = 0 when start_time > 0). Stochastic
/// configs draw per-load capacitance offsets from `rng` at episode start;
/// learning policies also consume `rng` for exploration.
EpisodeRecord run_episode(const ExperimentConfig& config, const FeederConfig& feeder,
                          Policy policy, Rng& rng);

struct SweepEntry {
    bool is_baseline = false;
    double k = 0.0;
    std::vector<double> mses;
    SummaryStats stats;
};

struct SweepResult {
    std::vector<SweepEntry> entries; // baseline first, then ks in given order
    std::size_t best_index = 0;      // lowest-median constant-k entry
    std::vector<double> apl_history; // APL samples harvested from the k runs
};

inline constexpr std::array<double, 8> kDefaultSweepKs = {0.5, 1, 2, 3, 4, 5, 6, 7};

/// Baseline plus one entry per k. Deterministic configs take one episode per
/// entry; stochastic ones sample n_test_episodes realizations per entry,
/// sharing realization i across entries.
SweepResult constant_sweep(const std::vector<double>& ks, const ExperimentConfig& config);

struct TrainResult {
    std::vector<std::vector<double>> train_mse; // [repeat][episode], raw
    std::vector<std::vector<double>> test_mse;  // [repeat][test episode]
    std::vector<double> smoothed_curve;         // smoothed per repeat, then averaged
    SummaryStats test_stats;                    // pooled over repeats
    std::vector<QTable> qtables;                // one per repeat
    std::vector<double> apl_history;            // APL samples from training episodes
};

/// n_repeats independent trainings (repeat r seeds its stream with seed + r),
/// each followed by greedy testing.
TrainResult train(const ExperimentConfig& config);

/// Greedy evaluation of a fixed table: n_test_episodes episodes over
/// test_horizon when set, the training horizon otherwise. Reproduces the test
/// phase of train() repeat r when called with seed + r.
std::vector<double> evaluate_policy(const ExperimentConfig& config, const QTable& q);

/// Same evaluation stream applied to a constant-k policy.
std::vector<double> evaluate_constant(const ExperimentConfig& config, double k);

struct GeneralizationResult {
    double best_k = 0.0;                  // training-window-optimal constant
    SummaryStats constant_train_stats;    // best k on the training window
    std::vector<double> rl_test_mses;     // greedy policy on the test window
    std::vector<double> constant_test_mses;
    SummaryStats rl_test_stats;
    SummaryStats constant_test_stats;
    TrainResult training;
};

/// Trains on [start, start + horizon], then compares the greedy policy with
/// the training-window-optimal constant k on [start, start + test_horizon].
GeneralizationResult generalization_run(const ExperimentConfig& config,
                                        const std::vector<double>& sweep_ks);

} // namespace tclrl
