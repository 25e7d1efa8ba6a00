#include "tclrl/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace tclrl {

namespace {

// Stream tag separating greedy-test draws from the training stream.
constexpr std::uint64_t kTestStreamTag = 0x7E57;
// Stream base for constant-sweep realizations; realization i is shared
// across every entry of one sweep.
constexpr std::uint64_t kSweepStreamBase = 0x5EED0000;

int sample_count(const ExperimentConfig& config) {
    if (config.control_step <= 0.0) {
        throw std::invalid_argument("ExperimentConfig: control_step must be positive");
    }
    if (config.horizon <= 0.0) {
        throw std::invalid_argument("ExperimentConfig: horizon must be positive");
    }
    const double ratio = config.horizon / config.control_step;
    const int n = static_cast<int>(std::lround(ratio));
    if (n < 1 || std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio)) {
        throw std::invalid_argument(
            "ExperimentConfig: horizon must be an integer multiple of control_step");
    }
    return n;
}

int substeps_for(const ExperimentConfig& config, double dt) {
    if (config.substeps_per_second < 1) {
        throw std::invalid_argument("ExperimentConfig: substeps_per_second must be >= 1");
    }
    return std::max(1, static_cast<int>(std::lround(dt * config.substeps_per_second)));
}

void check_table(const ExperimentConfig& config, const QTable& q) {
    if (q.n_states() != config.encoder.n_states() ||
        q.n_actions() != config.agent.actions.size()) {
        throw std::invalid_argument("Q-table dimensions do not match encoder/action set");
    }
}

} // namespace

double episode_mse(const EpisodeRecord& record) {
    if (record.apl.empty() || record.apl.size() != record.rpl.size()) {
        throw std::invalid_argument("episode_mse: empty or inconsistent record");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < record.apl.size(); ++i) {
        const double error = record.apl[i] - record.rpl[i];
        total += error * error;
    }
    return total / static_cast<double>(record.apl.size());
}

std::vector<double> smooth_curve(const std::vector<double>& values, int window) {
    if (window < 1) {
        throw std::invalid_argument("smooth_curve: window must be at least 1");
    }
    std::vector<double> out(values.size());
    double running = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        running += values[i];
        if (i >= static_cast<std::size_t>(window)) {
            running -= values[i - static_cast<std::size_t>(window)];
        }
        const auto span = std::min<std::size_t>(i + 1, static_cast<std::size_t>(window));
        out[i] = running / static_cast<double>(span);
    }
    return out;
}

SummaryStats summarize(std::vector<double> values) {
    if (values.empty()) {
        throw std::invalid_argument("summarize: empty input");
    }
    SummaryStats stats;
    const auto n = values.size();
    stats.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    std::sort(values.begin(), values.end());
    stats.median = (n % 2 == 1) ? values[n / 2]
                                : 0.5 * (values[n / 2 - 1] + values[n / 2]);
    if (n > 1) {
        double ss = 0.0;
        for (double v : values) {
            const double d = v - stats.mean;
            ss += d * d;
        }
        stats.stddev = std::sqrt(ss / static_cast<double>(n - 1));
    }
    return stats;
}

EpisodeRecord run_episode(const ExperimentConfig& config, const FeederConfig& feeder,
                          Policy policy, Rng& rng) {
    const int n_samples = sample_count(config);
    if (config.start_time < 0.0) {
        throw std::invalid_argument("ExperimentConfig: start_time must be non-negative");
    }
    if (auto* greedy = std::get_if<GreedyPolicy>(&policy)) {
        check_table(config, *greedy->q);
    }
    if (auto* learning = std::get_if<LearningPolicy>(&policy)) {
        check_table(config, *learning->q);
    }

    FeederState state = init_states(feeder, rng);
    if (config.start_time > 0.0) {
        state.bus_voltage = baseline_voltage();
        step_feeder(state, feeder, baseline_voltage(), config.start_time,
                    substeps_for(config, config.start_time));
    }

    EpisodeRecord record;
    record.times.reserve(n_samples);
    record.apl.reserve(n_samples);
    record.rpl.reserve(n_samples);
    record.voltages.reserve(n_samples);
    record.actions.reserve(n_samples);

    const int step_substeps = substeps_for(config, config.control_step);
    auto* learning = std::get_if<LearningPolicy>(&policy);

    for (int j = 0; j < n_samples; ++j) {
        const double t = config.start_time + j * config.control_step;
        const double apl = aggregate_power(state, feeder);
        const double rpl = rpl_at(config.profile, t);

        double k = 0.0;
        std::size_t state_index = 0;
        std::size_t action_index = 0;
        if (auto* fixed = std::get_if<FixedPolicy>(&policy)) {
            k = fixed->k;
        } else if (auto* greedy = std::get_if<GreedyPolicy>(&policy)) {
            state_index = config.encoder.encode_state(apl, rpl);
            action_index = greedy->q->argmax_action(state_index);
            k = config.agent.actions[action_index];
        } else {
            state_index = config.encoder.encode_state(apl, rpl);
            action_index = select_action(*learning->q, state_index, learning->eps, rng);
            k = config.agent.actions[action_index];
        }

        const double voltage = command_voltage(k, apl, rpl, config.limits);

        record.times.push_back(t);
        record.apl.push_back(apl);
        record.rpl.push_back(rpl);
        record.voltages.push_back(voltage);
        record.actions.push_back(k);
        if (config.record_load_state) {
            std::vector<double> temps(state.loads.size());
            std::vector<int> switches(state.loads.size());
            for (std::size_t i = 0; i < state.loads.size(); ++i) {
                temps[i] = state.loads[i].temp;
                switches[i] = state.loads[i].on ? 1 : 0;
            }
            record.load_temps.push_back(std::move(temps));
            record.load_switches.push_back(std::move(switches));
        }

        step_feeder(state, feeder, voltage, config.control_step, step_substeps);

        if (learning != nullptr) {
            const double next_apl = aggregate_power(state, feeder);
            const double next_rpl = rpl_at(config.profile, t + config.control_step);
            const std::size_t next_state = config.encoder.encode_state(next_apl, next_rpl);
            const double r = reward(next_apl, next_rpl, config.agent.reward_scale);
            q_update(*learning->q, state_index, action_index, r, next_state,
                     config.agent.learning_rate, config.agent.discount);
        }
    }

    record.mse = episode_mse(record);
    return record;
}

SweepResult constant_sweep(const std::vector<double>& ks, const ExperimentConfig& config) {
    const FeederConfig feeder = default_feeder(config.stochastic, config.seed);
    const int n_samples = config.stochastic ? config.n_test_episodes : 1;

    SweepResult result;
    auto run_entry = [&](bool is_baseline, double k) {
        SweepEntry entry;
        entry.is_baseline = is_baseline;
        entry.k = k;
        entry.mses.reserve(static_cast<std::size_t>(n_samples));
        for (int i = 0; i < n_samples; ++i) {
            Rng rng(derive_seed(config.seed, kSweepStreamBase + static_cast<std::uint64_t>(i)));
            const EpisodeRecord record =
                run_episode(config, feeder, FixedPolicy{is_baseline ? 0.0 : k}, rng);
            entry.mses.push_back(record.mse);
            if (!is_baseline) {
                result.apl_history.insert(result.apl_history.end(), record.apl.begin(),
                                          record.apl.end());
            }
        }
        entry.stats = summarize(entry.mses);
        result.entries.push_back(std::move(entry));
    };

    run_entry(true, 0.0);
    for (double k : ks) {
        run_entry(false, k);
    }

    result.best_index = 0;
    double best_median = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < result.entries.size(); ++i) {
        if (result.entries[i].is_baseline) {
            continue;
        }
        if (result.entries[i].stats.median < best_median) {
            best_median = result.entries[i].stats.median;
            result.best_index = i;
        }
    }
    return result;
}

TrainResult train(const ExperimentConfig& config) {
    config.agent.validate();
    if (config.n_train_episodes < 1 || config.n_test_episodes < 0 || config.n_repeats < 1) {
        throw std::invalid_argument("train: episode/repeat counts out of range");
    }

    const FeederConfig feeder = default_feeder(config.stochastic, config.seed);
    const std::size_t n_states = config.encoder.n_states();
    const std::size_t n_actions = config.agent.actions.size();

    TrainResult result;
    std::vector<double> pooled_test;
    for (int r = 0; r < config.n_repeats; ++r) {
        const std::uint64_t repeat_seed = config.seed + static_cast<std::uint64_t>(r);
        Rng train_rng(repeat_seed);
        QTable q(n_states, n_actions);

        std::vector<double> episode_mses;
        episode_mses.reserve(static_cast<std::size_t>(config.n_train_episodes));
        for (int e = 0; e < config.n_train_episodes; ++e) {
            const double eps = decay_exploration(config.agent.exploration_rate,
                                                 config.agent.exploration_decay, e);
            const EpisodeRecord record =
                run_episode(config, feeder, LearningPolicy{&q, eps}, train_rng);
            episode_mses.push_back(record.mse);
            result.apl_history.insert(result.apl_history.end(), record.apl.begin(),
                                      record.apl.end());
        }

        Rng test_rng(derive_seed(repeat_seed, kTestStreamTag));
        std::vector<double> test_mses;
        test_mses.reserve(static_cast<std::size_t>(config.n_test_episodes));
        for (int t = 0; t < config.n_test_episodes; ++t) {
            const EpisodeRecord record =
                run_episode(config, feeder, GreedyPolicy{&q}, test_rng);
            test_mses.push_back(record.mse);
        }

        pooled_test.insert(pooled_test.end(), test_mses.begin(), test_mses.end());
        result.train_mse.push_back(std::move(episode_mses));
        result.test_mse.push_back(std::move(test_mses));
        result.qtables.push_back(std::move(q));
    }

    result.smoothed_curve.assign(static_cast<std::size_t>(config.n_train_episodes), 0.0);
    for (const auto& curve : result.train_mse) {
        const std::vector<double> smoothed = smooth_curve(curve, config.smoothing_window);
        for (std::size_t i = 0; i < smoothed.size(); ++i) {
            result.smoothed_curve[i] += smoothed[i] / config.n_repeats;
        }
    }
    if (!pooled_test.empty()) {
        result.test_stats = summarize(pooled_test);
    }
    return result;
}

namespace {

std::vector<double> evaluate_with(const ExperimentConfig& config, Policy policy) {
    ExperimentConfig eval = config;
    if (config.test_horizon) {
        eval.horizon = *config.test_horizon;
        eval.test_horizon.reset();
    }
    const FeederConfig feeder = default_feeder(eval.stochastic, eval.seed);
    Rng rng(derive_seed(eval.seed, kTestStreamTag));
    std::vector<double> mses;
    mses.reserve(static_cast<std::size_t>(eval.n_test_episodes));
    for (int i = 0; i < eval.n_test_episodes; ++i) {
        mses.push_back(run_episode(eval, feeder, policy, rng).mse);
    }
    return mses;
}

} // namespace

std::vector<double> evaluate_policy(const ExperimentConfig& config, const QTable& q) {
    return evaluate_with(config, GreedyPolicy{&q});
}

std::vector<double> evaluate_constant(const ExperimentConfig& config, double k) {
    return evaluate_with(config, FixedPolicy{k});
}

GeneralizationResult generalization_run(const ExperimentConfig& config,
                                        const std::vector<double>& sweep_ks) {
    if (!config.test_horizon || *config.test_horizon < config.horizon) {
        throw std::invalid_argument("generalization_run: test_horizon must cover the horizon");
    }

    GeneralizationResult result;

    // Training-window sweep picks the competing constant action.
    ExperimentConfig train_window = config;
    train_window.test_horizon.reset();
    const SweepResult sweep = constant_sweep(sweep_ks, train_window);
    result.best_k = sweep.entries[sweep.best_index].k;
    result.constant_train_stats = sweep.entries[sweep.best_index].stats;

    result.training = train(train_window);

    // Both contenders are evaluated on the longer window with shared streams.
    for (int r = 0; r < config.n_repeats; ++r) {
        ExperimentConfig eval = config;
        eval.seed = config.seed + static_cast<std::uint64_t>(r);
        const std::vector<double> mses =
            evaluate_policy(eval, result.training.qtables[static_cast<std::size_t>(r)]);
        result.rl_test_mses.insert(result.rl_test_mses.end(), mses.begin(), mses.end());
    }
    result.constant_test_mses = evaluate_constant(config, result.best_k);

    result.rl_test_stats = summarize(result.rl_test_mses);
    result.constant_test_stats = summarize(result.constant_test_mses);
    return result;
}

} // namespace tclrl
