#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "tclrl/rng.hpp"

namespace tclrl {

/// Q-learning hyperparameters. The default factory reproduces the tuned set:
/// alpha 0.5, eps0 0.5, decay 0.9, gamma 0.6, actions {0.1, 0.5, 1, 2, 7},
/// reward = squared tracking error scaled by -1000.
struct AgentConfig {
    double learning_rate = 0.5;
    double exploration_rate = 0.5;
    double exploration_decay = 0.9;
    double discount = 0.6;
    std::vector<double> actions = {0.1, 0.5, 1.0, 2.0, 7.0}; // candidate k values
    double reward_scale = -1000.0;

    void validate() const; // throws std::invalid_argument on violation
};

AgentConfig default_agent_config();

/// Dense state-action value table, zero-initialized.
class QTable {
public:
    QTable(std::size_t n_states, std::size_t n_actions);

    std::size_t n_states() const { return n_states_; }
    std::size_t n_actions() const { return n_actions_; }

    double at(std::size_t state, std::size_t action) const;
    double& at(std::size_t state, std::size_t action);

    /// Greedy action for one state; ties break toward the lowest index.
    std::size_t argmax_action(std::size_t state) const;
    double max_value(std::size_t state) const;

    /// Text matrix, one row per state, space-separated, full precision.
    void save(std::ostream& out) const;
    void save(const std::filesystem::path& file) const;
    static QTable load(std::istream& in);
    static QTable load(const std::filesystem::path& file);

private:
    std::size_t index(std::size_t state, std::size_t action) const;

    std::size_t n_states_;
    std::size_t n_actions_;
    std::vector<double> values_;
};

/// Tracking reward: scale * (apl - rpl)^2.
double reward(double apl, double rpl, double scale);

/// Epsilon-greedy selection over Q(state, .).
std::size_t select_action(const QTable& q, std::size_t state, double eps, Rng& rng);

/// One temporal-difference update:
///   Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a))
void q_update(QTable& q, std::size_t s, std::size_t a, double r, std::size_t s_next,
              double alpha, double gamma);

/// Geometric per-episode schedule: eps0 * decay^episode.
double decay_exploration(double eps0, double decay, int episode);

/// Greedy action per state, same tie-break as select_action at eps = 0.
std::vector<std::size_t> greedy_policy(const QTable& q);

} // namespace tclrl
