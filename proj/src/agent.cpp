#include "tclrl/agent.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace tclrl {

void AgentConfig::validate() const {
    auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (!in_unit(learning_rate) || !in_unit(exploration_rate) ||
        !in_unit(exploration_decay) || !in_unit(discount)) {
        throw std::invalid_argument("AgentConfig: rates must lie in [0, 1]");
    }
    if (actions.empty()) {
        throw std::invalid_argument("AgentConfig: action set must be non-empty");
    }
    if (!(reward_scale < 0.0)) {
        throw std::invalid_argument("AgentConfig: reward scale must be negative");
    }
}

AgentConfig default_agent_config() {
    return AgentConfig{};
}

QTable::QTable(std::size_t n_states, std::size_t n_actions)
    : n_states_(n_states), n_actions_(n_actions), values_(n_states * n_actions, 0.0) {
    if (n_states == 0 || n_actions == 0) {
        throw std::invalid_argument("QTable: dimensions must be positive");
    }
}

std::size_t QTable::index(std::size_t state, std::size_t action) const {
    if (state >= n_states_) {
        throw std::out_of_range("QTable: state index out of range");
    }
    if (action >= n_actions_) {
        throw std::out_of_range("QTable: action index out of range");
    }
    return state * n_actions_ + action;
}

double QTable::at(std::size_t state, std::size_t action) const {
    return values_[index(state, action)];
}

double& QTable::at(std::size_t state, std::size_t action) {
    return values_[index(state, action)];
}

std::size_t QTable::argmax_action(std::size_t state) const {
    std::size_t best = 0;
    double best_value = at(state, 0);
    for (std::size_t a = 1; a < n_actions_; ++a) {
        const double value = at(state, a);
        if (value > best_value) {
            best_value = value;
            best = a;
        }
    }
    return best;
}

double QTable::max_value(std::size_t state) const {
    return at(state, argmax_action(state));
}

void QTable::save(std::ostream& out) const {
    char buffer[64];
    for (std::size_t s = 0; s < n_states_; ++s) {
        for (std::size_t a = 0; a < n_actions_; ++a) {
            std::snprintf(buffer, sizeof(buffer), "%.17g", at(s, a));
            out << buffer << (a + 1 == n_actions_ ? "\n" : " ");
        }
    }
}

void QTable::save(const std::filesystem::path& file) const {
    std::ofstream out(file);
    if (!out) {
        throw std::runtime_error("cannot write Q-table file: " + file.string());
    }
    save(out);
}

QTable QTable::load(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        std::istringstream tokens(line);
        std::vector<double> row;
        double value = 0.0;
        while (tokens >> value) {
            row.push_back(value);
        }
        if (!tokens.eof()) {
            throw std::runtime_error("Q-table file: malformed numeric row");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw std::runtime_error("Q-table file: no rows");
    }
    const std::size_t n_actions = rows.front().size();
    for (const auto& row : rows) {
        if (row.size() != n_actions) {
            throw std::runtime_error("Q-table file: ragged rows");
        }
    }
    QTable q(rows.size(), n_actions);
    for (std::size_t s = 0; s < rows.size(); ++s) {
        for (std::size_t a = 0; a < n_actions; ++a) {
            q.at(s, a) = rows[s][a];
        }
    }
    return q;
}

QTable QTable::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw std::runtime_error("cannot open Q-table file: " + file.string());
    }
    return load(in);
}

double reward(double apl, double rpl, double scale) {
    const double error = apl - rpl;
    return scale * error * error;
}

std::size_t select_action(const QTable& q, std::size_t state, double eps, Rng& rng) {
    if (state >= q.n_states()) {
        throw std::out_of_range("select_action: state index out of range");
    }
    if (eps > 0.0 && rng.uniform01() < eps) {
        return rng.uniform_index(q.n_actions());
    }
    return q.argmax_action(state);
}

void q_update(QTable& q, std::size_t s, std::size_t a, double r, std::size_t s_next,
              double alpha, double gamma) {
    const double target = r + gamma * q.max_value(s_next);
    double& cell = q.at(s, a);
    cell += alpha * (target - cell);
}

double decay_exploration(double eps0, double decay, int episode) {
    if (episode < 0) {
        throw std::invalid_argument("decay_exploration: episode must be non-negative");
    }
    return eps0 * std::pow(decay, episode);
}

std::vector<std::size_t> greedy_policy(const QTable& q) {
    std::vector<std::size_t> policy(q.n_states());
    for (std::size_t s = 0; s < q.n_states(); ++s) {
        policy[s] = q.argmax_action(s);
    }
    return policy;
}

} // namespace tclrl
