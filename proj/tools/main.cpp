#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tclrl/experiment.hpp"
#include "tclrl/io.hpp"

namespace fs = std::filesystem;
using namespace tclrl;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t begin = 0;
    while (true) {
        const std::size_t end = text.find(sep, begin);
        parts.push_back(text.substr(begin, end - begin));
        if (end == std::string::npos) {
            break;
        }
        begin = end + 1;
    }
    return parts;
}

double parse_number(const std::string& token, const std::string& what) {
    try {
        std::size_t used = 0;
        const double value = std::stod(token, &used);
        if (used != token.size()) {
            throw std::invalid_argument(token);
        }
        return value;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad " + what + ": '" + token + "'");
    }
}

ReferenceProfile parse_profile(const std::string& text) {
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (kind == "constant") {
        return ReferenceProfile::constant(parse_number(args, "profile level"));
    }
    if (kind == "step") {
        const auto parts = split(args, ',');
        if (parts.size() != 3) {
            throw std::invalid_argument("step profile needs before,after,time: '" + text + "'");
        }
        return ReferenceProfile::step(parse_number(parts[0], "profile level"),
                                      parse_number(parts[1], "profile level"),
                                      parse_number(parts[2], "profile step time"));
    }
    throw std::invalid_argument("unknown profile kind: '" + text + "'");
}

/// RPL axis: a pass-through bin for constant profiles, a two-bin split at the
/// midpoint between the step levels otherwise.
BinningSpec rpl_bins_for(const ReferenceProfile& profile) {
    if (profile.kind == ReferenceProfile::Kind::StepDown &&
        profile.level_before != profile.level_after) {
        const double lo = std::min(profile.level_before, profile.level_after);
        const double hi = std::max(profile.level_before, profile.level_after);
        return make_binning_spec({lo, 0.5 * (lo + hi), hi});
    }
    return passthrough_bin();
}

HistoricalDataset historical_for(const std::string& embedded, const std::string& fallback,
                                 const std::string& method) {
    const std::string file = embedded.empty() ? fallback : embedded;
    if (file.empty()) {
        throw std::runtime_error(method + " binning needs a historical data file "
                                          "(embed it or pass --historical)");
    }
    return load_historical(file);
}

/// Grammar: equal:lo,hi,n | fd[:file] | quantile:[file,]n | rpledge:lo,hi,n
BinningSpec parse_apl_binning(const std::string& text, const std::string& historical,
                              double rpl) {
    const auto colon = text.find(':');
    const std::string method = text.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (method == "equal") {
        const auto parts = split(args, ',');
        if (parts.size() != 3) {
            throw std::invalid_argument("equal binning needs lo,hi,n: '" + text + "'");
        }
        return equal_width_edges(parse_number(parts[0], "bin edge"),
                                 parse_number(parts[1], "bin edge"),
                                 static_cast<int>(parse_number(parts[2], "bin count")));
    }
    if (method == "fd") {
        return fd_edges(historical_for(args, historical, "fd"));
    }
    if (method == "quantile") {
        auto parts = split(args, ',');
        if (parts.empty() || parts.size() > 2) {
            throw std::invalid_argument("quantile binning needs [file,]n: '" + text + "'");
        }
        const std::string file = parts.size() == 2 ? parts[0] : "";
        const int n = static_cast<int>(parse_number(parts.back(), "bin count"));
        return quantile_edges(historical_for(file, historical, "quantile"), n);
    }
    if (method == "rpledge") {
        const auto parts = split(args, ',');
        if (parts.size() != 3) {
            throw std::invalid_argument("rpledge binning needs lo,hi,n: '" + text + "'");
        }
        return rpl_edge_edges(parse_number(parts[0], "bin edge"),
                              parse_number(parts[1], "bin edge"),
                              static_cast<int>(parse_number(parts[2], "bin count")), rpl);
    }
    throw std::invalid_argument("unknown binning method: '" + text + "'");
}

struct CliOptions {
    std::uint64_t seed = 0;
    bool stochastic = false;
    std::string profile = "constant:1.2";
    double horizon = 200.0;
    double start = 0.0;
    double step = 1.0;
    int repeats = 5;
    int episodes = 100;
    int tests = 50;
    int window = 20;
    int substeps = 100;
    std::string binning = "equal:0.9,1.7,10";
    std::string historical;
    std::string out;
    double vmin = 0.9;
    double vmax = 1.1;
};

void add_common_flags(CLI::App& cmd, CliOptions& opt, const std::string& default_out) {
    opt.out = default_out;
    cmd.add_option("--seed", opt.seed, "Base RNG seed");
    cmd.add_flag("--stochastic", opt.stochastic,
                 "Draw per-load capacitance offsets each episode");
    cmd.add_option("--profile", opt.profile,
                   "Reference profile: constant:<level> | step:<before>,<after>,<time>");
    cmd.add_option("--horizon", opt.horizon, "Controlled interval length, s");
    cmd.add_option("--start", opt.start, "Control start time, s (uncontrolled before)");
    cmd.add_option("--step", opt.step, "Control step, s");
    cmd.add_option("--out", opt.out, "Output directory");
    cmd.add_option("--vmin", opt.vmin, "Lower voltage limit, p.u.");
    cmd.add_option("--vmax", opt.vmax, "Upper voltage limit, p.u.");
    cmd.add_option("--substeps", opt.substeps, "Integrator sub-steps per second");
}

void add_binning_flags(CLI::App& cmd, CliOptions& opt) {
    cmd.add_option("--binning", opt.binning,
                   "equal:lo,hi,n | fd[:file] | quantile:[file,]n | rpledge:lo,hi,n");
    cmd.add_option("--historical", opt.historical,
                   "Historical APL file for fd/quantile binning");
}

ExperimentConfig build_config(const CliOptions& opt, bool with_binning) {
    ExperimentConfig config;
    config.start_time = opt.start;
    config.horizon = opt.horizon;
    config.control_step = opt.step;
    config.n_train_episodes = opt.episodes;
    config.n_test_episodes = opt.tests;
    config.n_repeats = opt.repeats;
    config.smoothing_window = opt.window;
    config.profile = parse_profile(opt.profile);
    config.stochastic = opt.stochastic;
    config.seed = opt.seed;
    config.limits = {opt.vmin, opt.vmax};
    config.substeps_per_second = opt.substeps;
    if (with_binning) {
        const double rpl = rpl_at(config.profile, config.start_time);
        config.encoder.apl_bins = parse_apl_binning(opt.binning, opt.historical, rpl);
        config.encoder.rpl_bins = rpl_bins_for(config.profile);
    }
    return config;
}

fs::path prepare_out_dir(const std::string& out) {
    const fs::path dir(out);
    fs::create_directories(dir);
    return dir;
}

void print_stats(const std::string& label, const SummaryStats& stats) {
    std::cout << label << ": median " << io::format_double(stats.median) << ", mean "
              << io::format_double(stats.mean) << ", std "
              << io::format_double(stats.stddev) << "\n";
}

int run_simulate(const CliOptions& opt, const std::optional<double>& fixed_k) {
    ExperimentConfig config = build_config(opt, false);
    config.record_load_state = true;

    const FeederConfig feeder = default_feeder(config.stochastic, config.seed);
    Rng rng(config.seed);
    const EpisodeRecord record =
        run_episode(config, feeder, FixedPolicy{fixed_k.value_or(0.0)}, rng);

    const fs::path dir = prepare_out_dir(opt.out);
    io::write_trajectory_csv(dir / "trajectory.csv", record);
    io::RunManifest manifest;
    manifest.command = "simulate";
    manifest.out_dir = opt.out;
    manifest.policy = fixed_k ? "k=" + io::format_double(*fixed_k) : "baseline";
    manifest.config = config;
    io::write_manifest(dir / "manifest.json", manifest);

    std::cout << "simulate: " << record.times.size() << " rows, episode MSE "
              << io::format_double(record.mse) << "\n";
    return 0;
}

int run_sweep(const CliOptions& opt, const std::vector<double>& ks) {
    const ExperimentConfig config = build_config(opt, false);
    const SweepResult result = constant_sweep(ks, config);

    const fs::path dir = prepare_out_dir(opt.out);
    io::write_sweep_csv(dir / "sweep.csv", result);
    io::write_historical(dir / "apl_samples.txt", result.apl_history,
                         "APL samples from constant-control runs");
    io::RunManifest manifest;
    manifest.command = "sweep";
    manifest.out_dir = opt.out;
    manifest.sweep_ks = ks;
    manifest.config = config;
    io::write_manifest(dir / "manifest.json", manifest);

    for (std::size_t i = 0; i < result.entries.size(); ++i) {
        const SweepEntry& entry = result.entries[i];
        const std::string label =
            entry.is_baseline ? "baseline" : "k=" + io::format_double(entry.k);
        print_stats(label + (i == result.best_index ? " [best]" : ""), entry.stats);
    }
    return 0;
}

int run_train(const CliOptions& opt) {
    const ExperimentConfig config = build_config(opt, true);
    const TrainResult result = train(config);

    const fs::path dir = prepare_out_dir(opt.out);
    io::write_training_curve_csv(dir / "training_curve.csv", result);
    io::write_test_mse_csv(dir / "test_mse.csv", result.test_mse);
    io::write_historical(dir / "apl_samples.txt", result.apl_history,
                         "APL samples from Q-learning training episodes");
    for (std::size_t r = 0; r < result.qtables.size(); ++r) {
        result.qtables[r].save(dir / ("qtable_r" + std::to_string(r) + ".txt"));
    }
    io::RunManifest manifest;
    manifest.command = "train";
    manifest.out_dir = opt.out;
    manifest.binning = opt.binning;
    manifest.policy = "agent";
    manifest.config = config;
    io::write_manifest(dir / "manifest.json", manifest);

    print_stats("pooled greedy-test MSE", result.test_stats);
    return 0;
}

int run_evaluate(const CliOptions& opt, const std::string& qtable_file,
                 const std::optional<double>& test_horizon) {
    ExperimentConfig config = build_config(opt, true);
    if (test_horizon) {
        config.test_horizon = *test_horizon;
    }
    const QTable q = QTable::load(fs::path(qtable_file));
    const std::vector<double> mses = evaluate_policy(config, q);

    const fs::path dir = prepare_out_dir(opt.out);
    io::write_eval_csv(dir / "test_mse.csv", mses);
    io::RunManifest manifest;
    manifest.command = "evaluate";
    manifest.out_dir = opt.out;
    manifest.binning = opt.binning;
    manifest.policy = "agent";
    manifest.qtable_file = qtable_file;
    manifest.config = config;
    io::write_manifest(dir / "manifest.json", manifest);

    print_stats("greedy-test MSE", summarize(mses));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Voltage control of a thermostatically controlled load feeder: "
                 "simulation, constant-control sweeps, and tabular Q-learning"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read defaults from a key-value config file");

    CliOptions sim_opt;
    CliOptions sweep_opt;
    CliOptions train_opt;
    CliOptions eval_opt;

    auto* simulate = app.add_subcommand("simulate", "Run one episode and dump the trajectory");
    add_common_flags(*simulate, sim_opt, "simulate_out");
    bool baseline = false;
    std::optional<double> fixed_k;
    simulate->add_flag("--baseline", baseline, "Uncontrolled run at nominal voltage");
    simulate->add_option("--k", fixed_k, "Constant proportional coefficient");

    auto* sweep = app.add_subcommand("sweep", "Baseline plus constant-control sweep");
    add_common_flags(*sweep, sweep_opt, "sweep_out");
    std::vector<double> ks(kDefaultSweepKs.begin(), kDefaultSweepKs.end());
    sweep->add_option("--ks", ks, "Constant k values to sweep");
    sweep->add_option("--tests", sweep_opt.tests, "Samples per k for stochastic sweeps");

    auto* train_cmd = app.add_subcommand("train", "Train the Q-learning controller");
    add_common_flags(*train_cmd, train_opt, "train_out");
    train_cmd->add_option("--repeats", train_opt.repeats, "Independent training repeats");
    train_cmd->add_option("--episodes", train_opt.episodes, "Training episodes per repeat");
    train_cmd->add_option("--tests", train_opt.tests, "Greedy test episodes per repeat");
    train_cmd->add_option("--window", train_opt.window, "Smoothing window for the curve");
    add_binning_flags(*train_cmd, train_opt);

    auto* evaluate = app.add_subcommand("evaluate", "Greedy evaluation of a saved Q-table");
    add_common_flags(*evaluate, eval_opt, "evaluate_out");
    std::string qtable_file;
    std::optional<double> test_horizon;
    evaluate->add_option("--qtable", qtable_file, "Serialized Q-table file")->required();
    evaluate->add_option("--tests", eval_opt.tests, "Evaluation episodes");
    add_binning_flags(*evaluate, eval_opt);
    evaluate->add_option("--test-horizon", test_horizon,
                         "Evaluate over this horizon instead of the training one, s");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (simulate->parsed()) {
            if (baseline && fixed_k) {
                throw std::invalid_argument("pass either --baseline or --k, not both");
            }
            return run_simulate(sim_opt, fixed_k);
        }
        if (sweep->parsed()) {
            return run_sweep(sweep_opt, ks);
        }
        if (train_cmd->parsed()) {
            return run_train(train_opt);
        }
        return run_evaluate(eval_opt, qtable_file, test_horizon);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
}
