#include "tclrl/feeder.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace tclrl {

namespace {

// Per-load thermal capacitances of the standard feeder.
constexpr std::array<double, kFeederSize> kCapacitances = {
    2.0,    2.2286, 2.4571, 2.6857, 2.9143, 3.1429, 3.3714, 3.6,    3.8286, 4.0571,
    4.2857, 4.5143, 4.7429, 4.9714, 5.2,    5.4286, 5.6571, 5.8857, 6.1143, 6.3429};

} // namespace

FeederConfig default_feeder(bool stochastic, std::uint64_t seed) {
    FeederConfig config;
    config.stochastic = stochastic;
    config.capacitance_range = 4.5;
    config.rng_seed = seed;
    config.loads.reserve(kFeederSize);
    for (double c : kCapacitances) {
        TclParams params;
        params.capacitance = c;
        config.loads.push_back(params);
    }
    return config;
}

FeederState init_states(const FeederConfig& config, Rng& rng) {
    FeederState state;
    state.time_s = 0.0;
    state.bus_voltage = 1.0;
    state.loads.resize(config.loads.size());
    for (std::size_t i = 0; i < config.loads.size(); ++i) {
        TclState& load = state.loads[i];
        load.temp = 20.0;
        load.on = i < config.loads.size() / 2;
        load.effective_capacitance = config.loads[i].capacitance;
        if (config.stochastic) {
            load.effective_capacitance += rng.uniform01() * config.capacitance_range;
        }
    }
    return state;
}

FeederState init_states(const FeederConfig& config) {
    Rng rng(config.rng_seed);
    return init_states(config, rng);
}

double tcl_power(const TclState& state, const TclParams& params, double voltage) {
    if (!state.on) {
        return 0.0;
    }
    return params.conductance * voltage * voltage;
}

double thermal_derivative(const TclState& state, const TclParams& params, double voltage) {
    if (state.effective_capacitance <= 0.0) {
        throw std::invalid_argument("thermal_derivative: effective capacitance must be positive");
    }
    const double power = tcl_power(state, params, voltage);
    return (-params.ambient_temp + state.temp + params.thermal_resistance * power) /
           (params.thermal_resistance * state.effective_capacitance);
}

void update_switch(TclState& state, const TclParams& params) {
    if (state.temp < params.temp_min) {
        state.on = true;
    } else if (state.temp > params.temp_max) {
        state.on = false;
    }
}

void step_feeder(FeederState& state, const FeederConfig& config, double voltage,
                 double dt, int substeps) {
    if (dt <= 0.0) {
        throw std::invalid_argument("step_feeder: dt must be positive");
    }
    if (substeps < 1) {
        throw std::invalid_argument("step_feeder: substeps must be at least 1");
    }
    const double h = dt / substeps;
    for (int sub = 0; sub < substeps; ++sub) {
        for (std::size_t i = 0; i < state.loads.size(); ++i) {
            TclState& load = state.loads[i];
            const TclParams& params = config.loads[i];
            load.temp += h * thermal_derivative(load, params, voltage);
            update_switch(load, params);
        }
    }
    state.time_s += dt;
    state.bus_voltage = voltage;
}

double aggregate_power(const FeederState& state, const FeederConfig& config) {
    double total = 0.0;
    for (std::size_t i = 0; i < state.loads.size(); ++i) {
        total += tcl_power(state.loads[i], config.loads[i], state.bus_voltage);
    }
    return total;
}

} // namespace tclrl
