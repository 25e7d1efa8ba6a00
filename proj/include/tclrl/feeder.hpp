#pragma once

#include <cstdint>
#include <vector>

#include "tclrl/rng.hpp"

namespace tclrl {

/// Physical constants of one thermostatically controlled load.
struct TclParams {
    double thermal_resistance = 200.0; // °C/kW
    double rated_power = 0.14;         // p.u. at nominal voltage
    double ambient_temp = 32.0;        // °C
    double temp_min = 19.75;           // °C, lower hysteresis threshold
    double temp_max = 20.25;           // °C, upper hysteresis threshold
    double capacitance = 2.0;          // thermal capacitance, model units
    double conductance = 0.14;         // p.u., reproduces rated power at v = 1
};

/// Evolving state of one load.
struct TclState {
    double temp = 20.0;                  // °C
    bool on = false;                     // thermostat switch
    double effective_capacitance = 2.0;  // C for the deterministic case,
                                         // C + u * range for the stochastic one
};

/// A feeder of loads sharing one bus voltage.
struct FeederConfig {
    std::vector<TclParams> loads;
    bool stochastic = false;
    double capacitance_range = 4.5; // width of the stochastic capacitance band
    std::uint64_t rng_seed = 0;
};

struct FeederState {
    std::vector<TclState> loads;
    double time_s = 0.0;
    double bus_voltage = 1.0; // p.u., last commanded value
};

inline constexpr std::size_t kFeederSize = 20;

/// Standard 20-load feeder: identical thermal constants, capacitances spread
/// over [2.0, 6.3429].
FeederConfig default_feeder(bool stochastic, std::uint64_t seed);

/// Initial condition: loads 1-10 on, 11-20 off, all at 20 °C, t = 0, v = 1.
/// Stochastic configs draw one capacitance offset per load from `rng`.
FeederState init_states(const FeederConfig& config, Rng& rng);

/// Convenience overload seeding the draw from config.rng_seed.
FeederState init_states(const FeederConfig& config);

/// Instantaneous electrical power of one load: switch * g0 * v^2.
double tcl_power(const TclState& state, const TclParams& params, double voltage);

/// Right-hand side of the thermal ODE, °C/s:
///   dθ/dt = (-θ_a + θ + R * P_elec) / (R * C_eff)
/// with the voltage-dependent electrical power in the numerator.
double thermal_derivative(const TclState& state, const TclParams& params, double voltage);

/// Hysteresis rule: on below temp_min, off above temp_max, retained inside.
void update_switch(TclState& state, const TclParams& params);

/// Advances all loads by `dt` seconds at the commanded voltage, using explicit
/// Euler with `substeps` internal sub-steps and a switch check per sub-step.
void step_feeder(FeederState& state, const FeederConfig& config, double voltage,
                 double dt, int substeps);

/// Aggregate power at the point of common coupling (the APL), p.u.
double aggregate_power(const FeederState& state, const FeederConfig& config);

} // namespace tclrl
