#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tclrl/feeder.hpp"
#include "tclrl/rng.hpp"

using namespace tclrl;

namespace {

// Closed-form solution of the thermal ODE between switch events:
//   theta(t) = theta_star + (theta0 - theta_star) * exp(t / (R * C_eff)),
//   theta_star = theta_a - R * P_elec.
// Independent oracle for the fixed-step integrator.
double crossing_time(const TclParams& p, double c_eff, double theta0, double theta_target,
                     bool on, double voltage) {
    const double power = on ? p.conductance * voltage * voltage : 0.0;
    const double theta_star = p.ambient_temp - p.thermal_resistance * power;
    return p.thermal_resistance * c_eff *
           std::log((theta_target - theta_star) / (theta0 - theta_star));
}

// Steps the feeder one sub-step at a time and reports when load `i` first
// changes switch state.
double simulated_first_flip(FeederState& state, const FeederConfig& config, std::size_t i,
                            double voltage, double h, double t_max) {
    const bool initial = state.loads[i].on;
    double t = 0.0;
    while (t < t_max) {
        step_feeder(state, config, voltage, h, 1);
        t += h;
        if (state.loads[i].on != initial) {
            return t;
        }
    }
    FAIL("load never switched");
    return -1.0;
}

} // namespace

TEST_CASE("default feeder matches the standard parameter set") {
    const FeederConfig config = default_feeder(false, 0);
    REQUIRE(config.loads.size() == 20);
    CHECK(config.loads.front().capacitance == doctest::Approx(2.0));
    CHECK(config.loads.back().capacitance == doctest::Approx(6.3429));
    CHECK(config.loads[1].capacitance == doctest::Approx(2.2286));
    CHECK(config.capacitance_range == doctest::Approx(4.5));
    for (const TclParams& p : config.loads) {
        CHECK(p.thermal_resistance == doctest::Approx(200.0));
        CHECK(p.rated_power == doctest::Approx(0.14));
        CHECK(p.ambient_temp == doctest::Approx(32.0));
        CHECK(p.temp_min == doctest::Approx(19.75));
        CHECK(p.temp_max == doctest::Approx(20.25));
        CHECK(p.conductance == doctest::Approx(0.14));
        CHECK(p.temp_min < p.temp_max);
    }
}

TEST_CASE("deterministic init: first half on, all at 20 C, capacitance unchanged") {
    const FeederConfig config = default_feeder(false, 0);
    const FeederState state = init_states(config);
    REQUIRE(state.loads.size() == 20);
    CHECK(state.time_s == 0.0);
    CHECK(state.bus_voltage == 1.0);
    for (std::size_t i = 0; i < 20; ++i) {
        CHECK(state.loads[i].on == (i < 10));
        CHECK(state.loads[i].temp == doctest::Approx(20.0));
        CHECK(state.loads[i].effective_capacitance ==
              doctest::Approx(config.loads[i].capacitance));
    }
}

TEST_CASE("stochastic init draws capacitance offsets within [C, C + 4.5]") {
    const FeederConfig config = default_feeder(true, 7);
    const FeederState a = init_states(config);
    const FeederState b = init_states(config);
    for (std::size_t i = 0; i < 20; ++i) {
        const double c = config.loads[i].capacitance;
        CHECK(a.loads[i].effective_capacitance >= c);
        CHECK(a.loads[i].effective_capacitance <= c + 4.5);
        // same seed, same draw
        CHECK(a.loads[i].effective_capacitance == b.loads[i].effective_capacitance);
    }

    Rng r1(3);
    Rng r2(4);
    const FeederState c1 = init_states(config, r1);
    const FeederState c2 = init_states(config, r2);
    bool any_differ = false;
    for (std::size_t i = 0; i < 20; ++i) {
        any_differ |= c1.loads[i].effective_capacitance != c2.loads[i].effective_capacitance;
    }
    CHECK(any_differ);
}

TEST_CASE("thermal derivative hand values") {
    TclParams params;
    TclState state{20.0, true, 2.0};
    CHECK(thermal_derivative(state, params, 1.0) == doctest::Approx(0.04));

    state.on = false;
    CHECK(thermal_derivative(state, params, 1.0) == doctest::Approx(-0.03));

    // zero of the numerator: theta = theta_a - R * P_elec
    state.on = true;
    state.temp = 32.0 - 200.0 * 0.14;
    CHECK(thermal_derivative(state, params, 1.0) == doctest::Approx(0.0));

    state.effective_capacitance = 0.0;
    CHECK_THROWS_AS(thermal_derivative(state, params, 1.0), std::invalid_argument);
}

TEST_CASE("switch hysteresis") {
    const TclParams params;
    TclState state{20.30, true, 2.0};
    update_switch(state, params);
    CHECK_FALSE(state.on);

    state = {19.70, false, 2.0};
    update_switch(state, params);
    CHECK(state.on);

    state = {20.00, true, 2.0};
    update_switch(state, params);
    CHECK(state.on);

    state = {20.00, false, 2.0};
    update_switch(state, params);
    CHECK_FALSE(state.on);
}

TEST_CASE("per-load power follows switch * g0 * v^2") {
    const TclParams params;
    TclState state{20.0, true, 2.0};
    CHECK(tcl_power(state, params, 1.0) == doctest::Approx(0.14));
    CHECK(tcl_power(state, params, 1.05) == doctest::Approx(0.15435));
    state.on = false;
    CHECK(tcl_power(state, params, 3.0) == doctest::Approx(0.0));
}

TEST_CASE("aggregate power sums per-load powers exactly") {
    const FeederConfig config = default_feeder(false, 0);
    FeederState state = init_states(config);
    CHECK(aggregate_power(state, config) == doctest::Approx(10 * 0.14));

    double manual = 0.0;
    for (std::size_t i = 0; i < 20; ++i) {
        manual += tcl_power(state.loads[i], config.loads[i], state.bus_voltage);
    }
    CHECK(aggregate_power(state, config) == manual);

    for (TclState& load : state.loads) {
        load.on = false;
    }
    CHECK(aggregate_power(state, config) == 0.0);

    for (TclState& load : state.loads) {
        load.on = true;
    }
    const double at_one = aggregate_power(state, config);
    state.bus_voltage = 2.0;
    CHECK(aggregate_power(state, config) == doctest::Approx(4.0 * at_one));
}

TEST_CASE("step_feeder validates inputs and is continuous for tiny steps") {
    const FeederConfig config = default_feeder(false, 0);
    FeederState state = init_states(config);
    CHECK_THROWS_AS(step_feeder(state, config, 1.0, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(step_feeder(state, config, 1.0, 1.0, 0), std::invalid_argument);

    FeederState tiny = init_states(config);
    step_feeder(tiny, config, 1.0, 1e-9, 1);
    for (std::size_t i = 0; i < 20; ++i) {
        CHECK(std::abs(tiny.loads[i].temp - 20.0) <= 1e-9 * 0.05);
    }
}

TEST_CASE("step_feeder is deterministic") {
    const FeederConfig config = default_feeder(false, 0);
    FeederState a = init_states(config);
    FeederState b = init_states(config);
    for (int i = 0; i < 50; ++i) {
        const double v = 0.9 + 0.01 * (i % 20);
        step_feeder(a, config, v, 1.0, 100);
        step_feeder(b, config, v, 1.0, 100);
    }
    for (std::size_t i = 0; i < 20; ++i) {
        CHECK(a.loads[i].temp == b.loads[i].temp);
        CHECK(a.loads[i].on == b.loads[i].on);
    }
}

TEST_CASE("first switch time matches the closed-form oracle") {
    const FeederConfig config = default_feeder(false, 0);
    const double h = 0.01;

    // Load 1 (on, C = 2.0) crosses 20.25 near 400 * ln(16.25/16) ~ 6.20 s.
    const double expected =
        crossing_time(config.loads[0], 2.0, 20.0, 20.25, true, 1.0);
    CHECK(expected == doctest::Approx(6.2016).epsilon(1e-3));

    FeederState state = init_states(config);
    const double simulated = simulated_first_flip(state, config, 0, 1.0, h, 30.0);
    CHECK(std::abs(simulated - expected) <= h + 1e-12);
}

TEST_CASE("switch events stay on the closed-form solution for every load") {
    const FeederConfig config = default_feeder(false, 0);
    const double h = 0.01;
    const double voltage = 1.0;

    FeederState state = init_states(config);
    std::vector<bool> previous(20);
    std::vector<double> phase_start_temp(20, 20.0);
    std::vector<double> phase_start_time(20, 0.0);
    std::vector<int> events_seen(20, 0);
    for (std::size_t i = 0; i < 20; ++i) {
        previous[i] = state.loads[i].on;
    }

    double t = 0.0;
    while (t < 120.0) {
        step_feeder(state, config, voltage, h, 1);
        t += h;
        for (std::size_t i = 0; i < 20; ++i) {
            if (state.loads[i].on == previous[i]) {
                continue;
            }
            const TclParams& p = config.loads[i];
            const double target = previous[i] ? p.temp_max : p.temp_min;
            const double predicted =
                phase_start_time[i] + crossing_time(p, state.loads[i].effective_capacitance,
                                                    phase_start_temp[i], target, previous[i],
                                                    voltage);
            // detection lands within one sub-step after the true crossing,
            // plus a small explicit-Euler lag
            CHECK(t - predicted >= -1e-9);
            CHECK(t - predicted <= h + 1e-3);
            // next phase starts from the simulated post-crossing temperature
            phase_start_temp[i] = state.loads[i].temp;
            phase_start_time[i] = t;
            previous[i] = state.loads[i].on;
            ++events_seen[i];
        }
    }
    for (std::size_t i = 0; i < 20; ++i) {
        CHECK(events_seen[i] >= 2); // every load saw both an on and an off phase
    }
}

TEST_CASE("temperatures stay within one sub-step of the hysteresis band") {
    const FeederConfig config = default_feeder(false, 0);
    FeederState state = init_states(config);
    Rng rng(11);

    // bound on |dtheta/dt| for v in [0.9, 1.1] within the band
    double max_rate = 0.0;
    for (std::size_t i = 0; i < 20; ++i) {
        TclState probe{20.25, true, state.loads[i].effective_capacitance};
        max_rate = std::max(max_rate,
                            std::abs(thermal_derivative(probe, config.loads[i], 1.1)));
        probe = {19.75, false, state.loads[i].effective_capacitance};
        max_rate = std::max(max_rate,
                            std::abs(thermal_derivative(probe, config.loads[i], 1.1)));
    }
    const double slack = max_rate * 0.01 + 1e-12;

    for (int step = 0; step < 600; ++step) {
        const double v = rng.uniform(0.9, 1.1);
        step_feeder(state, config, v, 1.0, 100);
        for (std::size_t i = 0; i < 20; ++i) {
            CHECK(state.loads[i].temp >= 19.75 - slack);
            CHECK(state.loads[i].temp <= 20.25 + slack);
        }
    }
}

TEST_CASE("no chattering: switch flips only at band crossings") {
    const FeederConfig config = default_feeder(false, 0);
    FeederState state = init_states(config);
    std::vector<bool> previous(20);
    for (std::size_t i = 0; i < 20; ++i) {
        previous[i] = state.loads[i].on;
    }
    for (int step = 0; step < 8000; ++step) {
        step_feeder(state, config, 1.0, 0.01, 1);
        for (std::size_t i = 0; i < 20; ++i) {
            if (state.loads[i].on != previous[i]) {
                if (previous[i]) {
                    CHECK(state.loads[i].temp > config.loads[i].temp_max);
                } else {
                    CHECK(state.loads[i].temp < config.loads[i].temp_min);
                }
                previous[i] = state.loads[i].on;
            }
        }
    }
}
