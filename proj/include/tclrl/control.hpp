#pragma once

namespace tclrl {

/// Allowed bus voltage band, p.u.
struct VoltageLimits {
    double v_min = 0.9;
    double v_max = 1.1;
};

/// Reference power level as a function of time: constant, or a single step
/// from level_before to level_after at step_time.
struct ReferenceProfile {
    enum class Kind { Constant, StepDown };

    Kind kind = Kind::Constant;
    double level_before = 1.2; // p.u.
    double level_after = 1.2;  // p.u., used by StepDown
    double step_time = 0.0;    // s

    static ReferenceProfile constant(double level) {
        return {Kind::Constant, level, level, 0.0};
    }
    static ReferenceProfile step(double before, double after, double at) {
        return {Kind::StepDown, before, after, at};
    }
};

/// Reference power level at time t.
double rpl_at(const ReferenceProfile& profile, double t);

/// Proportional voltage law: clamp(1 + k * (rpl - apl), v_min, v_max).
double command_voltage(double k, double apl, double rpl, const VoltageLimits& limits);

/// Nominal voltage used when no controller is present.
double baseline_voltage();

} // namespace tclrl
