#include "tclrl/control.hpp"

#include <algorithm>

namespace tclrl {

double rpl_at(const ReferenceProfile& profile, double t) {
    if (profile.kind == ReferenceProfile::Kind::StepDown && t >= profile.step_time) {
        return profile.level_after;
    }
    return profile.level_before;
}

double command_voltage(double k, double apl, double rpl, const VoltageLimits& limits) {
    const double v = 1.0 + k * (rpl - apl);
    return std::clamp(v, limits.v_min, limits.v_max);
}

double baseline_voltage() {
    return 1.0;
}

} // namespace tclrl
