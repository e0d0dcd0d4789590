#pragma once

#include <vector>

#include "rcosc/errors.hpp"
#include "rcosc/types.hpp"

namespace rcosc {

// Structural checks on a configuration and profile. Returns one entry per
// violated invariant; an empty list means the oscillator is well posed:
// positive components, 0 < alpha < 1, a finite leakage resistance,
// alpha > 2*C_x/C_i, and a ramp start voltage that clears the detector
// threshold. Never throws, even on NaN or infinite inputs.
std::vector<Violation> validate(const OscillatorConfig& config,
                                const NonIdealityProfile& profile);

// Throws OscError carrying the first violation, if any.
void validate_or_throw(const OscillatorConfig& config,
                       const NonIdealityProfile& profile);

} // namespace rcosc
