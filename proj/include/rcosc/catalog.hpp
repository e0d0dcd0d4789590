#pragma once

#include <vector>

#include "rcosc/types.hpp"

namespace rcosc {

// Built-in op-amp models. Entries keep data-sheet fields that are not quoted
// (parasitic capacitance, propagation delay) unset rather than zeroed.
std::vector<OpAmpModel> builtin_catalog();

// Case-insensitive lookup; throws UNKNOWN_OPAMP listing the available names.
const OpAmpModel& find_opamp(const std::vector<OpAmpModel>& catalog,
                             const std::string& name);

// Surrogate for an ideal op-amp: A0*w0 = 1e12 rad/s, unlimited slew, no
// offset, no bias current, no delays.
OpAmpModel near_ideal_opamp();

// Profile built from a single op-amp serving as integrator and Schmitt
// trigger; the ZCD inherits the part's offset voltage and delay.
NonIdealityProfile profile_from_opamp(const OpAmpModel& opamp);

NonIdealityProfile near_ideal_profile();

} // namespace rcosc
