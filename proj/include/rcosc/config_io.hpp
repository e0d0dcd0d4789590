#pragma once

#include <string>
#include <vector>

#include "rcosc/design.hpp"
#include "rcosc/sweep.hpp"
#include "rcosc/types.hpp"

namespace rcosc::io {

// Parses "330 pF", "0.3 V/us", "16 MHz", "6 nA" and plain numbers into SI
// base units. Accepts micro as "u" or the Unicode mu and ohm as "ohm" or the
// Unicode omega. Unknown suffixes raise PARSE_ERROR.
double parse_quantity(const std::string& text);

// Parses "all", "none", or a comma list of gbw, slew, offset, bias,
// zcd_offset, delays into an effect set.
std::set<Effect> parse_effect_list(const std::string& text);

struct ConfigBundle {
    OscillatorConfig config;
    NonIdealityProfile profile;
};

// Loads an oscillator configuration with its non-ideality profile from an
// INI-style file ([section] with key = value lines) or the JSON equivalent;
// the format is sniffed from the content. Op-amps may be referenced by
// catalog name or spelled out inline. Parse problems raise PARSE_ERROR with
// file and line context.
ConfigBundle load_config(const std::string& path);

design::DesignRequirements load_requirements(const std::string& path);

sweep::SweepSpec load_sweep(const std::string& path);

// Catalog serialization; numeric fields survive a round trip bit for bit.
std::string catalog_to_json(const std::vector<OpAmpModel>& catalog);
std::vector<OpAmpModel> catalog_from_json(const std::string& text);

} // namespace rcosc::io
