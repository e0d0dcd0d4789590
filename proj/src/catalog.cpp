#include "rcosc/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <sstream>

#include "rcosc/errors.hpp"

namespace rcosc {

const char* to_string(Err code) {
    switch (code) {
    case Err::CROSS_OVER: return "CROSS_OVER";
    case Err::NON_POSITIVE_COMPONENT: return "NON_POSITIVE_COMPONENT";
    case Err::NO_LEAKAGE_PATH: return "NO_LEAKAGE_PATH";
    case Err::ZERO_REFERENCE: return "ZERO_REFERENCE";
    case Err::NEGATIVE_PERIOD: return "NEGATIVE_PERIOD";
    case Err::NEGATIVE_ESTIMATE: return "NEGATIVE_ESTIMATE";
    case Err::NO_CONVERGENCE: return "NO_CONVERGENCE";
    case Err::TIMER_OVERFLOW: return "TIMER_OVERFLOW";
    case Err::INSUFFICIENT_SAMPLES: return "INSUFFICIENT_SAMPLES";
    case Err::ZERO_VARIANCE: return "ZERO_VARIANCE";
    case Err::INSUFFICIENT_CYCLES: return "INSUFFICIENT_CYCLES";
    case Err::MISORDERED_EDGES: return "MISORDERED_EDGES";
    case Err::NO_OSCILLATION: return "NO_OSCILLATION";
    case Err::SOLVER_FAILURE: return "SOLVER_FAILURE";
    case Err::EMPTY_CATALOG: return "EMPTY_CATALOG";
    case Err::UNKNOWN_OPAMP: return "UNKNOWN_OPAMP";
    case Err::PARSE_ERROR: return "PARSE_ERROR";
    case Err::GRID_CAP_EXCEEDED: return "GRID_CAP_EXCEEDED";
    }
    return "UNKNOWN";
}

const char* to_string(EstimateMethod m) {
    switch (m) {
    case EstimateMethod::IDEAL_INV: return "IDEAL_INV";
    case EstimateMethod::COMPENSATED: return "COMPENSATED";
    case EstimateMethod::IDEAL_INV_AVG: return "IDEAL_INV_AVG";
    case EstimateMethod::COMPENSATED_AVG: return "COMPENSATED_AVG";
    }
    return "UNKNOWN";
}

EstimateMethod estimate_method_from_string(const std::string& name) {
    if (name == "IDEAL_INV") return EstimateMethod::IDEAL_INV;
    if (name == "COMPENSATED") return EstimateMethod::COMPENSATED;
    if (name == "IDEAL_INV_AVG") return EstimateMethod::IDEAL_INV_AVG;
    if (name == "COMPENSATED_AVG") return EstimateMethod::COMPENSATED_AVG;
    throw OscError(Err::PARSE_ERROR, "unknown estimate method '" + name +
                       "'; expected IDEAL_INV, COMPENSATED, IDEAL_INV_AVG or "
                       "COMPENSATED_AVG");
}

std::vector<OpAmpModel> builtin_catalog() {
    std::vector<OpAmpModel> cat;

    OpAmpModel ad741;
    ad741.name = "AD741";
    ad741.gbw_hz = 1e6;
    ad741.slew_rate = 0.5e6;
    ad741.v_offset = 5e-3;
    ad741.i_bias = 500e-9;
    ad741.delay_lh = 300e-9;
    ad741.delay_hl = 300e-9;
    cat.push_back(ad741);

    OpAmpModel lt1360;
    lt1360.name = "LT1360";
    lt1360.gbw_hz = 60e6;
    lt1360.slew_rate = 800e6;
    lt1360.v_offset = 0.3e-3;
    lt1360.i_bias = 250e-9;
    lt1360.c_parasitic = 4e-12;
    cat.push_back(lt1360);

    OpAmpModel tl071;
    tl071.name = "TL071";
    tl071.gbw_hz = 5.25e6;
    tl071.slew_rate = 29e6;
    tl071.v_offset = 4e-3;
    tl071.i_bias = 0.1e-9;
    tl071.c_parasitic = 2e-12;
    tl071.delay_lh = 310e-9;
    tl071.delay_hl = 310e-9;
    cat.push_back(tl071);

    OpAmpModel opa177;
    opa177.name = "OPA177";
    opa177.gbw_hz = 0.6e6;
    opa177.slew_rate = 0.3e6;
    opa177.v_offset = 0.6e-3;
    opa177.i_bias = 6e-9;
    cat.push_back(opa177);

    OpAmpModel ltc1049;
    ltc1049.name = "LTC1049";
    ltc1049.gbw_hz = 0.8e6;
    ltc1049.slew_rate = 0.8e6;
    ltc1049.v_offset = 0.01e-3;
    ltc1049.i_bias = 0.05e-9;
    cat.push_back(ltc1049);

    return cat;
}

namespace {

std::string lower(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

} // namespace

const OpAmpModel& find_opamp(const std::vector<OpAmpModel>& catalog,
                             const std::string& name) {
    if (catalog.empty()) {
        throw OscError(Err::EMPTY_CATALOG, "op-amp catalog is empty");
    }
    const std::string key = lower(name);
    for (const auto& entry : catalog) {
        if (lower(entry.name) == key) return entry;
    }
    std::ostringstream msg;
    msg << "no op-amp named '" << name << "'; available:";
    for (const auto& entry : catalog) msg << ' ' << entry.name;
    throw OscError(Err::UNKNOWN_OPAMP, msg.str());
}

OpAmpModel near_ideal_opamp() {
    OpAmpModel m;
    m.name = "near-ideal";
    m.gbw_hz = 1e12 / (2.0 * std::numbers::pi); // A0*w0 = 1e12 rad/s
    m.slew_rate = std::numeric_limits<double>::infinity();
    m.v_offset = 0.0;
    m.i_bias = 0.0;
    m.c_parasitic = 0.0;
    m.delay_lh = 0.0;
    m.delay_hl = 0.0;
    return m;
}

NonIdealityProfile profile_from_opamp(const OpAmpModel& opamp) {
    NonIdealityProfile p;
    p.integrator_opamp = opamp;
    p.schmitt_opamp = opamp;
    p.zcd.v_offset_z = opamp.v_offset;
    p.zcd.delay_lh = opamp.delay_lh_or_zero();
    p.zcd.delay_hl = opamp.delay_hl_or_zero();
    return p;
}

NonIdealityProfile near_ideal_profile() {
    return profile_from_opamp(near_ideal_opamp());
}

} // namespace rcosc
