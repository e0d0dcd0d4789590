#include "rcosc/validate.hpp"

#include <cmath>
#include <sstream>

#include "rcosc/analytic.hpp"

namespace rcosc {

namespace {

std::string num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

void check_opamp(const OpAmpModel& m, const char* role,
                 std::vector<Violation>& out) {
    if (!(m.gbw_hz > 0.0)) {
        out.push_back({Err::NON_POSITIVE_COMPONENT,
                       std::string(role) + " gbw_hz must be > 0, got " +
                           num(m.gbw_hz)});
    }
    if (!(m.slew_rate > 0.0)) {
        out.push_back({Err::NON_POSITIVE_COMPONENT,
                       std::string(role) + " slew_rate must be > 0, got " +
                           num(m.slew_rate)});
    }
    if (!(m.i_bias >= 0.0)) {
        out.push_back({Err::NON_POSITIVE_COMPONENT,
                       std::string(role) + " i_bias must be >= 0, got " +
                           num(m.i_bias)});
    }
    if (m.c_parasitic && !(*m.c_parasitic >= 0.0)) {
        out.push_back({Err::NON_POSITIVE_COMPONENT,
                       std::string(role) + " c_parasitic must be >= 0, got " +
                           num(*m.c_parasitic)});
    }
    if (m.delay_lh && !(*m.delay_lh >= 0.0)) {
        out.push_back({Err::NON_POSITIVE_COMPONENT,
                       std::string(role) + " delay_lh must be >= 0, got " +
                           num(*m.delay_lh)});
    }
    if (m.delay_hl && !(*m.delay_hl >= 0.0)) {
        out.push_back({Err::NON_POSITIVE_COMPONENT,
                       std::string(role) + " delay_hl must be >= 0, got " +
                           num(*m.delay_hl)});
    }
    if (!std::isfinite(m.v_offset)) {
        out.push_back({Err::NON_POSITIVE_COMPONENT,
                       std::string(role) + " v_offset must be finite"});
    }
}

} // namespace

std::vector<Violation> validate(const OscillatorConfig& config,
                                const NonIdealityProfile& profile) {
    std::vector<Violation> out;

    if (!(config.c_i > 0.0) || !std::isfinite(config.c_i)) {
        out.push_back({Err::NON_POSITIVE_COMPONENT,
                       "c_i must be a positive finite capacitance, got " +
                           num(config.c_i)});
    }
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
        out.push_back({Err::NON_POSITIVE_COMPONENT,
                       "alpha must lie in (0, 1), got " + num(config.alpha)});
    }
    if (!(config.v_p > 0.0) || !std::isfinite(config.v_p)) {
        out.push_back({Err::NON_POSITIVE_COMPONENT,
                       "v_p must be a positive finite voltage, got " +
                           num(config.v_p)});
    }
    if (!(config.xor_delay >= 0.0)) {
        out.push_back({Err::NON_POSITIVE_COMPONENT,
                       "xor_delay must be >= 0, got " + num(config.xor_delay)});
    }

    const double rx = config.sensor.r_x;
    if (std::isnan(rx) || std::isinf(rx)) {
        out.push_back({Err::NO_LEAKAGE_PATH,
                       "r_x must be finite; an open sensor cannot discharge "
                       "the integrator"});
    } else if (!(rx > 0.0)) {
        out.push_back({Err::NON_POSITIVE_COMPONENT,
                       "r_x must be > 0, got " + num(rx)});
    }
    if (!(config.sensor.c_x >= 0.0) || !std::isfinite(config.sensor.c_x)) {
        out.push_back({Err::NON_POSITIVE_COMPONENT,
                       "c_x must be >= 0 and finite, got " +
                           num(config.sensor.c_x)});
    }

    check_opamp(profile.integrator_opamp, "integrator_opamp", out);
    check_opamp(profile.schmitt_opamp, "schmitt_opamp", out);
    if (!(profile.zcd.delay_lh >= 0.0) || !(profile.zcd.delay_hl >= 0.0)) {
        out.push_back({Err::NON_POSITIVE_COMPONENT,
                       "zcd delays must be >= 0"});
    }
    if (!std::isfinite(profile.zcd.v_offset_z)) {
        out.push_back({Err::NON_POSITIVE_COMPONENT,
                       "zcd v_offset_z must be finite"});
    }

    if (!out.empty()) return out; // derived checks need sane inputs

    const double x = config.x_ratio();
    if (!(config.alpha > 2.0 * x)) {
        out.push_back({Err::CROSS_OVER,
                       "alpha must exceed 2*c_x/c_i = " + num(2.0 * x) +
                           "; the charge-transfer step would cross the "
                           "opposite threshold"});
        return out;
    }

    // The ramp must start above the detector threshold or the tp1/tp2 split
    // never happens. gamma is the closed-form charge-transfer loss.
    const double gamma_est =
        analytic::gamma(config, profile).gamma;
    const double start = config.v_p * (config.alpha - 2.0 * x - gamma_est);
    const double v_oz = profile.v_oz_eff();
    if (!(start > std::abs(v_oz))) {
        out.push_back({Err::CROSS_OVER,
                       "ramp start voltage " + num(start) +
                           " V does not clear the detector offset " +
                           num(v_oz) + " V"});
    }

    return out;
}

void validate_or_throw(const OscillatorConfig& config,
                       const NonIdealityProfile& profile) {
    const auto violations = validate(config, profile);
    if (!violations.empty()) {
        throw OscError(violations.front().code, violations.front().detail);
    }
}

} // namespace rcosc
