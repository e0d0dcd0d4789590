#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <string>

namespace rcosc {

// Behavioral op-amp parameters as data sheets quote them. gbw_hz is the
// unity-gain bandwidth in Hz; the loop equations need the product A0*w0 in
// rad/s, which a0w0() provides. Fields a data sheet leaves unspecified stay
// empty instead of silently becoming zero; the *_or_zero() accessors make the
// assumed default explicit at the call site.
struct OpAmpModel {
    std::string name;
    double gbw_hz = 0.0;
    double slew_rate = 0.0; // V/s
    double v_offset = 0.0;  // V
    double i_bias = 0.0;    // A
    std::optional<double> c_parasitic; // F
    std::optional<double> delay_lh;    // s
    std::optional<double> delay_hl;    // s

    double a0w0() const { return 2.0 * std::numbers::pi * gbw_hz; }
    double c_parasitic_or_zero() const { return c_parasitic.value_or(0.0); }
    double delay_lh_or_zero() const { return delay_lh.value_or(0.0); }
    double delay_hl_or_zero() const { return delay_hl.value_or(0.0); }
    bool has_assumed_defaults() const {
        return !c_parasitic.has_value() || !delay_lh.has_value() ||
               !delay_hl.has_value();
    }
};

// Zero-crossing detector: input-referred offset plus propagation delays per
// output edge direction.
struct ComparatorModel {
    double v_offset_z = 0.0; // V
    double delay_lh = 0.0;   // s
    double delay_hl = 0.0;   // s
};

// The parallel R-C pair under measurement.
struct SensorRC {
    double r_x = 0.0; // ohm
    double c_x = 0.0; // F
};

struct OscillatorConfig {
    double c_i = 0.0;   // integration capacitor, F
    double alpha = 0.0; // Schmitt threshold ratio; thresholds at +/- alpha*v_p
    double v_p = 0.0;   // output rail magnitude, V
    SensorRC sensor;
    double xor_delay = 0.0; // XOR gate propagation delay, s

    double x_ratio() const { return sensor.c_x / c_i; }
};

enum class Effect { GBW, SLEW, OFFSET, BIAS, ZCD_OFFSET, DELAYS };

// Which op-amps drive the integrator and the Schmitt trigger, the ZCD
// comparator, and which non-ideal mechanisms are switched on. With every
// effect disabled the model collapses to the ideal oscillator.
struct NonIdealityProfile {
    OpAmpModel integrator_opamp;
    OpAmpModel schmitt_opamp;
    ComparatorModel zcd;
    std::set<Effect> enabled = all_effects();

    static std::set<Effect> all_effects() {
        return {Effect::GBW,  Effect::SLEW,       Effect::OFFSET,
                Effect::BIAS, Effect::ZCD_OFFSET, Effect::DELAYS};
    }

    bool on(Effect e) const { return enabled.count(e) != 0; }

    // Effective parameters with the toggles applied.
    double a0w0_eff() const {
        return on(Effect::GBW) ? integrator_opamp.a0w0()
                               : std::numeric_limits<double>::infinity();
    }
    double slew_eff() const {
        return on(Effect::SLEW) ? integrator_opamp.slew_rate
                                : std::numeric_limits<double>::infinity();
    }
    double v_os_eff() const {
        return on(Effect::OFFSET) ? integrator_opamp.v_offset : 0.0;
    }
    double i_b_eff() const {
        return on(Effect::BIAS) ? integrator_opamp.i_bias : 0.0;
    }
    double v_oz_eff() const {
        return on(Effect::ZCD_OFFSET) ? zcd.v_offset_z : 0.0;
    }
    double c_p_eff() const { return integrator_opamp.c_parasitic_or_zero(); }
    double schmitt_delay_lh_eff() const {
        return on(Effect::DELAYS) ? schmitt_opamp.delay_lh_or_zero() : 0.0;
    }
    double schmitt_delay_hl_eff() const {
        return on(Effect::DELAYS) ? schmitt_opamp.delay_hl_or_zero() : 0.0;
    }
    double zcd_delay_lh_eff() const {
        return on(Effect::DELAYS) ? zcd.delay_lh : 0.0;
    }
    double zcd_delay_hl_eff() const {
        return on(Effect::DELAYS) ? zcd.delay_hl : 0.0;
    }
    // Input-referred offset including the bias-current drop across the sensor
    // resistance.
    double v_os_prime_eff(double r_x) const {
        return v_os_eff() + i_b_eff() * r_x;
    }
};

// One oscillator cycle split at the Schmitt and detector output edges:
// tp1 runs from the rising V_x edge to the detector crossing, tp2 from there
// to the falling V_x edge; tp3 and tp4 mirror them on the negative half.
struct PeriodSet {
    double tp1 = 0.0;
    double tp2 = 0.0;
    double tp3 = 0.0;
    double tp4 = 0.0;

    double total() const { return tp1 + tp2 + tp3 + tp4; }
};

// Half-cycle averages t1 = (tp1+tp3)/2 and t2 = (tp2+tp4)/2 together with the
// offset-induced skew between the two half-cycles.
struct AveragedPeriods {
    double t1 = 0.0;
    double t2 = 0.0;
    double t_offset_skew = 0.0; // (tp3 - tp1) / 2, the offset-induced shift
};

enum class EstimateMethod { IDEAL_INV, COMPENSATED, IDEAL_INV_AVG, COMPENSATED_AVG };

const char* to_string(EstimateMethod m);
EstimateMethod estimate_method_from_string(const std::string& name);

struct SensorEstimate {
    double r_x_est = 0.0; // ohm
    double c_x_est = 0.0; // F
    EstimateMethod method = EstimateMethod::IDEAL_INV;
    int iterations = 0;    // fixed-point passes used by the compensated path
    bool negative = false; // capacitance came out below zero
};

} // namespace rcosc
