#pragma once

#include <utility>

#include "rcosc/types.hpp"

namespace rcosc::analytic {

// Loop-gain summary for the integrator stage: gamma is the fractional ramp
// lost to the finite-bandwidth charge transfer at each V_x step,
// slope_reduction = 1 + 1/G scales every ramp duration, and
// loop_gain_product = A0*w0*R_x*C_i. With the GBW effect disabled the
// breakdown degenerates to {0, 1, inf}.
struct GammaBreakdown {
    double gamma = 0.0;
    double slope_reduction = 1.0;
    double loop_gain_product = 0.0;
};

struct SlopeInfo {
    double sl_plus = 0.0;  // V/s, magnitude while V_R ramps up
    double sl_minus = 0.0; // V/s, magnitude while V_R ramps down
    bool slew_limited_plus = false;
    bool slew_limited_minus = false;
};

// Period of the conventional relaxation oscillator that charges the sensor
// capacitance through its own resistance: T = 4*alpha*r_x*c_x.
double conventional_period(double r_x, double c_x, double alpha);

// Sub-periods of the ideal modified oscillator:
// tp1 = tp3 = r_x*c_i*(alpha - 2X), tp2 = tp4 = alpha*r_x*c_i, X = c_x/c_i.
PeriodSet ideal_periods(const OscillatorConfig& config);

GammaBreakdown gamma(const OscillatorConfig& config,
                     const NonIdealityProfile& profile);

// Integrator output slope magnitudes for both ramp directions, each capped at
// the slew rate.
SlopeInfo integrator_slope(const OscillatorConfig& config,
                           const NonIdealityProfile& profile);

// Closed-form sub-periods with every enabled non-ideality applied: gamma and
// detector offset shorten or lengthen the ramps, offset voltage and bias
// current skew the half-cycles, slew limiting floors each ramp duration, and
// Schmitt/ZCD delays add on top.
PeriodSet nonideal_periods(const OscillatorConfig& config,
                           const NonIdealityProfile& profile);

// Half-cycle averaged closed forms. The leading first-order offset terms
// cancel in the average; the residual scales with v^2 and v*gamma_hat where
// v is the offset fraction v_os'/v_p.
AveragedPeriods averaged_nonideal_periods(const OscillatorConfig& config,
                                          const NonIdealityProfile& profile);

// Finite-bandwidth-only special case at the given A0*w0 (rad/s): offsets and
// slew limiting excluded. Returns the four sub-periods and the averaged pair.
std::pair<PeriodSet, AveragedPeriods>
gbw_only_periods(const OscillatorConfig& config, double a0w0, double c_p = 0.0);

// Ideal inversion of a measured (tp1-like, tp2-like) pair:
// r_x = tp2/(alpha*c_i), c_x = (alpha*c_i/2)*(1 - tp1/tp2). A capacitance
// below zero is returned with the negative flag set, signalling tp1 > tp2.
SensorEstimate estimate_ideal(double tp1_like, double tp2_like, double alpha,
                              double c_i, bool averaged = false);

// Inversion that compensates the closed-form non-idealities of the profile.
// Solves the forward model for (r_x, c_x) by fixed point: the capacitance
// step is the exact solution of the tp1/tp2 ratio equation at the current
// loop gain, the resistance step inverts the tp2 equation. Slew-floored tp1
// is detected and inverted through the slew branch instead. Stops when
// successive r_x differ by less than 1e-9 relative; 50 passes without
// convergence raise NO_CONVERGENCE.
SensorEstimate estimate_compensated(const PeriodSet& periods,
                                    const OscillatorConfig& config,
                                    const NonIdealityProfile& profile);

// Same compensation for half-cycle averaged measurements, inverting the
// averaged closed forms.
SensorEstimate estimate_compensated(const AveragedPeriods& periods,
                                    const OscillatorConfig& config,
                                    const NonIdealityProfile& profile);

// Signed percentage deviation 100*(measured - reference)/reference.
// A zero reference raises ZERO_REFERENCE.
double relative_error(double measured, double reference);

// Given target tp1/tp2 percentage errors in the finite-bandwidth-only model,
// recover the (c_i, alpha) pair that produces them for the given op-amp
// bandwidth and sensor. Solves the one-dimensional root problem in c_i.
struct RecoveredConfig {
    double c_i = 0.0;
    double alpha = 0.0;
    double loop_gain_product = 0.0;
    double tp1_err_pct = 0.0;
    double tp2_err_pct = 0.0;
    double t2_err_pct = 0.0; // averaged half-cycle error at the recovered point
};

RecoveredConfig recover_config(double a0w0, double r_x, double c_x,
                               double c_p = 0.0,
                               double target_tp1_err_pct = -52.76,
                               double target_tp2_err_pct = 26.74);

} // namespace rcosc::analytic
