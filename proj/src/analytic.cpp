#include "rcosc/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rcosc/errors.hpp"

namespace rcosc::analytic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw OscError(Err::NON_POSITIVE_COMPONENT,
                       std::string(what) + " must be positive, got " + num(v));
    }
}

// Affine decomposition gamma = a + b*c_x at fixed loop gain, used by the
// compensated estimator: gamma = (1 + (c_x+c_p)/c_i + (c_x/c_i)(1+G))*k with
// k = G/(1+G)^2 splits into a = (1 + c_p/c_i)*k and b = (2+G)*k/c_i.
struct GammaAffine {
    double a = 0.0;
    double b = 0.0;
    double s = 1.0;         // slope reduction 1 + 1/G
    double inv_a0w0 = 0.0;  // 0 when bandwidth is unlimited
};

GammaAffine gamma_affine(double a0w0, double r_x, double c_i, double c_p) {
    GammaAffine out;
    if (!std::isfinite(a0w0)) return out;
    const double g = a0w0 * r_x * c_i;
    const double k = g / ((1.0 + g) * (1.0 + g));
    out.a = (1.0 + c_p / c_i) * k;
    out.b = (2.0 + g) * k / c_i;
    out.s = 1.0 + 1.0 / g;
    out.inv_a0w0 = 1.0 / a0w0;
    return out;
}

struct DelayTerms {
    double tp1 = 0.0;
    double tp2 = 0.0;
    double tp3 = 0.0;
    double tp4 = 0.0;
    double avg = 0.0; // (mean Schmitt delay + mean detector delay)/2
};

DelayTerms delay_terms(const NonIdealityProfile& profile) {
    const double s_lh = profile.schmitt_delay_lh_eff();
    const double s_hl = profile.schmitt_delay_hl_eff();
    const double z_lh = profile.zcd_delay_lh_eff();
    const double z_hl = profile.zcd_delay_hl_eff();
    DelayTerms d;
    d.tp1 = 0.5 * (s_lh + z_lh);
    d.tp2 = 0.5 * (s_hl + z_lh);
    d.tp3 = 0.5 * (s_hl + z_hl);
    d.tp4 = 0.5 * (z_hl + s_lh);
    d.avg = 0.5 * (0.5 * (s_lh + s_hl) + 0.5 * (z_lh + z_hl));
    return d;
}

} // namespace

double conventional_period(double r_x, double c_x, double alpha) {
    require_positive(r_x, "r_x");
    require_positive(c_x, "c_x");
    require_positive(alpha, "alpha");
    return 4.0 * alpha * r_x * c_x;
}

PeriodSet ideal_periods(const OscillatorConfig& config) {
    require_positive(config.c_i, "c_i");
    require_positive(config.alpha, "alpha");
    require_positive(config.sensor.r_x, "r_x");
    if (!(config.sensor.c_x >= 0.0)) {
        throw OscError(Err::NON_POSITIVE_COMPONENT,
                       "c_x must be >= 0, got " + num(config.sensor.c_x));
    }
    const double x = config.x_ratio();
    if (!(config.alpha > 2.0 * x)) {
        throw OscError(Err::CROSS_OVER,
                       "alpha = " + num(config.alpha) +
                           " must exceed 2*c_x/c_i = " + num(2.0 * x));
    }
    const double rc = config.sensor.r_x * config.c_i;
    PeriodSet p;
    p.tp1 = p.tp3 = rc * (config.alpha - 2.0 * x);
    p.tp2 = p.tp4 = rc * config.alpha;
    return p;
}

GammaBreakdown gamma(const OscillatorConfig& config,
                     const NonIdealityProfile& profile) {
    GammaBreakdown out;
    if (!profile.on(Effect::GBW)) {
        out.loop_gain_product = kInf;
        return out;
    }
    const double g =
        profile.integrator_opamp.a0w0() * config.sensor.r_x * config.c_i;
    const double x = config.x_ratio();
    const double cp = profile.c_p_eff();
    out.gamma = (1.0 + (config.sensor.c_x + cp) / config.c_i + x * (1.0 + g)) *
                g / ((1.0 + g) * (1.0 + g));
    out.slope_reduction = 1.0 + 1.0 / g;
    out.loop_gain_product = g;
    return out;
}

SlopeInfo integrator_slope(const OscillatorConfig& config,
                           const NonIdealityProfile& profile) {
    const double rx = config.sensor.r_x;
    const double s = gamma(config, profile).slope_reduction;
    const double v_os_prime = profile.v_os_prime_eff(rx);
    const double sr = profile.slew_eff();
    // The offset shifts the two ramp directions asymmetrically: the drive
    // toward the positive rail sees V_p minus the total offset drop, the
    // other direction sees it added.
    const double shift = v_os_prime + profile.i_b_eff() * rx;
    const double linear_plus = (config.v_p - shift) / (rx * config.c_i * s);
    const double linear_minus = (config.v_p + shift) / (rx * config.c_i * s);
    SlopeInfo out;
    out.sl_plus = std::min(linear_plus, sr);
    out.sl_minus = std::min(linear_minus, sr);
    out.slew_limited_plus = sr < linear_plus;
    out.slew_limited_minus = sr < linear_minus;
    return out;
}

PeriodSet nonideal_periods(const OscillatorConfig& config,
                           const NonIdealityProfile& profile) {
    const double alpha = config.alpha;
    const double ci = config.c_i;
    const double vp = config.v_p;
    const double rx = config.sensor.r_x;
    require_positive(ci, "c_i");
    require_positive(alpha, "alpha");
    require_positive(vp, "v_p");
    require_positive(rx, "r_x");

    const double x = config.x_ratio();
    const double am2x = alpha - 2.0 * x;
    if (!(am2x > 0.0)) {
        throw OscError(Err::CROSS_OVER,
                       "alpha must exceed 2*c_x/c_i = " + num(2.0 * x));
    }

    const GammaBreakdown gb = gamma(config, profile);
    const double s = gb.slope_reduction;
    const double gh = gb.gamma + profile.v_oz_eff() / vp;
    const double v = profile.v_os_prime_eff(rx) / vp;
    if (!(1.0 + v > 0.0) || !(1.0 - v > 0.0)) {
        throw OscError(Err::NEGATIVE_PERIOD,
                       "effective offset v_os' = " + num(v * vp) +
                           " V reaches the rail v_p");
    }

    const double b1 = 1.0 - gh / am2x; // tp1 ramp fraction
    const double b2 = 1.0 + gh / alpha;
    const double b3 = 1.0 + gh / am2x;
    const double b4 = 1.0 - gh / alpha;
    if (!(b1 > 0.0)) {
        throw OscError(Err::NEGATIVE_PERIOD,
                       "tp1 bracket 1 - (gamma + v_oz/v_p)/(alpha - 2X) = " +
                           num(b1) + " is not positive");
    }
    if (!(b2 > 0.0)) {
        throw OscError(Err::NEGATIVE_PERIOD,
                       "tp2 bracket 1 + (gamma + v_oz/v_p)/alpha = " + num(b2) +
                           " is not positive");
    }
    if (!(b3 > 0.0)) {
        throw OscError(Err::NEGATIVE_PERIOD,
                       "tp3 bracket 1 + (gamma + v_oz/v_p)/(alpha - 2X) = " +
                           num(b3) + " is not positive");
    }
    if (!(b4 > 0.0)) {
        throw OscError(Err::NEGATIVE_PERIOD,
                       "tp4 bracket 1 - (gamma + v_oz/v_p)/alpha = " + num(b4) +
                           " is not positive");
    }

    const double sr = profile.slew_eff();
    const double slew_floor = std::isfinite(sr) ? am2x * vp / sr : 0.0;
    const double rc = rx * ci;
    const DelayTerms d = delay_terms(profile);

    PeriodSet p;
    p.tp1 = std::max(rc * am2x * b1 / (1.0 + v) * s, slew_floor) + d.tp1;
    p.tp2 = std::max(rc * alpha * b2 / (1.0 + v) * s, slew_floor) + d.tp2;
    p.tp3 = std::max(rc * am2x * b3 / (1.0 - v) * s, slew_floor) + d.tp3;
    p.tp4 = std::max(rc * alpha * b4 / (1.0 - v) * s, slew_floor) + d.tp4;
    return p;
}

AveragedPeriods averaged_nonideal_periods(const OscillatorConfig& config,
                                          const NonIdealityProfile& profile) {
    const double alpha = config.alpha;
    const double ci = config.c_i;
    const double vp = config.v_p;
    const double rx = config.sensor.r_x;
    require_positive(ci, "c_i");
    require_positive(alpha, "alpha");
    require_positive(vp, "v_p");
    require_positive(rx, "r_x");

    const double x = config.x_ratio();
    const double am2x = alpha - 2.0 * x;
    if (!(am2x > 0.0)) {
        throw OscError(Err::CROSS_OVER,
                       "alpha must exceed 2*c_x/c_i = " + num(2.0 * x));
    }

    const GammaBreakdown gb = gamma(config, profile);
    const double s = gb.slope_reduction;
    const double gh = gb.gamma + profile.v_oz_eff() / vp;
    const double v = profile.v_os_prime_eff(rx) / vp;
    const double one_m_v2 = 1.0 - v * v;
    if (!(one_m_v2 > 0.0)) {
        throw OscError(Err::NEGATIVE_PERIOD,
                       "effective offset v_os' = " + num(v * vp) +
                           " V reaches the rail v_p");
    }

    const double sr = profile.slew_eff();
    const double slew_floor =
        std::isfinite(sr) ? 2.0 * vp * (alpha - x) / sr : 0.0;
    const double rc = rx * ci;
    const DelayTerms d = delay_terms(profile);

    AveragedPeriods a;
    a.t1 = std::max(rc * am2x * (1.0 + v * gh / am2x) / one_m_v2 * s,
                    slew_floor) +
           d.avg;
    a.t2 = std::max(rc * alpha * (1.0 - v * gh / alpha) / one_m_v2 * s,
                    slew_floor) +
           d.avg;
    const PeriodSet p = nonideal_periods(config, profile);
    a.t_offset_skew = 0.5 * (p.tp3 - p.tp1);
    return a;
}

std::pair<PeriodSet, AveragedPeriods>
gbw_only_periods(const OscillatorConfig& config, double a0w0, double c_p) {
    require_positive(config.c_i, "c_i");
    require_positive(config.alpha, "alpha");
    require_positive(config.sensor.r_x, "r_x");
    require_positive(a0w0, "a0w0");

    const double x = config.x_ratio();
    const double alpha = config.alpha;
    const double am2x = alpha - 2.0 * x;
    if (!(am2x > 0.0)) {
        throw OscError(Err::CROSS_OVER,
                       "alpha must exceed 2*c_x/c_i = " + num(2.0 * x));
    }
    const double g = a0w0 * config.sensor.r_x * config.c_i;
    const double gam =
        (1.0 + (config.sensor.c_x + c_p) / config.c_i + x * (1.0 + g)) * g /
        ((1.0 + g) * (1.0 + g));
    const double s = 1.0 + 1.0 / g;
    const double rc = config.sensor.r_x * config.c_i;

    PeriodSet p;
    p.tp1 = rc * am2x * (1.0 - gam / am2x) * s;
    p.tp2 = rc * alpha * (1.0 + gam / alpha) * s;
    p.tp3 = rc * am2x * (1.0 + gam / am2x) * s;
    p.tp4 = rc * alpha * (1.0 - gam / alpha) * s;

    AveragedPeriods a;
    a.t1 = rc * am2x * s;
    a.t2 = rc * alpha * s;
    a.t_offset_skew = 0.5 * (p.tp3 - p.tp1);
    return {p, a};
}

SensorEstimate estimate_ideal(double tp1_like, double tp2_like, double alpha,
                              double c_i, bool averaged) {
    require_positive(alpha, "alpha");
    require_positive(c_i, "c_i");
    if (!(tp2_like > 0.0)) {
        throw OscError(Err::NON_POSITIVE_COMPONENT,
                       "tp2-like period must be positive, got " +
                           num(tp2_like));
    }
    SensorEstimate est;
    est.r_x_est = tp2_like / (alpha * c_i);
    est.c_x_est = 0.5 * alpha * c_i * (1.0 - tp1_like / tp2_like);
    est.method =
        averaged ? EstimateMethod::IDEAL_INV_AVG : EstimateMethod::IDEAL_INV;
    est.negative = est.c_x_est < 0.0;
    return est;
}

namespace {

struct ProfileNums {
    double a0w0 = kInf;
    double sr = kInf;
    double vos = 0.0;
    double ib = 0.0;
    double voz = 0.0;
    double cp = 0.0;
};

ProfileNums profile_nums(const NonIdealityProfile& profile) {
    ProfileNums n;
    n.a0w0 = profile.a0w0_eff();
    n.sr = profile.slew_eff();
    n.vos = profile.v_os_eff();
    n.ib = profile.i_b_eff();
    n.voz = profile.v_oz_eff();
    n.cp = profile.c_p_eff();
    return n;
}

} // namespace

SensorEstimate estimate_compensated(const PeriodSet& periods,
                                    const OscillatorConfig& config,
                                    const NonIdealityProfile& profile) {
    const double alpha = config.alpha;
    const double ci = config.c_i;
    const double vp = config.v_p;
    require_positive(alpha, "alpha");
    require_positive(ci, "c_i");
    require_positive(vp, "v_p");

    const DelayTerms d = delay_terms(profile);
    const double t1 = periods.tp1 - d.tp1;
    const double t2 = periods.tp2 - d.tp2;
    if (!(t2 > 0.0)) {
        throw OscError(Err::NEGATIVE_ESTIMATE,
                       "tp2 is not positive after delay removal: " + num(t2));
    }
    const ProfileNums n = profile_nums(profile);
    const double rho = t1 / t2;

    double r = t2 / (alpha * ci);
    double c = 0.5 * alpha * ci * (1.0 - rho);
    int it = 0;
    bool converged = false;
    while (it < 50) {
        ++it;
        if (!(r > 0.0) || !std::isfinite(r)) {
            throw OscError(Err::NEGATIVE_ESTIMATE,
                           "resistance iterate left the feasible region: " +
                               num(r));
        }
        const GammaAffine ga = gamma_affine(n.a0w0, r, ci, n.cp);
        const double v = (n.vos + n.ib * r) / vp;
        if (!(1.0 + v > 0.0) || !(1.0 - v > 0.0)) {
            throw OscError(Err::NEGATIVE_ESTIMATE,
                           "effective offset reaches the rail at r_x = " +
                               num(r));
        }

        // Capacitance step from the linear ramp model first; whether the
        // slew floor binds is then judged at that candidate rather than at
        // the previous iterate, which can overshoot far enough to fake a
        // floored tp1.
        double cn = (alpha * (1.0 - rho) -
                     (ga.a + n.voz / vp) * (1.0 + rho)) /
                    (2.0 / ci + ga.b * (1.0 + rho));
        if (std::isfinite(n.sr)) {
            const double gh_lin = ga.a + ga.b * cn + n.voz / vp;
            const double am2x_lin = alpha - 2.0 * cn / ci;
            const double lin1 =
                r * ci * (am2x_lin - gh_lin) / (1.0 + v) * ga.s;
            if (am2x_lin * vp / n.sr > lin1) {
                // tp1 sat on the slew floor, which pins the capacitance by
                // itself. A tp2 on the same floor leaves no resistance
                // information, and the two measurements then coincide.
                if (t2 <= t1 * (1.0 + 1e-9)) {
                    throw OscError(Err::NO_CONVERGENCE,
                                   "tp2 is slew-floored; it carries no "
                                   "resistance information");
                }
                cn = 0.5 * ci * (alpha - t1 * n.sr / vp);
            } else {
                const double gh_n = ga.a + ga.b * cn + n.voz / vp;
                const double lin2 =
                    r * ci * (alpha + gh_n) / (1.0 + v) * ga.s;
                if ((alpha - 2.0 * cn / ci) * vp / n.sr > lin2) {
                    throw OscError(Err::NO_CONVERGENCE,
                                   "tp2 is slew-floored; it carries no "
                                   "resistance information");
                }
            }
        }

        const double gh = ga.a + ga.b * cn + n.voz / vp;
        const double beta1 = (1.0 + gh / alpha) / (1.0 + v);
        const double bracket = 1.0 / beta1 - alpha * ga.inv_a0w0;
        if (!(bracket > 0.0)) {
            throw OscError(Err::NEGATIVE_ESTIMATE,
                           "resistance bracket 1/beta1 - alpha/a0w0 is not "
                           "positive");
        }
        const double rn = t2 / (alpha * ci) * bracket / ga.s;
        const bool done = std::abs(rn - r) <= 1e-9 * std::abs(rn);
        r = rn;
        c = cn;
        if (done) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw OscError(Err::NO_CONVERGENCE,
                       "no fixed point within 50 passes");
    }
    if (!(r > 0.0) || !std::isfinite(r) || !std::isfinite(c)) {
        throw OscError(Err::NEGATIVE_ESTIMATE,
                       "compensated inversion produced r_x = " + num(r));
    }
    SensorEstimate est;
    est.r_x_est = r;
    est.c_x_est = c;
    est.method = EstimateMethod::COMPENSATED;
    est.iterations = it;
    est.negative = c < 0.0;
    return est;
}

SensorEstimate estimate_compensated(const AveragedPeriods& periods,
                                    const OscillatorConfig& config,
                                    const NonIdealityProfile& profile) {
    const double alpha = config.alpha;
    const double ci = config.c_i;
    const double vp = config.v_p;
    require_positive(alpha, "alpha");
    require_positive(ci, "c_i");
    require_positive(vp, "v_p");

    const DelayTerms d = delay_terms(profile);
    const double t1 = periods.t1 - d.avg;
    const double t2 = periods.t2 - d.avg;
    if (!(t2 > 0.0)) {
        throw OscError(Err::NEGATIVE_ESTIMATE,
                       "t2 is not positive after delay removal: " + num(t2));
    }
    const ProfileNums n = profile_nums(profile);
    const double rho = t1 / t2;

    double r = t2 / (alpha * ci);
    double c = 0.5 * alpha * ci * (1.0 - rho);
    int it = 0;
    bool converged = false;
    while (it < 50) {
        ++it;
        if (!(r > 0.0) || !std::isfinite(r)) {
            throw OscError(Err::NEGATIVE_ESTIMATE,
                           "resistance iterate left the feasible region: " +
                               num(r));
        }
        const GammaAffine ga = gamma_affine(n.a0w0, r, ci, n.cp);
        const double v = (n.vos + n.ib * r) / vp;
        const double one_m_v2 = 1.0 - v * v;
        if (!(one_m_v2 > 0.0)) {
            throw OscError(Err::NEGATIVE_ESTIMATE,
                           "effective offset reaches the rail at r_x = " +
                               num(r));
        }

        const double denom = 2.0 / ci - v * ga.b * (1.0 + rho);
        if (!(denom > 0.0)) {
            throw OscError(Err::NO_CONVERGENCE,
                           "averaged capacitance step is singular");
        }
        double cn = (alpha * (1.0 - rho) +
                     v * (ga.a + n.voz / vp) * (1.0 + rho)) /
                    denom;
        if (std::isfinite(n.sr)) {
            const double gh_lin = ga.a + ga.b * cn + n.voz / vp;
            const double lin1 = r * ci *
                                (alpha - 2.0 * cn / ci + v * gh_lin) /
                                one_m_v2 * ga.s;
            if (2.0 * vp * (alpha - cn / ci) / n.sr > lin1) {
                // t1 sat on the slew floor, which pins the capacitance by
                // itself. A t2 on the same floor leaves no resistance
                // information, and the two measurements then coincide.
                if (t2 <= t1 * (1.0 + 1e-9)) {
                    throw OscError(Err::NO_CONVERGENCE,
                                   "t2 is slew-floored; it carries no "
                                   "resistance information");
                }
                cn = ci * (alpha - 0.5 * t1 * n.sr / vp);
            } else {
                const double gh_n = ga.a + ga.b * cn + n.voz / vp;
                const double lin2 =
                    r * ci * (alpha - v * gh_n) / one_m_v2 * ga.s;
                if (2.0 * vp * (alpha - cn / ci) / n.sr > lin2) {
                    throw OscError(Err::NO_CONVERGENCE,
                                   "t2 is slew-floored; it carries no "
                                   "resistance information");
                }
            }
        }

        const double gh = ga.a + ga.b * cn + n.voz / vp;
        const double bracket = 1.0 - v * gh / alpha;
        if (!(bracket > 0.0)) {
            throw OscError(Err::NEGATIVE_ESTIMATE,
                           "averaged resistance bracket is not positive");
        }
        const double rn = t2 * one_m_v2 / (alpha * ci * ga.s * bracket);
        const bool done = std::abs(rn - r) <= 1e-9 * std::abs(rn);
        r = rn;
        c = cn;
        if (done) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw OscError(Err::NO_CONVERGENCE,
                       "no fixed point within 50 passes");
    }
    if (!(r > 0.0) || !std::isfinite(r) || !std::isfinite(c)) {
        throw OscError(Err::NEGATIVE_ESTIMATE,
                       "compensated inversion produced r_x = " + num(r));
    }
    SensorEstimate est;
    est.r_x_est = r;
    est.c_x_est = c;
    est.method = EstimateMethod::COMPENSATED_AVG;
    est.iterations = it;
    est.negative = c < 0.0;
    return est;
}

double relative_error(double measured, double reference) {
    if (reference == 0.0) {
        throw OscError(Err::ZERO_REFERENCE,
                       "relative error is undefined against a zero reference");
    }
    return 100.0 * (measured - reference) / reference;
}

RecoveredConfig recover_config(double a0w0, double r_x, double c_x, double c_p,
                               double target_tp1_err_pct,
                               double target_tp2_err_pct) {
    require_positive(a0w0, "a0w0");
    require_positive(r_x, "r_x");
    require_positive(c_x, "c_x");
    const double f1 = 1.0 + target_tp1_err_pct / 100.0;
    const double f2 = 1.0 + target_tp2_err_pct / 100.0;
    if (!(f1 > 0.0) || !(f2 > 1.0)) {
        throw OscError(Err::NO_CONVERGENCE,
                       "targets must satisfy tp1 error > -100% and tp2 error "
                       "> 0%");
    }

    // At a candidate c_i: gamma is independent of alpha, the tp2 error pins
    // gamma/alpha = f2/s - 1 and the tp1 error pins
    // gamma/(alpha - 2X) = 1 - f1/s. Consistency of the two alphas gives a
    // single residual in c_i.
    auto eval = [&](double ci) {
        const double g = a0w0 * r_x * ci;
        const double s = 1.0 + 1.0 / g;
        const double x = c_x / ci;
        const double gam = (1.0 + (c_x + c_p) / ci + x * (1.0 + g)) * g /
                           ((1.0 + g) * (1.0 + g));
        const double u = f2 / s - 1.0; // gamma/alpha
        const double w = 1.0 - f1 / s; // gamma/(alpha - 2X)
        struct Point {
            double resid;
            bool valid;
        };
        if (!(u > 0.0) || !(w > 0.0)) return Point{0.0, false};
        return Point{gam / u - 2.0 * x - gam / w, true};
    };

    // Log-spaced scan for a sign change, then bisection.
    const double lo_bound = std::max(1e-13, 2.2 * c_x);
    const double hi_bound = 1e-8;
    const int scan_n = 400;
    double lo = 0.0, hi = 0.0, flo = 0.0;
    double prev_ci = 0.0, prev_f = 0.0;
    bool have_prev = false, bracketed = false;
    for (int i = 0; i <= scan_n; ++i) {
        const double ci = lo_bound * std::pow(hi_bound / lo_bound,
                                              double(i) / scan_n);
        const auto pt = eval(ci);
        if (!pt.valid) {
            have_prev = false;
            continue;
        }
        if (have_prev && prev_f * pt.resid <= 0.0) {
            lo = prev_ci;
            hi = ci;
            flo = prev_f;
            bracketed = true;
            break;
        }
        prev_ci = ci;
        prev_f = pt.resid;
        have_prev = true;
    }
    if (!bracketed) {
        throw OscError(Err::NO_CONVERGENCE,
                       "no c_i in [0.1 pF, 10 nF] reproduces the target "
                       "error pair");
    }
    for (int i = 0; i < 200 && (hi - lo) > 1e-16 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        const auto pt = eval(mid);
        if (!pt.valid) break;
        if (flo * pt.resid <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = pt.resid;
        }
    }

    RecoveredConfig out;
    out.c_i = 0.5 * (lo + hi);
    const double g = a0w0 * r_x * out.c_i;
    const double s = 1.0 + 1.0 / g;
    const double x = c_x / out.c_i;
    const double gam = (1.0 + (c_x + c_p) / out.c_i + x * (1.0 + g)) * g /
                       ((1.0 + g) * (1.0 + g));
    out.alpha = gam / (f2 / s - 1.0);
    out.loop_gain_product = g;
    if (!(out.alpha > 2.0 * x) || !(out.alpha < 1.0)) {
        throw OscError(Err::NO_CONVERGENCE,
                       "recovered alpha = " + num(out.alpha) +
                           " is outside (2*c_x/c_i, 1)");
    }

    OscillatorConfig cfg;
    cfg.c_i = out.c_i;
    cfg.alpha = out.alpha;
    cfg.v_p = 5.0;
    cfg.sensor = {r_x, c_x};
    const auto [p, a] = gbw_only_periods(cfg, a0w0, c_p);
    const PeriodSet ideal = ideal_periods(cfg);
    out.tp1_err_pct = relative_error(p.tp1, ideal.tp1);
    out.tp2_err_pct = relative_error(p.tp2, ideal.tp2);
    out.t2_err_pct = relative_error(a.t2, ideal.tp2);
    return out;
}

} // namespace rcosc::analytic
