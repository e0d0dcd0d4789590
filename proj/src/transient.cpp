#include "rcosc/transient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rcosc/csv.hpp"
#include "rcosc/errors.hpp"
#include "rcosc/validate.hpp"

namespace rcosc::transient {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Surrogate open-loop gain-bandwidth used when the finite-GBW effect is
// switched off. Large enough that the residual loop error (~1/G) is far
// below every tolerance in the test suite, small enough to stay well clear
// of double overflow in the exponential segment math.
constexpr double kIdealA0w0 = 1e12;

enum class PendKind { Flip, ZcdEdge, XorEdge };

struct Pending {
    double t;
    PendKind kind;
    int payload; // new sigma / new detector state / new xor state
};

struct Segment {
    int reg;      // -1, 0, +1: saturated drive sign, 0 for linear
    double tau;
    double vninf;
    double b;     // v_r linear-in-t coefficient
    double c;     // v_r exponential coefficient (0 in the slewing regimes)
};

class Engine {
public:
    Engine(const OscillatorConfig& config, const NonIdealityProfile& profile,
           const SimOptions& options)
        : rx_(config.sensor.r_x),
          cx_(config.sensor.c_x),
          ci_(config.c_i),
          cp_(profile.c_p_eff()),
          alpha_(config.alpha),
          vp_(config.v_p),
          a0w0_(profile.on(Effect::GBW) ? profile.integrator_opamp.a0w0()
                                        : kIdealA0w0),
          sr_(profile.slew_eff()),
          vos_(profile.v_os_eff()),
          ib_(profile.i_b_eff()),
          voz_(profile.v_oz_eff()),
          ts_lh_(profile.schmitt_delay_lh_eff()),
          ts_hl_(profile.schmitt_delay_hl_eff()),
          tz_lh_(profile.zcd_delay_lh_eff()),
          tz_hl_(profile.zcd_delay_hl_eff()),
          txor_(config.xor_delay),
          tol_(options.event_tolerance) {
        ct_ = cx_ + cp_ + ci_;
        g_ = a0w0_ * rx_ * ci_;
        sigma_ = 1;
        vr_ = vp_ * (alpha_ - 2.0 * cx_ / ci_);
        vn_ = (vp_ - ib_ * rx_ + g_ * vos_) / (1.0 + g_);
        det_ = vr_ > voz_ ? 1 : 0;
        y_out_ = det_;
        x_out_ = 1;
        xor_out_ = x_out_ ^ y_out_;
        schmitt_armed_ = true;
        reg_ = reg_from_state();
        t_ = 0.0;
    }

    void run(double t_end, std::size_t max_events, Waveforms& w,
             bool record, double sample_step) {
        if (record) {
            push_sample(w, t_, vr_);
        }
        std::size_t guard = 0;
        while (t_ < t_end) {
            if (++guard > max_events) {
                throw OscError(Err::SOLVER_FAILURE,
                               "event budget of " +
                                   std::to_string(max_events) +
                                   " exhausted at t = " + fmt_double(t_) +
                                   " s");
            }
            const Segment sg = segment();
            double horizon = t_end - t_;
            if (!pending_.empty()) {
                double first = kInf;
                for (const Pending& p : pending_) first = std::min(first, p.t);
                horizon = std::max(std::min(horizon, first - t_), 0.0);
            }

            // Earliest of: slew-regime boundary, armed Schmitt threshold,
            // detector reference crossing.
            double best_dt = kInf;
            int best_kind = -1; // 0 regime, 1 schmitt, 2 zcd
            int best_reg = 0;
            double best_vb = 0.0;
            if (std::isfinite(sr_)) {
                if (sg.reg == 0) {
                    for (int sgn : {+1, -1}) {
                        const double vb = vos_ - sgn * sr_ / a0w0_;
                        const double dt = exp_cross(vn_, sg.vninf, vb, sg.tau);
                        if (dt > 0.0 && dt <= horizon && dt < best_dt) {
                            best_dt = dt;
                            best_kind = 0;
                            best_reg = sgn;
                            best_vb = vb;
                        }
                    }
                } else {
                    const double vb = vos_ - sg.reg * sr_ / a0w0_;
                    const double dt = exp_cross(vn_, sg.vninf, vb, sg.tau);
                    if (dt > 0.0 && dt <= horizon && dt < best_dt) {
                        best_dt = dt;
                        best_kind = 0;
                        best_reg = 0;
                        best_vb = vb;
                    }
                }
            }
            if (schmitt_armed_) {
                const double thr = sigma_ > 0 ? -alpha_ * vp_ : alpha_ * vp_;
                const double dt =
                    vr_cross_dir(thr, sigma_ < 0, horizon, sg);
                if (dt > 0.0 && dt < best_dt) {
                    best_dt = dt;
                    best_kind = 1;
                }
            }
            {
                const double dt =
                    vr_cross_dir(voz_, det_ == 0, horizon, sg);
                if (dt > 0.0 && dt < best_dt) {
                    best_dt = dt;
                    best_kind = 2;
                }
            }

            const double dt = best_kind < 0 ? horizon : best_dt;
            if (record) {
                record_interior(w, sg, dt, sample_step);
            }
            vr_ = vr_at(dt, sg);
            vn_ = vn_at(dt, sg);
            t_ += dt;
            if (record && dt > 0.0) {
                push_sample(w, t_, vr_);
            }
            switch (best_kind) {
            case 0:
                reg_ = best_reg;
                vn_ = best_vb;
                break;
            case 1: {
                const int next = -sigma_;
                pending_.push_back(
                    {t_ + (next > 0 ? ts_lh_ : ts_hl_), PendKind::Flip, next});
                schmitt_armed_ = false;
                break;
            }
            case 2: {
                det_ = 1 - det_;
                pending_.push_back(
                    {t_ + (det_ == 1 ? tz_lh_ : tz_hl_), PendKind::ZcdEdge,
                     det_});
                break;
            }
            default:
                break;
            }
            apply_pending();
        }
    }

    std::vector<Edge>& events() { return events_; }

private:
    int reg_from_state() const {
        const double u = a0w0_ * (vos_ - vn_);
        if (u > sr_) return +1;
        if (u < -sr_) return -1;
        return 0;
    }

    Segment segment() const {
        const double vx = sigma_ * vp_;
        Segment sg;
        sg.reg = reg_;
        if (reg_ == 0) {
            sg.tau = rx_ * ct_ / (1.0 + g_);
            sg.vninf = (vx - ib_ * rx_ + g_ * vos_) / (1.0 + g_);
            sg.b = a0w0_ * (vos_ - sg.vninf);
            sg.c = -a0w0_ * (vn_ - sg.vninf) * sg.tau;
        } else {
            sg.tau = rx_ * ct_;
            sg.vninf = vx - ib_ * rx_ + reg_ * sr_ * rx_ * ci_;
            sg.b = reg_ * sr_;
            sg.c = 0.0;
        }
        return sg;
    }

    double vr_at(double dt, const Segment& sg) const {
        if (sg.reg == 0) {
            return vr_ + sg.b * dt - sg.c * std::expm1(-dt / sg.tau);
        }
        return vr_ + sg.b * dt;
    }

    double vn_at(double dt, const Segment& sg) const {
        return sg.vninf + (vn_ - sg.vninf) * std::exp(-dt / sg.tau);
    }

    // Exact crossing time of the relaxing node voltage through the level yb,
    // or 0 when it never reaches it within this segment.
    static double exp_cross(double y0, double yinf, double yb, double tau) {
        const double d0 = y0 - yinf;
        const double db = yb - yinf;
        if (d0 == 0.0 || db * d0 <= 0.0 || std::abs(db) >= std::abs(d0)) {
            return 0.0;
        }
        return tau * std::log(d0 / db);
    }

    // Earliest dt in (0, horizon] where v_r crosses thr in the requested
    // direction, starting strictly from the other side. The segment response
    // is linear plus one exponential, so it has at most one interior
    // extremum; splitting there makes each piece monotone and the bisection
    // direction test exact.
    double vr_cross_dir(double thr, bool want_up, double horizon,
                        const Segment& sg) const {
        const double f0 = vr_ - thr;
        if (want_up && f0 >= 0.0) return 0.0;
        if (!want_up && f0 <= 0.0) return 0.0;
        const auto f = [&](double dt) { return vr_at(dt, sg) - thr; };
        double pts[3] = {0.0, horizon, 0.0};
        int npts = 2;
        if (sg.reg == 0 && sg.b != 0.0 && sg.c != 0.0) {
            const double r = -sg.c / (sg.b * sg.tau);
            if (r > 0.0) {
                const double tm = sg.tau * std::log(r);
                if (tm > 0.0 && tm < horizon) {
                    pts[2] = pts[1];
                    pts[1] = tm;
                    npts = 3;
                }
            }
        }
        for (int i = 0; i + 1 < npts; ++i) {
            double lo = pts[i];
            double hi = pts[i + 1];
            double flo = f(lo);
            const double fhi = f(hi);
            const bool hit = want_up ? (flo < 0.0 && fhi >= 0.0)
                                     : (flo > 0.0 && fhi <= 0.0);
            if (!hit) continue;
            while (hi - lo > tol_) {
                const double mid = 0.5 * (lo + hi);
                const double fm = f(mid);
                const bool crossed =
                    want_up ? (flo < 0.0 && fm >= 0.0) : (flo > 0.0 && fm <= 0.0);
                if (crossed) {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            return hi; // first instant at or past the threshold
        }
        return 0.0;
    }

    void apply_pending() {
        const double eps = 1e-18;
        for (;;) {
            int idx = -1;
            for (std::size_t i = 0; i < pending_.size(); ++i) {
                if (pending_[i].t <= t_ + eps &&
                    (idx < 0 || pending_[i].t < pending_[idx].t)) {
                    idx = static_cast<int>(i);
                }
            }
            if (idx < 0) return;
            const Pending p = pending_[idx];
            pending_.erase(pending_.begin() + idx);
            switch (p.kind) {
            case PendKind::Flip: {
                const int old = sigma_;
                sigma_ = p.payload;
                vn_ += (sigma_ - old) * vp_ * cx_ / ct_;
                reg_ = reg_from_state();
                schmitt_armed_ = true;
                x_out_ = sigma_ > 0 ? 1 : 0;
                events_.push_back({p.t, EdgeSource::SCHMITT,
                                   sigma_ > 0 ? EdgeKind::RISE
                                              : EdgeKind::FALL});
                pending_.push_back(
                    {p.t + txor_, PendKind::XorEdge, 1 - xor_out_});
                break;
            }
            case PendKind::ZcdEdge:
                y_out_ = p.payload;
                events_.push_back({p.t, EdgeSource::ZCD,
                                   p.payload == 1 ? EdgeKind::RISE
                                                  : EdgeKind::FALL});
                pending_.push_back(
                    {p.t + txor_, PendKind::XorEdge, 1 - xor_out_});
                break;
            case PendKind::XorEdge:
                xor_out_ = p.payload;
                events_.push_back({p.t, EdgeSource::XOR,
                                   p.payload == 1 ? EdgeKind::RISE
                                                  : EdgeKind::FALL});
                break;
            }
        }
    }

    void push_sample(Waveforms& w, double t, double vr) {
        if (!w.time.empty() && !(t > w.time.back())) return;
        w.time.push_back(t);
        w.v_r.push_back(vr);
        w.v_x.push_back(sigma_ * vp_);
        w.v_y.push_back(y_out_ == 1 ? vp_ : -vp_);
        w.v_z.push_back(xor_out_);
    }

    void record_interior(Waveforms& w, const Segment& sg, double dt,
                         double h) {
        if (!(h > 0.0) || dt <= 0.0) return;
        double k = std::floor(t_ / h) + 1.0;
        for (double tk = k * h; tk < t_ + dt; tk += h) {
            if (tk <= t_) continue;
            push_sample(w, tk, vr_at(tk - t_, sg));
        }
    }

    double rx_, cx_, ci_, cp_, alpha_, vp_;
    double a0w0_, sr_, vos_, ib_, voz_;
    double ts_lh_, ts_hl_, tz_lh_, tz_hl_, txor_;
    double tol_;
    double ct_, g_;
    double vr_, vn_, t_;
    int sigma_, det_, reg_;
    int x_out_, y_out_, xor_out_;
    bool schmitt_armed_;
    std::vector<Pending> pending_;
    std::vector<Edge> events_;
};

} // namespace

Waveforms simulate(const OscillatorConfig& config,
                   const NonIdealityProfile& profile,
                   const SimOptions& options) {
    validate_or_throw(config, profile);
    if (!(options.event_tolerance > 0.0) || options.event_tolerance > 1e-10) {
        throw OscError(Err::PARSE_ERROR,
                       "event_tolerance must be in (0, 1e-10] s, got " +
                           fmt_double(options.event_tolerance));
    }
    if (options.settle_cycles < 1) {
        throw OscError(Err::PARSE_ERROR,
                       "settle_cycles must be >= 1, got " +
                           std::to_string(options.settle_cycles));
    }

    const double x = config.x_ratio();
    const double t_cycle =
        4.0 * config.sensor.r_x * config.c_i * (config.alpha - x);
    const double t_end =
        options.max_time > 0.0
            ? options.max_time
            : (options.settle_cycles + options.min_cycles + 2) * t_cycle;
    const double sample_step =
        options.max_step > 0.0 ? options.max_step : t_cycle / 500.0;
    const std::size_t budget =
        256 + static_cast<std::size_t>(400.0 * (t_end / t_cycle + 1.0));

    Waveforms w;
    Engine eng(config, profile, options);
    eng.run(t_end, budget, w, options.record_waveforms, sample_step);
    w.events = eng.events();

    bool any_schmitt = false;
    for (const Edge& e : w.events) {
        if (e.source == EdgeSource::SCHMITT) {
            any_schmitt = true;
            break;
        }
    }
    if (!any_schmitt) {
        throw OscError(Err::NO_OSCILLATION,
                       "no Schmitt transition within " + fmt_double(t_end) +
                           " s");
    }
    return w;
}

std::vector<PeriodSet> extract_periods(const Waveforms& w,
                                       const SimOptions& options) {
    std::vector<Edge> ev;
    ev.reserve(w.events.size());
    for (const Edge& e : w.events) {
        if (e.source != EdgeSource::XOR) ev.push_back(e);
    }
    std::stable_sort(ev.begin(), ev.end(),
                     [](const Edge& a, const Edge& b) { return a.t < b.t; });

    std::vector<std::size_t> rises;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        if (ev[i].source == EdgeSource::SCHMITT && ev[i].kind == EdgeKind::RISE) {
            rises.push_back(i);
        }
    }
    const int settle = options.settle_cycles;
    const std::size_t cycles = rises.empty() ? 0 : rises.size() - 1;
    if (cycles < static_cast<std::size_t>(settle) + 2) {
        throw OscError(Err::INSUFFICIENT_CYCLES,
                       "need " + std::to_string(settle + 2) +
                           " full cycles, waveform contains " +
                           std::to_string(cycles));
    }

    std::vector<PeriodSet> out;
    for (std::size_t k = 0; k + 1 < rises.size(); ++k) {
        const std::size_t a = rises[k];
        const std::size_t b = rises[k + 1];
        const bool shaped = b - a == 4 &&
                            ev[a + 1].source == EdgeSource::ZCD &&
                            ev[a + 2].source == EdgeSource::SCHMITT &&
                            ev[a + 3].source == EdgeSource::ZCD;
        if (!shaped) {
            std::ostringstream os;
            os << "cycle " << k << " between t = " << fmt_double(ev[a].t)
               << " s and t = " << fmt_double(ev[b].t)
               << " s does not follow the V_x, V_y, V_x, V_y edge sequence";
            throw OscError(Err::MISORDERED_EDGES, os.str());
        }
        PeriodSet p;
        p.tp1 = ev[a + 1].t - ev[a].t;
        p.tp2 = ev[a + 2].t - ev[a + 1].t;
        p.tp3 = ev[a + 3].t - ev[a + 2].t;
        p.tp4 = ev[b].t - ev[a + 3].t;
        out.push_back(p);
    }
    out.erase(out.begin(), out.begin() + settle);
    return out;
}

void write_waveform_csv(std::ostream& out, const Waveforms& waveforms) {
    out << "time_s,v_r,v_x,v_y,v_z\n";
    for (std::size_t i = 0; i < waveforms.time.size(); ++i) {
        out << fmt_double(waveforms.time[i]) << ','
            << fmt_double(waveforms.v_r[i]) << ','
            << fmt_double(waveforms.v_x[i]) << ','
            << fmt_double(waveforms.v_y[i]) << ',' << waveforms.v_z[i]
            << '\n';
    }
}

void write_events_csv(std::ostream& out, const Waveforms& waveforms) {
    out << "time_s,source,edge\n";
    for (const Edge& e : waveforms.events) {
        out << fmt_double(e.t) << ',' << to_string(e.source) << ','
            << to_string(e.kind) << '\n';
    }
}

const char* to_string(EdgeSource s) {
    switch (s) {
    case EdgeSource::SCHMITT: return "SCHMITT";
    case EdgeSource::ZCD: return "ZCD";
    case EdgeSource::XOR: return "XOR";
    }
    return "?";
}

const char* to_string(EdgeKind k) {
    return k == EdgeKind::RISE ? "RISE" : "FALL";
}

} // namespace rcosc::transient
