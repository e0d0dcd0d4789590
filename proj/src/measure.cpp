#include "rcosc/measure.hpp"

#include <cmath>
#include <ostream>
#include <random>

#include "rcosc/analytic.hpp"
#include "rcosc/csv.hpp"
#include "rcosc/errors.hpp"

namespace rcosc::measure {

std::vector<PeriodSet> quantize(const std::vector<PeriodSet>& cycles,
                                const TimerModel& timer, std::uint64_t seed) {
    if (!(timer.clock_hz > 0.0)) {
        throw OscError(Err::PARSE_ERROR, "timer clock_hz must be > 0, got " +
                                             fmt_double(timer.clock_hz));
    }
    if (timer.bit_width < 8 || timer.bit_width > 64) {
        throw OscError(Err::PARSE_ERROR,
                       "timer bit_width must be in [8, 64], got " +
                           std::to_string(timer.bit_width));
    }
    const double max_counts = std::ldexp(1.0, timer.bit_width) - 1.0;
    const double max_period = max_counts / timer.clock_hz;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> jitter(
        0.0, timer.capture_jitter_rms * timer.clock_hz);
    const bool jittered = timer.capture_jitter_rms > 0.0;

    std::vector<PeriodSet> out;
    out.reserve(cycles.size());
    for (const PeriodSet& p : cycles) {
        double q[4] = {p.tp1, p.tp2, p.tp3, p.tp4};
        for (double& v : q) {
            double counts = std::floor(v * timer.clock_hz +
                                       (jittered ? jitter(rng) : 0.0));
            if (counts < 0.0) counts = 0.0;
            if (counts > max_counts) {
                throw OscError(Err::TIMER_OVERFLOW,
                               "period " + fmt_double(v) + " s exceeds the " +
                                   std::to_string(timer.bit_width) +
                                   "-bit timer maximum of " +
                                   fmt_double(max_period) + " s");
            }
            v = counts / timer.clock_hz;
        }
        out.push_back({q[0], q[1], q[2], q[3]});
    }
    return out;
}

AveragedPeriods single_cycle_average(const PeriodSet& periods) {
    AveragedPeriods a;
    a.t1 = 0.5 * (periods.tp1 + periods.tp3);
    a.t2 = 0.5 * (periods.tp2 + periods.tp4);
    a.t_offset_skew = 0.5 * (periods.tp3 - periods.tp1);
    return a;
}

Stats statistics(const std::vector<double>& samples) {
    const std::size_t m = samples.size();
    if (m < 2) {
        throw OscError(Err::INSUFFICIENT_SAMPLES,
                       "need at least 2 samples, got " + std::to_string(m));
    }
    double sum = 0.0;
    for (double s : samples) sum += s;
    const double mean = sum / static_cast<double>(m);
    double sq = 0.0;
    double var = 0.0;
    for (double s : samples) {
        sq += s * s;
        var += (s - mean) * (s - mean);
    }
    Stats st;
    st.mean = mean;
    st.sd = std::sqrt(var / static_cast<double>(m - 1));
    if (var > 0.0) {
        st.snr_db = 10.0 * std::log10(sq / var);
    }
    return st;
}

Stats statistics(const MeasurementSeries& series) {
    return statistics(series.samples);
}

PipelineResult estimate_pipeline(const std::vector<PeriodSet>& cycles,
                                 const OscillatorConfig& config,
                                 const NonIdealityProfile& profile,
                                 const PipelineOptions& options) {
    if (cycles.empty()) {
        throw OscError(Err::INSUFFICIENT_CYCLES,
                       "estimation pipeline needs at least one cycle");
    }
    PipelineResult res;
    res.cycles = options.quantize
                     ? quantize(cycles, options.timer, options.seed)
                     : cycles;
    res.rx_series.unit = "ohm";
    res.cx_series.unit = "F";
    res.estimates.reserve(res.cycles.size());
    for (const PeriodSet& p : res.cycles) {
        SensorEstimate est;
        switch (options.mode) {
        case EstimateMethod::IDEAL_INV:
            est = analytic::estimate_ideal(p.tp1, p.tp2, config.alpha,
                                           config.c_i, false);
            break;
        case EstimateMethod::IDEAL_INV_AVG: {
            const AveragedPeriods a = single_cycle_average(p);
            est = analytic::estimate_ideal(a.t1, a.t2, config.alpha,
                                           config.c_i, true);
            break;
        }
        case EstimateMethod::COMPENSATED:
            est = analytic::estimate_compensated(p, config, profile);
            break;
        case EstimateMethod::COMPENSATED_AVG:
            est = analytic::estimate_compensated(single_cycle_average(p),
                                                 config, profile);
            break;
        }
        res.estimates.push_back(est);
        res.rx_series.samples.push_back(est.r_x_est);
        res.cx_series.samples.push_back(est.c_x_est);
    }
    return res;
}

void write_series_csv(std::ostream& out, const PipelineResult& result) {
    out << "cycle_index,tp1_s,tp2_s,tp3_s,tp4_s,t1_s,t2_s,rx_est_ohm,"
           "cx_est_f,method\n";
    for (std::size_t i = 0; i < result.cycles.size(); ++i) {
        const PeriodSet& p = result.cycles[i];
        const AveragedPeriods a = single_cycle_average(p);
        const SensorEstimate& e = result.estimates[i];
        out << i << ',' << fmt_double(p.tp1) << ',' << fmt_double(p.tp2)
            << ',' << fmt_double(p.tp3) << ',' << fmt_double(p.tp4) << ','
            << fmt_double(a.t1) << ',' << fmt_double(a.t2) << ','
            << fmt_double(e.r_x_est) << ',' << fmt_double(e.c_x_est) << ','
            << to_string(e.method) << '\n';
    }
}

} // namespace rcosc::measure
