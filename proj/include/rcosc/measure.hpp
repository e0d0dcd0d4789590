#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rcosc/types.hpp"

namespace rcosc::measure {

struct TimerModel {
    double clock_hz = 16e6;
    int bit_width = 16; // counter width, 8..64
    double capture_jitter_rms = 0.0; // s, Gaussian, applied per capture
};

struct MeasurementSeries {
    std::vector<double> samples;
    std::string unit;
};

struct Stats {
    double mean = 0.0;
    double sd = 0.0; // sample standard deviation, (M-1) divisor
    // 10*log10(sum(S^2)/sum((S-mean)^2)); empty when the variance is zero.
    std::optional<double> snr_db;
};

// Timer capture: each sub-period becomes floor(period*clock + jitter) counts,
// converted back to seconds. Counts beyond the counter range raise
// TIMER_OVERFLOW. Jitter draws come from a fixed-seed generator, so results
// are deterministic per seed.
std::vector<PeriodSet> quantize(const std::vector<PeriodSet>& cycles,
                                const TimerModel& timer, std::uint64_t seed);

AveragedPeriods single_cycle_average(const PeriodSet& periods);

Stats statistics(const std::vector<double>& samples);
Stats statistics(const MeasurementSeries& series);

struct PipelineOptions {
    EstimateMethod mode = EstimateMethod::IDEAL_INV;
    bool quantize = false;
    TimerModel timer;
    std::uint64_t seed = 0;
};

struct PipelineResult {
    std::vector<PeriodSet> cycles; // after optional quantization
    std::vector<SensorEstimate> estimates;
    MeasurementSeries rx_series; // ohm
    MeasurementSeries cx_series; // F
};

// Per-cycle estimation chain: optional timer quantization, optional
// half-cycle averaging per the mode, then the matching estimator.
PipelineResult estimate_pipeline(const std::vector<PeriodSet>& cycles,
                                 const OscillatorConfig& config,
                                 const NonIdealityProfile& profile,
                                 const PipelineOptions& options);

void write_series_csv(std::ostream& out, const PipelineResult& result);

} // namespace rcosc::measure
