#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rcosc/measure.hpp"
#include "rcosc/types.hpp"

namespace rcosc::sweep {

struct SweepSpec {
    std::vector<double> rx_values; // ohm
    std::vector<double> cx_values; // F
    std::vector<std::string> opamps;
    std::vector<EstimateMethod> modes;
    bool quantize = false;
    measure::TimerModel timer;
    bool transient = false; // also run the simulator per grid point
    std::size_t grid_cap = 100000;
    OscillatorConfig base; // c_i, alpha, v_p, xor_delay; sensor comes from grid
    std::optional<ComparatorModel> zcd_override;
};

struct SweepRow {
    double rx = 0.0;
    double cx = 0.0;
    std::string opamp;
    EstimateMethod mode = EstimateMethod::IDEAL_INV;
    double tp1_err_pct = 0.0;
    double tp2_err_pct = 0.0;
    double t1_err_pct = 0.0;
    double t2_err_pct = 0.0;
    double rx_est = 0.0;
    double rx_err_pct = 0.0;
    double cx_est = 0.0;
    double cx_err_pct = 0.0;
    double sim_tp[4] = {0.0, 0.0, 0.0, 0.0};
    double sim_dev_pct = 0.0; // worst |simulated - closed form| / closed form
    bool has_sim = false;
    std::string error; // empty on success; violation or error name otherwise
};

// Evaluates the grid opamp-major, then mode, rx, cx. Rows always come back in
// that canonical order regardless of the worker count; a failing point fills
// its error column instead of aborting the sweep. Grid size beyond grid_cap
// raises GRID_CAP_EXCEEDED.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, std::uint64_t seed,
                                int threads = 0);

struct OpAmpSummary {
    std::string opamp;
    EstimateMethod mode = EstimateMethod::IDEAL_INV;
    double worst_rx_err_pct = 0.0;
    double worst_cx_err_pct = 0.0;
    double worst_t1_err_pct = 0.0;
    double worst_t2_err_pct = 0.0;
};

std::vector<OpAmpSummary> summarize(const std::vector<SweepRow>& rows);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<OpAmpSummary>& rows);

// Minimal static SVG: one bar pair per op-amp comparing worst-case
// capacitance error with and without half-cycle averaging.
void write_summary_svg(std::ostream& out, const std::vector<OpAmpSummary>& rows);

} // namespace rcosc::sweep
