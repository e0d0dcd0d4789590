#pragma once

#include <iosfwd>
#include <vector>

#include "rcosc/types.hpp"

namespace rcosc::transient {

struct SimOptions {
    double max_time = 0.0; // 0 selects a span sized from the period estimate
    double max_step = 0.0; // trace sampling interval; 0 selects period/500
    double event_tolerance = 1e-12; // s, bisection width for edge times
    // The propagator advances the two-state circuit between events in closed
    // form, so there is no step error to control; these two are accepted for
    // interface stability.
    double rel_tol = 1e-9;
    double abs_tol = 1e-6;
    int settle_cycles = 2; // start-up cycles dropped by extract_periods
    int min_cycles = 8;    // measured cycles the auto span budgets for
    bool record_waveforms = true;
};

enum class EdgeSource { SCHMITT, ZCD, XOR };
enum class EdgeKind { RISE, FALL };

const char* to_string(EdgeSource s);
const char* to_string(EdgeKind k);

struct Edge {
    double t = 0.0;
    EdgeSource source = EdgeSource::SCHMITT;
    EdgeKind kind = EdgeKind::RISE;
};

struct Waveforms {
    // Sampled traces; empty when record_waveforms is off. v_x and v_y are the
    // Schmitt and detector outputs at the rails, v_z the XOR logic level.
    std::vector<double> time;
    std::vector<double> v_r;
    std::vector<double> v_x;
    std::vector<double> v_y;
    std::vector<int> v_z;
    // Output edges, sorted by time. SCHMITT and ZCD edges are logged at the
    // instant the output switches (crossing plus propagation delay); each of
    // them also produces an XOR edge shifted by the gate delay.
    std::vector<Edge> events;
};

// Event-driven simulation of the oscillator. The integrator is modeled as a
// single-pole op-amp with slew limiting, offset voltage, and bias current;
// the Schmitt trigger switches at -alpha*v_p or +alpha*v_p with its
// propagation delay; the detector switches at the offset v_oz with its own
// delays. Raises NO_OSCILLATION when no Schmitt edge occurs within the span,
// SOLVER_FAILURE if the event loop stops making progress. Deterministic:
// identical inputs give bit-identical results.
Waveforms simulate(const OscillatorConfig& config,
                   const NonIdealityProfile& profile,
                   const SimOptions& options = {});

// Splits the event log into per-cycle sub-period sets, anchored at rising
// Schmitt edges, dropping the first settle_cycles. Raises INSUFFICIENT_CYCLES
// when fewer than settle_cycles + 2 full cycles are present and
// MISORDERED_EDGES when a cycle does not alternate Schmitt/detector edges.
std::vector<PeriodSet> extract_periods(const Waveforms& waveforms,
                                       const SimOptions& options = {});

void write_waveform_csv(std::ostream& out, const Waveforms& waveforms);
void write_events_csv(std::ostream& out, const Waveforms& waveforms);

} // namespace rcosc::transient
