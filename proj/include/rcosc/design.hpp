#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rcosc/types.hpp"

namespace rcosc::design {

struct DesignRequirements {
    double rx_min = 0.0;      // ohm
    double rx_max = 0.0;      // ohm
    double cx_max = 0.0;      // F
    double c_i = 0.0;         // F
    double alpha = 0.0;
    double v_p = 0.0;         // V
    double epsilon_pct = 0.0; // allowed worst-case period error, percent
};

struct CheckResult {
    std::string criterion; // "alpha", "epsilon", "slew", "comparator_tau", "xor_tau"
    double bound = 0.0;
    double actual = 0.0;
    double margin = 0.0; // signed slack in the bound's own unit; > 0 passes
    bool pass = false;
};

// How to read a bandwidth figure when evaluating the error budget: the
// default treats A0*w0 as 2*pi*gbw_hz in rad/s; Hz uses the bare data-sheet
// number instead.
enum class GbwReading { RadPerSec, Hz };

// Threshold ratio must exceed 2*cx_max/c_i strictly, or tp1 collapses at the
// largest sensor capacitance.
CheckResult check_alpha(const DesignRequirements& req);

// Smallest worst-case percentage error an op-amp can reach over the sensor
// range: finite-bandwidth term at rx_min plus offset terms evaluated at
// rx_max.
double epsilon_bound(const DesignRequirements& req, const OpAmpModel& opamp,
                     GbwReading reading = GbwReading::RadPerSec);

CheckResult check_epsilon(const DesignRequirements& req,
                          const OpAmpModel& opamp,
                          GbwReading reading = GbwReading::RadPerSec);

// Slew rate must exceed 2*v_p/(rx_min*c_i) strictly so the fastest ramp stays
// linear.
CheckResult check_slew(const DesignRequirements& req, const OpAmpModel& opamp);

// Comparator delay budget: tau < epsilon*alpha*rx_max*c_i/(100*(1 - v^2))
// with v = v_os_prime/v_p. Offsets at or beyond the rail are rejected.
CheckResult check_comparator(const DesignRequirements& req,
                             double comparator_tau, double v_os_prime = 0.0);

// XOR gate delay budget: the comparator bound relaxed by the comparator's own
// delay.
CheckResult check_xor(const DesignRequirements& req, double xor_tau,
                      double comparator_tau, double v_os_prime = 0.0);

struct PartReport {
    std::string part;
    std::vector<CheckResult> checks;
    bool pass = false;
    // Smallest margin across checks, each normalized by its bound; ranking key.
    double min_norm_margin = 0.0;
    std::string failure_causes; // comma-joined, e.g. "SR_FAIL"
};

// Evaluates every catalog entry against the requirements and ranks passing
// parts by descending minimum normalized margin, name as tie-break; failing
// parts follow with their causes. Raises EMPTY_CATALOG on an empty list.
std::vector<PartReport> select_components(const DesignRequirements& req,
                                          const std::vector<OpAmpModel>& catalog,
                                          GbwReading reading = GbwReading::RadPerSec);

void write_design_csv(std::ostream& out, const std::vector<PartReport>& reports);

} // namespace rcosc::design
