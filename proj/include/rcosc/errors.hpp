#pragma once

#include <stdexcept>
#include <string>

namespace rcosc {

enum class Err {
    CROSS_OVER,
    NON_POSITIVE_COMPONENT,
    NO_LEAKAGE_PATH,
    ZERO_REFERENCE,
    NEGATIVE_PERIOD,
    NEGATIVE_ESTIMATE,
    NO_CONVERGENCE,
    TIMER_OVERFLOW,
    INSUFFICIENT_SAMPLES,
    ZERO_VARIANCE,
    INSUFFICIENT_CYCLES,
    MISORDERED_EDGES,
    NO_OSCILLATION,
    SOLVER_FAILURE,
    EMPTY_CATALOG,
    UNKNOWN_OPAMP,
    PARSE_ERROR,
    GRID_CAP_EXCEEDED,
};

const char* to_string(Err code);

class OscError : public std::runtime_error {
public:
    OscError(Err code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail),
          code_(code) {}

    Err code() const { return code_; }

private:
    Err code_;
};

struct Violation {
    Err code;
    std::string detail;
};

} // namespace rcosc
