#pragma once

#include <string>

namespace rcosc {

// Shortest text form that parses back to the identical double; ensures CSV
// output is byte-stable and lossless.
std::string fmt_double(double value);

} // namespace rcosc
