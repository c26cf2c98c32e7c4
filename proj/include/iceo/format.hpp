#pragma once

#include <string>

namespace iceo {

/// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace iceo
