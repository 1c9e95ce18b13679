#pragma once

#include <string>
#include <string_view>

namespace hpe {

/// Shortest-round-trip-safe text for a double: 17 significant digits,
/// independent of the global locale.
std::string format_double(double value);

/// Locale-independent parse of a full token; throws std::invalid_argument.
double parse_double(std::string_view text);
long long parse_integer(std::string_view text);

}  // namespace hpe
