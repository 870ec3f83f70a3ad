#pragma once

#include <gmpxx.h>
#include <string>

namespace lazybits {

// Exact rational from "p/q", "0.25", "1e-9", or a plain integer. Throws
// std::invalid_argument on junk.
mpq_class parse_ratio(const std::string& text);

// Shortest-faithful decimal with up to `digits` significant digits, '.' as
// the separator regardless of locale.
std::string format_decimal(const mpq_class& value, int digits = 12);
std::string format_decimal(double value, int digits = 12);

} // namespace lazybits
