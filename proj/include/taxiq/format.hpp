// format.hpp
//
// Number formatting shared by CSV and JSON output: 12 significant digits,
// independent of the global locale.

#pragma once

#include <string>

namespace taxiq {

/// "%.12g" rendering.
std::string format_number(double x);

/// x rounded to 12 significant digits (the value format_number prints).
double round12(double x);

}  // namespace taxiq
