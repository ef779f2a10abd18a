#include "taxiq/format.hpp"

#include <cstdio>
#include <cstdlib>

namespace taxiq {

std::string format_number(double x) {
  if (x == 0.0) return "0";  // no "-0"
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

double round12(double x) { return std::strtod(format_number(x).c_str(), nullptr); }

}  // namespace taxiq
