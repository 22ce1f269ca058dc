#pragma once

#include <cstdio>
#include <string>

namespace aoii {

// Locale-independent shortest-ish decimal rendering used for all CSV output,
// so identical runs produce identical bytes.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::string(buf);
}

}  // namespace aoii
