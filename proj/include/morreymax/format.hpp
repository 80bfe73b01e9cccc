#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace morreymax {

/// Shortest round-trip decimal form; "inf", "-inf" and "nan" for the
/// non-finite values. Output is byte-identical across runs.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace morreymax
