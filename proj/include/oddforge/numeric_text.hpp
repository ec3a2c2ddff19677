#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <system_error>

namespace oddforge {

// Shortest decimal representation that parses back to the exact same
// double. Every CSV and text output in the project goes through this so
// that files are byte-stable and values round-trip without loss.
inline std::string format_real(double value) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

inline std::string format_int(long long value) {
  char buf[24];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

// Strict full-match parse of a finite double. Returns false on trailing
// garbage, empty input, NaN and infinities.
inline bool parse_real(std::string_view text, double& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  double value = 0.0;
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) return false;
  if (!std::isfinite(value)) return false;
  out = value;
  return true;
}

}  // namespace oddforge
