#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

#include "pinch/errors.hpp"

namespace pinch::detail {

// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) throw ConfigError("not a number: '" + std::string(s) + "'");
  return v;
}

inline std::uint64_t parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) throw ConfigError("not an integer: '" + std::string(s) + "'");
  return v;
}

}  // namespace pinch::detail
