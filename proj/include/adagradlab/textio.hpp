#pragma once

#include <charconv>
#include <cstdint>
#include <string>

namespace adagradlab::textio {

/// Locale-independent float formatting with 17 significant digits
/// (round-trippable, '.' decimal separator).
inline std::string fmt17(double v) {
  char buf[48];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::string fmt_u64(std::uint64_t v) {
  char buf[24];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace adagradlab::textio
