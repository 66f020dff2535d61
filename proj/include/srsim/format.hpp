/**
 * @file format.hpp
 * @brief Locale-independent number formatting shared by all writers.
 */
#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace srsim {

/// Shortest decimal string that parses back to exactly @p v.
inline std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, p);
}

}  // namespace srsim
