/**
 * @file version.hpp
 * @brief Library version constant stamped into every output file header.
 */
#pragma once

namespace srsim {

/// Semantic version of the library and command line tool.
inline constexpr const char* kVersion = "1.0.0";

}  // namespace srsim
