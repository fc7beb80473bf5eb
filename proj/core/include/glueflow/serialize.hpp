#pragma once

#include <string>

#include "glueflow/region.hpp"

namespace glueflow {

inline constexpr int kSystemFormatVersion = 1;

// Doubles are written as hexadecimal floats ("0x1.8p+1"), so a round trip is bit-exact.
std::string hex_double(double value);
double parse_hex_double(const std::string& text);

std::string system_to_json(const DisplayedSystem& system);
DisplayedSystem system_from_json(const std::string& text);

void save_system(const DisplayedSystem& system, const std::string& path);
DisplayedSystem load_system(const std::string& path);

}  // namespace glueflow
