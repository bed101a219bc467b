#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace ecl {

// Writes via a sibling temp file and renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

std::string hex64(uint64_t value);

// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

}  // namespace ecl
