#ifndef SPOOFDET_IO_UTIL_HPP
#define SPOOFDET_IO_UTIL_HPP

#include <filesystem>
#include <string>

namespace spoofdet {

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

// Write-then-rename so readers never observe a half-written file.
void atomic_write_file(const std::filesystem::path& path, const std::string& contents);

std::string read_file(const std::filesystem::path& path);

} // namespace spoofdet

#endif
