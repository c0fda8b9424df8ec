#ifndef SPOOFDET_ERRORS_HPP
#define SPOOFDET_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace spoofdet {

// Bad input data or violated preconditions (invalid coordinates, malformed
// files, out-of-range parameters). Maps to exit code 2 in the CLI.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// File-level parse failure; message carries the offending location.
class ParseError : public ValidationError {
public:
    explicit ParseError(const std::string& msg) : ValidationError(msg) {}
};

// Filesystem problems (missing file, failed write).
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace spoofdet

#endif
