#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stegcost {

/// Malformed input files, bad option values, unknown identifiers. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem failures: missing paths, unreadable or unwritable files. CLI exit code 3.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Infeasible payloads, solver failures, out-of-domain data. CLI exit code 4.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Parse failure in a byte-level format; carries the offending byte offset.
class ParseError : public ConfigError {
public:
    ParseError(const std::string& what, std::size_t byte_offset)
        : ConfigError(what + " (byte offset " + std::to_string(byte_offset) + ")"),
          byte_offset_(byte_offset) {}

    std::size_t byte_offset() const noexcept { return byte_offset_; }

private:
    std::size_t byte_offset_;
};

}  // namespace stegcost
