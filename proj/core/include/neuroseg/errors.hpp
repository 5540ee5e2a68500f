#pragma once

#include <stdexcept>
#include <string>

namespace neuroseg {

// Bad user input: malformed files, out-of-range parameters, missing data.
// The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Mismatched raster dimensions or channel counts.
class DimensionError : public InputError {
public:
    explicit DimensionError(const std::string& msg) : InputError(msg) {}
};

// A documented invariant failed to hold at runtime. CLI exit code 3.
class InvariantError : public std::runtime_error {
public:
    explicit InvariantError(const std::string& msg) : std::runtime_error(msg) {}
};

// A resource guard refused the operation (e.g. tile window exceeds the
// configured memory budget). CLI exit code 4.
class ResourceGuardError : public std::runtime_error {
public:
    explicit ResourceGuardError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace neuroseg
