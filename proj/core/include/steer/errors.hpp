#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace steer {

/// Bad user input: config keys, parameter ranges, dimension mismatches.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Integration produced a non-finite state.
class BlowupError : public std::runtime_error {
public:
    BlowupError(const std::string& what, std::size_t step)
        : std::runtime_error(what), step_(step) {}

    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

/// File system / output failures.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace steer
