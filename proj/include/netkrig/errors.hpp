#pragma once

#include <stdexcept>
#include <string>

namespace netkrig {

// Raised for malformed configuration or data files: bad syntax, unknown keys,
// missing required fields, inconsistent dimensions declared by the file itself.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a numerical routine cannot proceed (singular system, negative
// spectrum, non-positive fitted means, divergent iteration).  `operation()`
// names the routine that failed so callers can report it.
class numerical_error : public std::runtime_error {
public:
    numerical_error(std::string operation, const std::string& what)
        : std::runtime_error(operation + ": " + what), op_(std::move(operation)) {}

    const std::string& operation() const noexcept { return op_; }

private:
    std::string op_;
};

}  // namespace netkrig
