#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cosime {

// Input-side failures: malformed files, bad shapes, unknown config keys.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ShapeError : public InputError {
public:
    using InputError::InputError;
};

class ParseError : public InputError {
public:
    ParseError(const std::string& what, std::size_t line)
        : InputError(what + " (line " + std::to_string(line) + ")"), detail_(what), line_(line) {}

    std::size_t line() const { return line_; }
    const std::string& detail() const { return detail_; }

private:
    std::string detail_;
    std::size_t line_;
};

class LookupError : public InputError {
public:
    using InputError::InputError;
};

// Arguments outside the mathematical domain of a model equation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Solver failures that cannot be reported through a result flag.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cosime
