#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rgrk {

// Caller broke a documented precondition (bad index, dimension mismatch, ...).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// A mathematical precondition of a bound does not hold.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Random generation could not produce a valid object (e.g. repeated singular draws).
class GenerationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Should be unreachable; signals a bug rather than bad input.
class InternalInvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool condition, const char* message) {
    if (!condition) throw ContractViolation(message);
}

inline void require(bool condition, const std::string& message) {
    if (!condition) throw ContractViolation(message);
}

}  // namespace rgrk
