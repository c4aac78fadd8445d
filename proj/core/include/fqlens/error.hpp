// =============================================================================
// error.hpp - Exception hierarchy shared by every fqlens module.
//
// Each class maps onto one process exit code in the command-line tool:
//   ConfigError          → 2
//   DomainError          → 2
//   ParseError/Format    → 3
//   UndefinedStatistic   → 4
// =============================================================================
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fqlens {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function (p ∉ [0,1], q ≤ 0).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid analysis or simulation setup.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A statistic that has no value on its input (e.g. every locus monomorphic).
class UndefinedStatistic : public Error {
public:
    using Error::Error;
};

/// Unknown individual / population / chromosome.
class LookupError : public Error {
public:
    using Error::Error;
};

/// Malformed binary container.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Malformed text input. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line)
        : Error(line ? "line " + std::to_string(line) + ": " + message : message),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace fqlens
