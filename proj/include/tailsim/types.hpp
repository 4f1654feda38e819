#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tailsim {

using Index = std::int64_t;
using Count = std::int64_t;
using Seed = std::uint64_t;

// A parse failure in an external input (Matrix Market file, generator string,
// config document). Carries the 1-based line number when one makes sense.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, long line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + std::move(message)
                                      : std::move(message)),
          line_(line) {}

    long line() const { return line_; }

private:
    long line_;
};

// A violated call contract: bad argument ranges, operations issued against a
// state that forbids them (e.g. fill with zero credits).
class ContractError : public std::logic_error {
public:
    explicit ContractError(const std::string& message) : std::logic_error(message) {}
};

// An invalid run configuration (strategy/capacity/estimator parameters).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& message) : std::runtime_error(message) {}
};

// Half-open rectangular window [row_lo, row_hi) x [col_lo, col_hi).
struct Window {
    Index row_lo = 0;
    Index row_hi = 0;
    Index col_lo = 0;
    Index col_hi = 0;

    Index rows() const { return row_hi - row_lo; }
    Index cols() const { return col_hi - col_lo; }
    Count area() const { return rows() * cols(); }

    bool operator==(const Window&) const = default;
};

// Which side of the multiplication a matrix plays: the stationary operand A
// (M x K, shared dimension on columns) or the streamed operand B (K x N,
// shared dimension on rows).
enum class OperandRole { A, B };

inline const char* to_string(OperandRole role) { return role == OperandRole::A ? "a" : "b"; }

}  // namespace tailsim
