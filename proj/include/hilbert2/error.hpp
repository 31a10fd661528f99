#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hilbert2 {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad context parameters (degree, precision, level, window).
struct ConfigError : Error {
    using Error::Error;
};

// Operands built on different contexts.
struct ContextMismatch : Error {
    ContextMismatch() : Error("operands belong to different contexts") {}
};

struct NotInvertible : Error {
    using Error::Error;
};

// An input violates an operation's precondition.
struct DomainError : Error {
    using Error::Error;
};

// A coefficient fell outside the exponent window [-N, N].
struct WindowExhausted : Error {
    using Error::Error;
};

// Guard bits ran out, or two precisions disagreed.
struct PrecisionError : Error {
    using Error::Error;
};

struct InternalError : Error {
    using Error::Error;
};

struct ParseError : Error {
    ParseError(std::size_t pos, const std::string& what)
        : Error("at position " + std::to_string(pos) + ": " + what), position(pos) {}
    std::size_t position;
};

}  // namespace hilbert2
