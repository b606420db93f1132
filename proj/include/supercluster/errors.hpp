#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace supercluster {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands live over different symbol tables.
class DimensionError : public Error {
public:
    using Error::Error;
};

class DivisionByZero : public Error {
public:
    using Error::Error;
};

/// Raised when an element with zero body (purely nilpotent) would have to be inverted.
class NotInvertible : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Wrong parity or mutability for the requested mutation, or a forbidden
/// mixed sequence in algebra mode.
class IllegalMutation : public Error {
public:
    using Error::Error;
};

/// A computation grew past a configured size limit.
class ResourceLimit : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

} // namespace supercluster
