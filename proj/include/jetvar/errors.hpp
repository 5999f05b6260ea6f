#pragma once

#include <stdexcept>
#include <string>

namespace jetvar {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CyclicBinding : public Error {
public:
    using Error::Error;
};

class UnboundSymbol : public Error {
public:
    using Error::Error;
};

/// A half-integer power was evaluated at a negative radicand.
class NegativeRadicand : public Error {
public:
    using Error::Error;
};

class DivisionByZero : public Error {
public:
    using Error::Error;
};

class UnsupportedExponent : public Error {
public:
    using Error::Error;
};

class UnknownCoordinate : public Error {
public:
    using Error::Error;
};

class OrderViolation : public Error {
public:
    using Error::Error;
};

class DegreeOverflow : public Error {
public:
    using Error::Error;
};

class VerificationFailed : public Error {
public:
    using Error::Error;
};

class SyntaxError : public Error {
public:
    SyntaxError(const std::string& what, int line, int column)
        : Error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
          line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

}  // namespace jetvar
