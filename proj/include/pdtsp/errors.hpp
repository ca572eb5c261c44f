#pragma once

#include <stdexcept>
#include <string>

namespace pdtsp {

// Base class for all library errors. Specific types exist so callers and
// tests can react to individual failure modes.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class InvalidSize : public Error {
public:
    using Error::Error;
};

class DepotHasNoPair : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(int line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class NotAPermutation : public Error {
public:
    using Error::Error;
};

class PrecedenceViolated : public Error {
public:
    PrecedenceViolated(int pickup, int delivery)
        : Error("precedence violated for pair (" + std::to_string(pickup) + ", " +
                std::to_string(delivery) + ")"),
          pickup_(pickup),
          delivery_(delivery) {}
    int pickup() const { return pickup_; }
    int delivery() const { return delivery_; }

private:
    int pickup_;
    int delivery_;
};

class InvalidOrder : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class TooLarge : public Error {
public:
    using Error::Error;
};

class MoveOutOfRange : public Error {
public:
    using Error::Error;
};

class MoveIllTyped : public Error {
public:
    using Error::Error;
};

class PositionClash : public Error {
public:
    using Error::Error;
};

class InsertionNotDecomposable : public Error {
public:
    using Error::Error;
};

class EmptyBuffer : public Error {
public:
    using Error::Error;
};

class InvalidConfig : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

}  // namespace pdtsp
