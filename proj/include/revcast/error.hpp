#pragma once

#include <stdexcept>
#include <string>

namespace revcast {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numeric parameter is outside its allowed domain (discount, period, horizon).
class ParameterError : public Error {
public:
    using Error::Error;
};

class EmptyRegressionError : public Error {
public:
    using Error::Error;
};

class NamingCollisionError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// Observed data is unusable (non-finite outcome, non-positive price or actual).
class DataError : public Error {
public:
    using Error::Error;
};

/// A structure references a covariate the supplied table does not carry.
class ResolutionError : public Error {
public:
    using Error::Error;
};

class LookupError : public Error {
public:
    using Error::Error;
};

class AlignmentError : public Error {
public:
    using Error::Error;
};

class NameMismatchError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class EmptyEvaluationError : public Error {
public:
    using Error::Error;
};

class KeyMismatchError : public Error {
public:
    using Error::Error;
};

/// Input file problems. Carries the 1-based line number of the offending row
/// (0 when the problem is not tied to a row).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line) : Error(what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class SchemaError : public ParseError {
public:
    using ParseError::ParseError;
};

class DuplicateKeyError : public ParseError {
public:
    using ParseError::ParseError;
};

class InvariantError : public ParseError {
public:
    using ParseError::ParseError;
};

}  // namespace revcast
