#pragma once

#include <stdexcept>
#include <string>

namespace prefsearch {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input document (JSON syntax, wrong field types).
class ParseError : public Error {
public:
    using Error::Error;
};

// Well-formed input that violates a data-model invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Query or selection that cannot be evaluated against the catalog.
class QueryError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// File that cannot be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

class SessionError : public Error {
public:
    using Error::Error;
};

class ReplayDivergence : public SessionError {
public:
    ReplayDivergence(std::size_t event_index, const std::string& what)
        : SessionError(what), event_index_(event_index) {}

    std::size_t event_index() const noexcept { return event_index_; }

private:
    std::size_t event_index_;
};

// Raised by the dataset generator when its own output fails the self-check.
class ConstraintViolation : public Error {
public:
    using Error::Error;
};

class EvalError : public Error {
public:
    using Error::Error;
};

} // namespace prefsearch
