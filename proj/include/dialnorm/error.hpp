#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dialnorm {

/// Base class for every error raised by the library. The CLI maps
/// TransportError to exit code 2 and everything else to 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

/// A malformed data row. `line()` is the 1-based physical line in the file.
class RowError : public Error {
public:
    RowError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class DecodeError : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

class ConflictError : public Error {
public:
    using Error::Error;
};

class LookupError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class DegenerateError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class AlignmentError : public Error {
public:
    using Error::Error;
};

class StratificationError : public Error {
public:
    using Error::Error;
};

class DivergenceError : public Error {
public:
    using Error::Error;
};

/// Network failure that persisted through every retry.
class TransportError : public Error {
public:
    TransportError(int attempts, const std::string& what)
        : Error(what + " (after " + std::to_string(attempts) + " attempt" +
                (attempts == 1 ? "" : "s") + ")"),
          attempts_(attempts),
          reason_(what) {}
    int attempts() const noexcept { return attempts_; }
    /// Message without the attempt count.
    const std::string& reason() const noexcept { return reason_; }

private:
    int attempts_;
    std::string reason_;
};

/// The endpoint answered but the payload was unusable (e.g. empty completion).
class ContentError : public Error {
public:
    using Error::Error;
};

class BatchError : public Error {
public:
    using Error::Error;
};

class TieViolationError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

}  // namespace dialnorm
