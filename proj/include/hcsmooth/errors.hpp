#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hcsmooth {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the 1-based line where parsing stopped.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class BoundsError : public Error {
public:
    using Error::Error;
};

class DuplicateEntryError : public Error {
public:
    using Error::Error;
};

class UnsupportedFormatError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// Invalid parameters or an incompatible algorithm/problem combination.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Refusal of an exhaustive computation whose cost would explode.
class CostGuardError : public Error {
public:
    using Error::Error;
};

}  // namespace hcsmooth
