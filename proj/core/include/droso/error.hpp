#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace droso {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid construction parameter (zero sizes, out-of-range fractions, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Operand lengths or shapes that do not agree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Input data that cannot be used: undecodable images, too few places.
class DataError : public Error {
public:
    using Error::Error;
};

/// Filesystem failure; the message carries the offending path.
class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed model file. offset() is the byte position where parsing stopped.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::size_t offset)
        : Error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// The model file declares a format version this build does not read.
class UnsupportedVersionError : public FormatError {
public:
    using FormatError::FormatError;
};

}  // namespace droso
