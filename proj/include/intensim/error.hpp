#pragma once

#include <stdexcept>
#include <string>

namespace intensim {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A file could not be read, written or parsed.
class IoError : public Error {
public:
    using Error::Error;
};

/// Two images (or an image and a mask) do not share dimensions.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// A parameter or configuration value is outside its valid domain.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The joint intensity range of a pair is zero.
class DegenerateInput : public Error {
public:
    using Error::Error;
};

/// The sensitivity index is undefined because the baseline score is 1.
class UndefinedSensitivity : public Error {
public:
    using Error::Error;
};

}  // namespace intensim
