#pragma once

#include <stdexcept>
#include <string>

namespace grafkit {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or unsupported raster/RLE input.
class DecodeError : public Error {
public:
    using Error::Error;
};

/// Zero or mismatched raster dimensions.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Manifest violates the record schema (missing field, bad value, duplicate id).
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Operation received an empty mask where foreground is required.
class EmptyMaskError : public Error {
public:
    using Error::Error;
};

/// Degenerate or undefined geometric configuration.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// A scene cannot be measured (missing structure or landmark).
class MeasureError : public Error {
public:
    using Error::Error;
};

/// Numeric input outside the operation's domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Phantom specification cannot be realized on the requested canvas.
class InfeasibleSpecError : public Error {
public:
    using Error::Error;
};

} // namespace grafkit
