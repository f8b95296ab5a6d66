#pragma once

#include <stdexcept>
#include <string>

namespace sfs {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Dimension, divisibility or layout constraint violated.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Malformed file header or payload; the message names the offending field.
class FormatError : public Error {
public:
    using Error::Error;
};

// Value outside its permitted range (code vs. wbit, bit bounds, ...).
class RangeError : public Error {
public:
    using Error::Error;
};

// Input violates an encoding precondition (e.g. a zero weight carrying a
// nonzero quantization code).
class EncodingError : public Error {
public:
    using Error::Error;
};

// Entry stream walks past the declared block length.
class CorruptStream : public Error {
public:
    using Error::Error;
};

class DivisionError : public Error {
public:
    using Error::Error;
};

} // namespace sfs
