#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace trivol {

// Base for everything thrown by the library. CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments / malformed configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// File and format problems (CLI exit code 3).
class IoError : public Error {
 public:
  using Error::Error;
};

class BadMagicError : public IoError {
 public:
  using IoError::IoError;
};

// Fewer bytes than the header promised. Message carries both counts;
// they are kept as members so tests don't have to parse strings.
class TruncatedFileError : public IoError {
 public:
  TruncatedFileError(const std::string& path, std::uint64_t expected, std::uint64_t actual)
      : IoError(path + ": truncated, expected " + std::to_string(expected) +
                " bytes, got " + std::to_string(actual)),
        expected_bytes(expected),
        actual_bytes(actual) {}
  std::uint64_t expected_bytes;
  std::uint64_t actual_bytes;
};

// Payload length disagrees with the dims in the header (e.g. trailing bytes).
class PayloadSizeError : public IoError {
 public:
  using IoError::IoError;
};

// Structurally incompatible operands (dims mismatch, wrong vector length).
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Loss went non-finite; names where. Exit code 4.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, std::int64_t epoch_, std::int64_t slice_)
      : Error(what), epoch(epoch_), slice(slice_) {}
  explicit NumericError(const std::string& what) : Error(what), epoch(-1), slice(-1) {}
  std::int64_t epoch;
  std::int64_t slice;
};

// Test poses intersecting the training poses invalidate the evaluation.
class PoseOverlapError : public Error {
 public:
  using Error::Error;
};

// Atlas fit ended below the minimum acceptable quality.
class AtlasFitError : public Error {
 public:
  using Error::Error;
};

}  // namespace trivol
