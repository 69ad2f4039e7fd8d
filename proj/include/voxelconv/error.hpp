// Copyright 2026 The voxelconv Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace voxelconv {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidShapeError : public Error {
  public:
    using Error::Error;
};

class OutOfBoundsError : public Error {
  public:
    explicit OutOfBoundsError(const std::string& msg, std::int64_t row = -1)
        : Error(msg), row_(row) {}
    std::int64_t row() const { return row_; }

  private:
    std::int64_t row_;
};

class DuplicateCoordinateError : public Error {
  public:
    DuplicateCoordinateError(const std::string& msg, std::int64_t row_a, std::int64_t row_b)
        : Error(msg), row_a_(row_a), row_b_(row_b) {}
    std::int64_t row_a() const { return row_a_; }
    std::int64_t row_b() const { return row_b_; }

  private:
    std::int64_t row_a_;
    std::int64_t row_b_;
};

class LengthMismatchError : public Error {
  public:
    using Error::Error;
};

class EvenKernelError : public Error {
  public:
    explicit EvenKernelError(std::int32_t k)
        : Error("kernel size must be odd, got " + std::to_string(k)), kernel_(k) {}
    std::int32_t kernel() const { return kernel_; }

  private:
    std::int32_t kernel_;
};

class ShapeMismatchError : public Error {
  public:
    using Error::Error;
};

class MissingParentError : public Error {
  public:
    explicit MissingParentError(const std::string& msg, std::int64_t fine_row = -1)
        : Error(msg), fine_row_(fine_row) {}
    std::int64_t fine_row() const { return fine_row_; }

  private:
    std::int64_t fine_row_;
};

class ChannelMismatchError : public Error {
  public:
    explicit ChannelMismatchError(const std::string& msg, std::int64_t layer = -1)
        : Error(msg), layer_(layer) {}
    std::int64_t layer() const { return layer_; }

  private:
    std::int64_t layer_;
};

class UnmatchedInverseError : public Error {
  public:
    explicit UnmatchedInverseError(const std::string& msg, std::int64_t layer = -1)
        : Error(msg), layer_(layer) {}
    std::int64_t layer() const { return layer_; }

  private:
    std::int64_t layer_;
};

// File format errors.
class BadMagicError : public Error {
  public:
    using Error::Error;
};

class VersionUnsupportedError : public Error {
  public:
    using Error::Error;
};

class TruncatedError : public Error {
  public:
    using Error::Error;
};

class InvariantViolationError : public Error {
  public:
    using Error::Error;
};

}  // namespace voxelconv
