// Copyright 2026 The pdq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace pdq {

/// Base for every error the library raises on bad input or an unsolvable
/// request. Non-convergence is reported through result flags, not here.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class UnsupportedInputError : public Error {
 public:
  using Error::Error;
};

class MappingError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidMeanFieldError : public Error {
 public:
  using Error::Error;
};

class BracketError : public Error {
 public:
  BracketError(const std::string& what, double lo_value, double hi_value)
      : Error(what), lo_value_(lo_value), hi_value_(hi_value) {}
  /// Objective evaluated at the two ends of the final bracket.
  double lo_value() const noexcept { return lo_value_; }
  double hi_value() const noexcept { return hi_value_; }

 private:
  double lo_value_;
  double hi_value_;
};

class UndefinedCorrelationError : public Error {
 public:
  using Error::Error;
};

}  // namespace pdq
