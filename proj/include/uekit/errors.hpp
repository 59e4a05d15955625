#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uekit {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text: dataset lines, model outputs, list payloads.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input that violates a documented invariant.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A metric is undefined for the given data (e.g. one label class only).
class MetricError : public Error {
 public:
  using Error::Error;
};

/// Failure talking to a model backend.
class BackendError : public Error {
 public:
  explicit BackendError(const std::string& what, bool retryable = false)
      : Error(what), retryable_(retryable) {}
  bool retryable() const noexcept { return retryable_; }

 private:
  bool retryable_;
};

/// Strict replay found no recorded response for a request.
class ReplayMiss : public BackendError {
 public:
  explicit ReplayMiss(const std::string& key) : BackendError("trace miss: " + key) {}
};

}  // namespace uekit
