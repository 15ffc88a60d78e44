#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cohmeta {

/// Malformed or invalid input data. `line()` is 1-based, 0 when not tied to a line.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Two score sets disagree on which (document, system) keys they cover.
class CoverageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cohmeta
