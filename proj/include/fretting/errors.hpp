#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fretting {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Musically or physically impossible requests: invalid positions, unplayable
/// pitches, infeasible chords, misaligned note sequences.
class DomainError : public Error {
 public:
  using Error::Error;
};

class AlignmentError : public DomainError {
 public:
  AlignmentError(std::size_t expected, std::size_t actual, const std::string& what)
      : DomainError(what + " (expected " + std::to_string(expected) + ", got " +
                    std::to_string(actual) + ")"),
        expected_(expected),
        actual_(actual) {}

  std::size_t expected() const noexcept { return expected_; }
  std::size_t actual() const noexcept { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

/// Malformed input data. `location` is a byte offset, line number, or token
/// index depending on the format.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t location)
      : Error(what), location_(location) {}

  std::size_t location() const noexcept { return location_; }

 private:
  std::size_t location_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fretting
