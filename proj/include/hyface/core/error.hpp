#pragma once

#include <stdexcept>
#include <string>

namespace hyface {

// Input violates a type invariant (out-of-range DoF, bad weight, non-finite value).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the domain of an operation (time, diameter, window).
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Malformed or incomplete data file. The message names the offending entry.
class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Query the model deliberately leaves undefined (e.g. tired pupil target).
class UnspecifiedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hyface
