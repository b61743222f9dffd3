#pragma once

#include <stdexcept>
#include <string>

namespace tgreplay {

/// Logical index outside [0, size).
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Malformed runtime input (non-finite values, u outside [0,1), empty lists).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Sampler or metric parameter outside its admissible range.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Sampling is impossible in the current state (e.g. zero total priority).
class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A multi-task buffer was sampled before every task had data.
class NotReadyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative solver failed to reach tolerance.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration or config file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tgreplay
