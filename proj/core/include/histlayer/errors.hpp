#pragma once

#include <stdexcept>
#include <string>

namespace histlayer {

// Two operands disagree on height/width or vector length.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Two histograms (or stacks) were built with different binning.
class ConfigMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A probability table has no mass, or has zero joint entropy.
class DegenerateDistribution : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OptimizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace histlayer
