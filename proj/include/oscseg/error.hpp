#pragma once

#include <stdexcept>
#include <string>

namespace oscseg {

// Bad argument values: empty windows, malformed grids, mismatched sizes.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Series shorter than the minimum an operation needs (periodogram: 4).
class SeriesTooShort : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Segment window too short to fit (susie: 2 samples).
class SegmentTooShort : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// A closed-form trigonometric sum whose denominator vanishes.
class DegenerateFrequency : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Split point violates the minimum segment length.
class SplitInfeasible : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Non-finite quantity produced inside a fit.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace oscseg
