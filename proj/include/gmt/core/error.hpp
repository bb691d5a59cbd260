#pragma once

#include <stdexcept>
#include <string>

namespace gmt {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (negative t, α ≤ 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An atom that cannot be placed in the root box.
class PlacementError : public Error {
 public:
  using Error::Error;
};

/// No dyadic cover exists under the requested radius cap.
class InfeasibleCoverError : public Error {
 public:
  using Error::Error;
};

class DegenerateGaugeError : public Error {
 public:
  using Error::Error;
};

/// An outer-measure oracle failed one of its sampled axioms.
class OracleContractError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or inconsistent serialized data.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Grid too coarse for the requested kernel, radius or support.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

}  // namespace gmt
