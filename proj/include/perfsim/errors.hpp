#pragma once

#include <stdexcept>
#include <string>

namespace perfsim {

/// Base of every error raised by the library. Callers that only care about
/// "something was rejected" catch this; the subclasses let tests and the CLI
/// tell the failure modes apart.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied argument is outside the operation's domain
/// (empty range, probability outside [0,1], nonpositive parameter, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A density whose total mass is zero.
class DegenerateDensity : public Error {
 public:
  using Error::Error;
};

/// An envelope that fails to dominate its target, or an adaptive refinement
/// that leaves the band h <= g_a <= g.
class EnvelopeViolation : public Error {
 public:
  using Error::Error;
};

/// Recursion would go deeper than the termination guard allows.
class DepthExceeded : public Error {
 public:
  using Error::Error;
};

/// A truncated run needed an oracle answer that could not be produced.
class OracleUnavailable : public Error {
 public:
  using Error::Error;
};

/// The transition kernel has more than one closed communicating class.
class NoUniqueStationary : public Error {
 public:
  using Error::Error;
};

/// A linear solve failed (singular system).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace perfsim
