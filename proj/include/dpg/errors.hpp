#pragma once

#include <stdexcept>
#include <string>

namespace dpg {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};
struct NotSymmetric : Error {
  using Error::Error;
};
struct NotStochastic : Error {
  using Error::Error;
};
struct NotConnected : Error {
  using Error::Error;
};
struct InvalidDegree : Error {
  using Error::Error;
};
struct DisconnectedAfterRetries : Error {
  using Error::Error;
};
struct NoConvergence : Error {
  using Error::Error;
};
struct NotStronglyConvex : Error {
  using Error::Error;
};
struct BetaTildeNotContractive : Error {
  using Error::Error;
};
struct UnsupportedCase : Error {
  using Error::Error;
};
struct InadmissibleSchedule : Error {
  using Error::Error;
};
struct PreconditionViolated : Error {
  using Error::Error;
};

// State blew up (or went non-finite) at iteration t.
struct NonFiniteState : Error {
  long t;
  NonFiniteState(const std::string& msg, long t_) : Error(msg), t(t_) {}
};

}  // namespace dpg
