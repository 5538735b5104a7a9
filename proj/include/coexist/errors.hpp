#pragma once

#include <stdexcept>
#include <string>

namespace coexist {

// Base class for everything this library throws.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad grid construction or restriction target.
struct InvalidGrid : Error {
  using Error::Error;
};

// Malformed caller input (unsorted arrays, unknown enum, ...).
struct InvalidInput : Error {
  using Error::Error;
};

// Argument outside the mathematically admissible range
// (e.g. inverse response above sup F, threshold outside its bracket).
struct OutOfRange : Error {
  using Error::Error;
};

// Weighted eigenproblem called with a sign-indefinite weight.
struct InvalidWeight : Error {
  using Error::Error;
};

// Eigen computation failed to converge.
struct EigFailure : Error {
  using Error::Error;
};

// Nonlinear solve diverged or left the positive cone.
struct SolveFailure : Error {
  using Error::Error;
};

// mu_star queried where the growth rate is negative for every mu.
struct NoInstabilityWindow : Error {
  using Error::Error;
};

// Identity check invoked on a state with an identically zero component.
struct NotCoexistence : Error {
  using Error::Error;
};

// Limit profile requested outside the regime where it exists.
struct NoLimitProfile : Error {
  using Error::Error;
};

// Configuration the theory does not cover (e.g. nonmonotone m in the
// small-diffusion free-boundary construction).
struct Unsupported : Error {
  using Error::Error;
};

// Time step violates the explicit-part stability estimate.
struct StepRejected : Error {
  StepRejected(const std::string& msg, double suggested)
      : Error(msg), suggested_dt(suggested) {}
  double suggested_dt;
};

}  // namespace coexist
