#pragma once

#include <stdexcept>
#include <string>

namespace eigenbound {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad run configuration: unknown keys, missing labels, stale caches.
struct ConfigError : Error {
  using Error::Error;
};

// A function was handed arguments that violate its contract
// (mesh/vector size mismatches, ids out of range).
struct ArgumentError : Error {
  using Error::Error;
};

// Coefficient data is unusable (non-SPD diffusion, negative reaction).
struct CoefficientError : Error {
  using Error::Error;
};

// A matrix failed a structural requirement (not SPD, singular factorization).
struct MatrixError : Error {
  using Error::Error;
};

// An iterative solver ran out of its iteration budget.
struct ConvergenceError : Error {
  using Error::Error;
};

// The lower-bound certificate could not be issued: the residual term beta
// reached lambda_star * ||target norm|| and the square-root argument of the
// bound formula loses its sign guarantee. Carries the offending values.
struct CertificateError : Error {
  CertificateError(const std::string& msg, double beta_, double lambda_star_)
      : Error(msg), beta(beta_), lambda_star(lambda_star_) {}
  double beta;
  double lambda_star;
};

}  // namespace eigenbound
