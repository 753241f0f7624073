#pragma once

#include <stdexcept>
#include <string>

namespace lbmlab {

// Invalid physical input (rho <= 0, singular condition, infeasible tuning).
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Instability, eigensolver non-convergence, failed mode tracking.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unknown model, missing or malformed parameter, bad config key.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lbmlab
