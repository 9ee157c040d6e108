#pragma once

#include <stdexcept>
#include <string>

namespace salq {

// Base for everything thrown by the library.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid input values (non-positive rates, malformed polynomials, ...).
struct domain_error : error {
  using error::error;
};

// A formula was evaluated outside the parameter regime where it holds
// (below threshold, c <= 8, degenerate leading coefficients, ...).
struct regime_error : error {
  using error::error;
};

// The requested root does not exist or is ambiguous.
struct root_selection_error : error {
  using error::error;
};

// Adaptive quadrature failed to meet its tolerance.
struct integration_error : error {
  using error::error;
};

// Fock-space truncation too small for the requested state.
struct cutoff_error : error {
  using error::error;
};

// Linear algebra breakdown (singular system, zero pivot).
struct numerical_error : error {
  using error::error;
};

}  // namespace salq
