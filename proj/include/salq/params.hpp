#pragma once

// Physical rate constants of the incoherently pumped single-atom laser and
// the two dimensionless parameterizations used by the rest of the library:
// the user-facing triple (r, I_s, c) and the coefficient-table variables
// (omega, eta, tau).

#include <cmath>
#include <string>

#include "salq/errors.hpp"

namespace salq {

// Pumping at rate pump/2, spontaneous decay at decay/2, cavity loss at
// cavity_loss/2, atom-mode coupling g.
struct RateSet {
  double pump = 0.0;        // Gamma
  double decay = 0.0;       // gamma
  double cavity_loss = 0.0; // kappa
  double coupling = 0.0;    // g

  void validate() const {
    auto bad = [](double v) { return !(v > 0.0) || !std::isfinite(v); };
    if (bad(pump) || bad(decay) || bad(cavity_loss) || bad(coupling))
      throw domain_error("RateSet: all rates must be positive and finite");
  }
};

struct ReducedParams {
  double r = 0.0;     // pump parameter Gamma/gamma
  double I_s = 0.0;   // saturation gamma/kappa
  double c = 0.0;     // cooperativity 4 g^2 / (gamma kappa)
  double omega = 0.0; // Gamma / 2g
  double eta = 0.0;   // gamma / 2g
  double tau = 0.0;   // kappa / 2g

  void validate() const {
    auto bad = [](double v) { return !(v > 0.0) || !std::isfinite(v); };
    if (bad(r) || bad(I_s) || bad(c) || bad(omega) || bad(eta) || bad(tau))
      throw domain_error("ReducedParams: all parameters must be positive and finite");
    auto off = [](double x, double y) { return std::abs(x - y) > 1e-12 * std::max(std::abs(x), std::abs(y)); };
    if (off(r, omega / eta) || off(I_s, eta / tau) || off(c, 1.0 / (eta * tau)))
      throw domain_error("ReducedParams: (r, I_s, c) inconsistent with (omega, eta, tau)");
  }
};

inline ReducedParams reduce(const RateSet& rates) {
  rates.validate();
  ReducedParams p;
  p.r = rates.pump / rates.decay;
  p.I_s = rates.decay / rates.cavity_loss;
  p.c = 4.0 * rates.coupling * rates.coupling / (rates.decay * rates.cavity_loss);
  p.omega = rates.pump / (2.0 * rates.coupling);
  p.eta = rates.decay / (2.0 * rates.coupling);
  p.tau = rates.cavity_loss / (2.0 * rates.coupling);
  p.validate();
  return p;
}

// Inverts (r, I_s, c) with kappa as the free time scale. Every observable in
// scope is dimensionless, so the choice of kappa_scale is inert.
inline RateSet from_dimensionless(double r, double I_s, double c, double kappa_scale = 1.0) {
  if (!(r > 0.0) || !(I_s > 0.0) || !(c > 0.0) || !(kappa_scale > 0.0))
    throw domain_error("from_dimensionless: parameters must be positive");
  RateSet rates;
  rates.cavity_loss = kappa_scale;
  rates.decay = I_s * kappa_scale;
  rates.pump = r * rates.decay;
  rates.coupling = std::sqrt(c * rates.decay * rates.cavity_loss) / 2.0;
  rates.validate();
  return rates;
}

inline ReducedParams params_from_triple(double r, double I_s, double c) {
  return reduce(from_dimensionless(r, I_s, c));
}

}  // namespace salq
