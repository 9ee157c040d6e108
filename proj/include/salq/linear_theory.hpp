#pragma once

// Linearized Heisenberg-Langevin results: classical intracavity intensity,
// the linear Mandel Q parameter, and the threshold / self-quenching pump
// values bounding the lasing window.

#include <cmath>
#include <limits>

#include "salq/errors.hpp"

namespace salq {

struct Thresholds {
  double r_th = 0.0;  // lasing threshold
  double r_m = 0.0;   // pump of maximal intensity
  double r_q = 0.0;   // self-quenching pump
  double I_m = 0.0;   // maximal classical intensity
};

struct LinearTheoryResult {
  double I0 = 0.0;
  double Qf_lin = std::numeric_limits<double>::quiet_NaN();
  double r_th = std::numeric_limits<double>::quiet_NaN();
  double r_m = std::numeric_limits<double>::quiet_NaN();
  double r_q = std::numeric_limits<double>::quiet_NaN();
  double I_m = std::numeric_limits<double>::quiet_NaN();
  bool valid = false;  // c > 8 and r inside (r_th, r_q)
};

inline double classical_intensity(double r, double I_s, double c) {
  return 0.5 * I_s * ((r - 1.0) - (r + 1.0) * (r + 1.0) / c);
}

// Raw value of the linear Mandel Q formula; diverges at the window edges.
inline double mandel_lin_unchecked(double r, double c) {
  const double rp = r + 1.0;
  const double num = 2.0 * c * c - c * (r - 5.0) * rp + 3.0 * rp * rp * rp;
  const double den = 2.0 * c * c * ((r - 1.0) - rp * rp / c);
  return num / den;
}

inline double mandel_lin(double r, double c) {
  const double rp = r + 1.0;
  const double den = 2.0 * c * c * ((r - 1.0) - rp * rp / c);
  if (!(den > 0.0))
    throw regime_error("mandel_lin: pump outside the lasing window (r_th, r_q)");
  return mandel_lin_unchecked(r, c);
}

inline Thresholds thresholds(double c, double I_s = 1.0) {
  if (!(c > 8.0)) throw regime_error("thresholds: no lasing window for c <= 8");
  Thresholds t;
  const double half_width = 0.5 * c * std::sqrt(1.0 - 8.0 / c);
  t.r_m = 0.5 * c - 1.0;
  t.r_th = t.r_m - half_width;
  t.r_q = t.r_m + half_width;
  t.I_m = I_s * (c / 8.0 - 1.0);
  return t;
}

inline LinearTheoryResult linear_result(double r, double I_s, double c) {
  LinearTheoryResult res;
  res.I0 = classical_intensity(r, I_s, c);
  if (c > 8.0) {
    const Thresholds t = thresholds(c, I_s);
    res.r_th = t.r_th;
    res.r_m = t.r_m;
    res.r_q = t.r_q;
    res.I_m = t.I_m;
    if (r > t.r_th && r < t.r_q) {
      res.valid = true;
      res.Qf_lin = mandel_lin(r, c);
    }
  }
  return res;
}

}  // namespace salq
