#pragma once

// Brute-force ground truth: steady state of the single-atom-laser master
// equation in a truncated Fock basis, the phase-averaged Husimi profile and
// atomic coherence reconstructed from it, and the residual checks that
// validate the analytic chain (continuity identity, fifth-order ODE).

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <vector>

#include "salq/coeffs.hpp"
#include "salq/errors.hpp"
#include "salq/linalg.hpp"
#include "salq/linear_theory.hpp"
#include "salq/numerics.hpp"
#include "salq/params.hpp"
#include "salq/qsolution.hpp"

namespace salq {

using CMatrix = detail::DenseMatrix<std::complex<double>>;

struct SteadyState {
  int cutoff = 0;  // Fock indices 0..cutoff
  RateSet rates;
  CMatrix rho11{0}, rho22{0}, rho12{0};  // <1n|rho|1m>, <2n|rho|2m>, <1n|rho|2m>
  double residual_norm = 0.0;            // Frobenius norm of d rho/dt
  double tail_mass = 0.0;                // population on the top three levels

  std::vector<double> populations() const {
    std::vector<double> p(cutoff + 1);
    for (int n = 0; n <= cutoff; ++n)
      p[n] = rho11(n, n).real() + rho22(n, n).real();
    return p;
  }

  // w_n = <1,n|rho|2,n-1>; index 0 unused.
  std::vector<std::complex<double>> coherences() const {
    std::vector<std::complex<double>> w(cutoff + 1, 0.0);
    for (int n = 1; n <= cutoff; ++n) w[n] = rho12(n, n - 1);
    return w;
  }
};

namespace detail {

// d rho / dt of the truncated master equation, all four blocks.
// rho21 is passed explicitly so the routine makes no Hermiticity assumption.
inline void apply_liouvillian(const RateSet& rates, int N, const CMatrix& r11,
                              const CMatrix& r12, const CMatrix& r21, const CMatrix& r22,
                              CMatrix& d11, CMatrix& d12, CMatrix& d21, CMatrix& d22) {
  const double G = rates.pump, y = rates.decay, k = rates.cavity_loss, g = rates.coupling;
  auto el = [&](const CMatrix& m, int n, int mm) -> std::complex<double> {
    if (n < 0 || mm < 0 || n > N || mm > N) return 0.0;
    return m(n, mm);
  };
  auto block = [&](int i, int kk, int n, int mm) -> std::complex<double> {
    if (i == 1 && kk == 1) return el(r11, n, mm);
    if (i == 1 && kk == 2) return el(r12, n, mm);
    if (i == 2 && kk == 1) return el(r21, n, mm);
    return el(r22, n, mm);
  };
  for (int i = 1; i <= 2; ++i)
    for (int kk = 1; kk <= 2; ++kk) {
      CMatrix& out = (i == 1 && kk == 1) ? d11
                     : (i == 1 && kk == 2) ? d12
                     : (i == 2 && kk == 1) ? d21
                                           : d22;
      for (int n = 0; n <= N; ++n)
        for (int m = 0; m <= N; ++m) {
          std::complex<double> v = 0.0;
          if (i == 1) v += g * std::sqrt(static_cast<double>(n)) * block(2, kk, n - 1, m);
          if (i == 2) v -= g * std::sqrt(n + 1.0) * block(1, kk, n + 1, m);
          if (kk == 2) v -= g * std::sqrt(m + 1.0) * block(i, 1, n, m + 1);
          if (kk == 1) v += g * std::sqrt(static_cast<double>(m)) * block(i, 2, n, m - 1);
          v += k * std::sqrt((n + 1.0) * (m + 1.0)) * block(i, kk, n + 1, m + 1);
          v -= 0.5 * k * (n + m) * block(i, kk, n, m);
          if (i == 1 && kk == 1) v += y * block(2, 2, n, m);
          v -= 0.5 * y * ((i == 2) + (kk == 2)) * block(i, kk, n, m);
          if (i == 2 && kk == 2) v += G * block(1, 1, n, m);
          v -= 0.5 * G * ((i == 1) + (kk == 1)) * block(i, kk, n, m);
          out(n, m) = v;
        }
    }
}

inline double liouvillian_residual(const RateSet& rates, const SteadyState& st) {
  const int N = st.cutoff;
  CMatrix r21(N + 1);
  for (int n = 0; n <= N; ++n)
    for (int m = 0; m <= N; ++m) r21(n, m) = std::conj(st.rho12(m, n));
  CMatrix d11(N + 1), d12(N + 1), d21(N + 1), d22(N + 1);
  apply_liouvillian(rates, N, st.rho11, st.rho12, r21, st.rho22, d11, d12, d21, d22);
  double s = 0.0;
  for (const CMatrix* d : {&d11, &d12, &d21, &d22})
    for (const auto& z : d->a) s += std::norm(z);
  return std::sqrt(s);
}

// The stationary state carries no relative phase between its nonzero
// elements: only p1_n, p2_n and the one-off-diagonal coherences w_n survive,
// all real. Variables are interleaved as [p1_0, p2_0, w_1, p1_1, p2_1, ...],
// giving a banded system with kl = 1, ku = 3.
struct ReducedSolution {
  std::vector<double> p1, p2, w;  // w[0] unused
};

inline ReducedSolution solve_reduced(const RateSet& rates, int N, int pin) {
  const double G = rates.pump, y = rates.decay, k = rates.cavity_loss, g = rates.coupling;
  const int dim = 3 * N + 2;
  auto ip1 = [](int n) { return 3 * n; };
  auto ip2 = [](int n) { return 3 * n + 1; };
  auto iw = [](int n) { return 3 * n - 1; };

  BandedMatrix A(dim, 1, 3);
  std::vector<double> rhs(dim, 0.0);

  for (int n = 0; n <= N; ++n) {
    if (n != pin) {  // d p1_n / dt
      const int r = ip1(n);
      A.add(r, ip1(n), -(G + k * n));
      A.add(r, ip2(n), y);
      if (n >= 1) A.add(r, iw(n), 2.0 * g * std::sqrt(static_cast<double>(n)));
      if (n + 1 <= N) A.add(r, ip1(n + 1), k * (n + 1.0));
    } else {  // replaced by the normalization pin
      A.add(ip1(n), ip1(n), 1.0);
      A.add(ip1(n), ip2(n), 1.0);
      rhs[ip1(n)] = 1.0;
    }
    {  // d p2_n / dt
      const int r = ip2(n);
      A.add(r, ip1(n), G);
      A.add(r, ip2(n), -(y + k * n));
      if (n + 1 <= N) {
        A.add(r, iw(n + 1), -2.0 * g * std::sqrt(n + 1.0));
        A.add(r, ip2(n + 1), k * (n + 1.0));
      }
    }
    if (n >= 1) {  // d w_n / dt
      const int r = iw(n);
      A.add(r, ip2(n - 1), g * std::sqrt(static_cast<double>(n)));
      A.add(r, ip1(n), -g * std::sqrt(static_cast<double>(n)));
      A.add(r, iw(n), -(0.5 * (G + y) + k * (n - 0.5)));
      if (n + 1 <= N) A.add(r, iw(n + 1), k * std::sqrt(n * (n + 1.0)));
    }
  }

  A.factor();
  A.solve(rhs);

  double trace = 0.0;
  for (int n = 0; n <= N; ++n) trace += rhs[ip1(n)] + rhs[ip2(n)];
  if (!(trace > 0.0) || !std::isfinite(trace))
    throw numerical_error("solve_reduced: degenerate normalization");

  ReducedSolution sol;
  sol.p1.resize(N + 1);
  sol.p2.resize(N + 1);
  sol.w.assign(N + 1, 0.0);
  for (int n = 0; n <= N; ++n) {
    sol.p1[n] = rhs[ip1(n)] / trace;
    sol.p2[n] = rhs[ip2(n)] / trace;
    if (n >= 1) sol.w[n] = rhs[iw(n)] / trace;
  }
  return sol;
}

inline SteadyState assemble_state(const RateSet& rates, int N, const ReducedSolution& sol) {
  SteadyState st;
  st.cutoff = N;
  st.rates = rates;
  st.rho11 = CMatrix(N + 1);
  st.rho22 = CMatrix(N + 1);
  st.rho12 = CMatrix(N + 1);
  for (int n = 0; n <= N; ++n) {
    st.rho11(n, n) = sol.p1[n];
    st.rho22(n, n) = sol.p2[n];
    if (n >= 1) st.rho12(n, n - 1) = sol.w[n];
  }
  st.residual_norm = liouvillian_residual(rates, st);
  st.tail_mass = 0.0;
  for (int n = std::max(0, N - 2); n <= N; ++n) st.tail_mass += sol.p1[n] + sol.p2[n];
  return st;
}

}  // namespace detail

// Fock cutoff heuristic: generous head-room above the classical intensity,
// verified post hoc by the tail-mass check.
inline int cutoff_policy(const RateSet& rates) {
  const ReducedParams p = reduce(rates);
  const LinearTheoryResult lin = linear_result(p.r, p.I_s, p.c);
  if (lin.valid && lin.I0 > 0.0) {
    const double I0 = lin.I0;
    return static_cast<int>(std::ceil(I0 + 10.0 * std::sqrt(std::max(I0, 1.0)) + 20.0));
  }
  return 40;
}

inline SteadyState steady_state(const RateSet& rates, int N) {
  rates.validate();
  if (N < 4) throw domain_error("steady_state: cutoff must be at least 4");

  const ReducedParams p = reduce(rates);
  const LinearTheoryResult lin = linear_result(p.r, p.I_s, p.c);
  int pin = 0;
  if (lin.valid && lin.I0 > 1.0)
    pin = std::min(static_cast<int>(std::lround(lin.I0)), N - 2);

  detail::ReducedSolution sol = detail::solve_reduced(rates, N, pin);
  SteadyState st = detail::assemble_state(rates, N, sol);

  // Re-pin at the actual population peak if the first guess left a poor
  // residual (possible when the pinned level carries almost no weight).
  const double rate_scale = rates.pump + rates.decay + rates.cavity_loss + rates.coupling;
  if (st.residual_norm > 1e-11 * rate_scale) {
    const auto pops = st.populations();
    const int peak = static_cast<int>(std::max_element(pops.begin(), pops.end()) - pops.begin());
    if (peak != pin) {
      SteadyState retry = detail::assemble_state(rates, N, detail::solve_reduced(rates, N, peak));
      if (retry.residual_norm < st.residual_norm) st = std::move(retry);
    }
  }

  if (st.tail_mass >= 1e-8)
    throw cutoff_error("steady_state: tail mass " + std::to_string(st.tail_mass) +
                       " at cutoff " + std::to_string(N) + ", increase the Fock cutoff");
  return st;
}

inline SteadyState steady_state_auto(const RateSet& rates) {
  int N = cutoff_policy(rates);
  for (int attempt = 0; attempt < 5; ++attempt) {
    try {
      return steady_state(rates, N);
    } catch (const cutoff_error&) {
      N = static_cast<int>(std::ceil(N * 1.6)) + 10;
    }
  }
  return steady_state(rates, N);
}

// Full-basis direct solve over all 4 (N+1)^2 density-matrix elements with the
// trace condition replacing one redundant equation. No symmetry assumptions:
// used to validate the reduced solver at small cutoffs.
inline SteadyState steady_state_dense(const RateSet& rates, int N) {
  rates.validate();
  const int nb = N + 1;
  const int dim = 4 * nb * nb;
  auto id = [&](int i, int kk, int n, int m) {
    return (((i - 1) * 2 + (kk - 1)) * nb + n) * nb + m;
  };

  detail::DenseMatrix<std::complex<double>> A(dim);
  std::vector<std::complex<double>> rhs(dim, 0.0);
  const double G = rates.pump, y = rates.decay, k = rates.cavity_loss, g = rates.coupling;

  for (int i = 1; i <= 2; ++i)
    for (int kk = 1; kk <= 2; ++kk)
      for (int n = 0; n <= N; ++n)
        for (int m = 0; m <= N; ++m) {
          const int row = id(i, kk, n, m);
          if (row == id(1, 1, 0, 0)) continue;  // replaced by the trace row
          auto add = [&](int ii, int kk2, int nn, int mm, double coeff) {
            if (nn < 0 || mm < 0 || nn > N || mm > N) return;
            A(row, id(ii, kk2, nn, mm)) += coeff;
          };
          if (i == 1) add(2, kk, n - 1, m, g * std::sqrt(static_cast<double>(n)));
          if (i == 2) add(1, kk, n + 1, m, -g * std::sqrt(n + 1.0));
          if (kk == 2) add(i, 1, n, m + 1, -g * std::sqrt(m + 1.0));
          if (kk == 1) add(i, 2, n, m - 1, g * std::sqrt(static_cast<double>(m)));
          add(i, kk, n + 1, m + 1, k * std::sqrt((n + 1.0) * (m + 1.0)));
          add(i, kk, n, m, -0.5 * k * (n + m));
          if (i == 1 && kk == 1) add(2, 2, n, m, y);
          add(i, kk, n, m, -0.5 * y * ((i == 2) + (kk == 2)));
          if (i == 2 && kk == 2) add(1, 1, n, m, G);
          add(i, kk, n, m, -0.5 * G * ((i == 1) + (kk == 1)));
        }
  for (int n = 0; n <= N; ++n) {
    A(id(1, 1, 0, 0), id(1, 1, n, n)) += 1.0;
    A(id(1, 1, 0, 0), id(2, 2, n, n)) += 1.0;
  }
  rhs[id(1, 1, 0, 0)] = 1.0;

  detail::dense_lu_solve(A, rhs);

  SteadyState st;
  st.cutoff = N;
  st.rates = rates;
  st.rho11 = CMatrix(nb);
  st.rho22 = CMatrix(nb);
  st.rho12 = CMatrix(nb);
  for (int n = 0; n <= N; ++n)
    for (int m = 0; m <= N; ++m) {
      st.rho11(n, m) = rhs[id(1, 1, n, m)];
      st.rho22(n, m) = rhs[id(2, 2, n, m)];
      st.rho12(n, m) = rhs[id(1, 2, n, m)];
    }
  st.residual_norm = detail::liouvillian_residual(rates, st);
  const auto pops = st.populations();
  st.tail_mass = 0.0;
  for (int n = std::max(0, N - 2); n <= N; ++n) st.tail_mass += pops[n];
  return st;
}

// Off-diagonal (in the excitation-phase sense) content of a dense solution;
// the reduced solver assumes this is zero.
inline double off_sector_norm(const SteadyState& st) {
  double s = 0.0;
  for (int n = 0; n <= st.cutoff; ++n)
    for (int m = 0; m <= st.cutoff; ++m) {
      if (n != m) s = std::max({s, std::abs(st.rho11(n, m)), std::abs(st.rho22(n, m))});
      if (n != m + 1) s = std::max(s, std::abs(st.rho12(n, m)));
    }
  return s;
}

// ---------------------------------------------------------------------------
// Reconstruction and validation.
// ---------------------------------------------------------------------------

// Phase-averaged Husimi profile Q(I) = (1/pi) e^{-I} sum_n p_n I^n / n!;
// normalized automatically because the populations sum to one.
inline QProfile q_from_state(const SteadyState& st) {
  QProfile p;
  p.kind = ProfileKind::oracle;
  p.params = reduce(st.rates);
  auto pops = std::make_shared<std::vector<double>>(st.populations());
  p.shape = OracleShape{pops};
  p.norm = 1.0;

  double mean = 0.0, m2 = 0.0;
  for (std::size_t n = 0; n < pops->size(); ++n) {
    mean += static_cast<double>(n) * (*pops)[n];
    m2 += static_cast<double>(n) * static_cast<double>(n) * (*pops)[n];
  }
  const double width = std::sqrt(std::max(m2 - mean * mean, 0.0) + mean + 1.0);
  p.I_max = detail::extend_cutoff(p, st.cutoff + 10.0 * std::sqrt(st.cutoff + 1.0) + 10.0);
  p = normalize(std::move(p));
  detail::sample_grid(p, mean + 1.0, width);
  return p;
}

// Exact field moments from the populations.
inline FieldMoments moments_exact(const SteadyState& st) {
  const auto pops = st.populations();
  double n1 = 0.0, n2 = 0.0;
  for (std::size_t n = 0; n < pops.size(); ++n) {
    n1 += static_cast<double>(n) * pops[n];
    n2 += static_cast<double>(n) * static_cast<double>(n) * pops[n];
  }
  FieldMoments m;
  m.mean_photon = n1;
  m.mean_I_Q = n1 + 1.0;
  m.second_moment_I_Q = n2 + 3.0 * n1 + 2.0;
  if (n1 >= 1e-12) m.mandel_Qf = (n2 - n1 * n1) / n1 - 1.0;
  return m;
}

// Phase-averaged coherence rho_12(I); with the phase convention of the
// averaged distributions it picks up the one-off-diagonal Fock elements.
inline std::complex<double> coherence_12(const SteadyState& st, double I) {
  if (I < 0.0) throw domain_error("coherence_12: negative intensity");
  if (I == 0.0) return 0.0;
  std::complex<double> s = 0.0;
  const double lnI = std::log(I);
  for (int n = 1; n <= st.cutoff; ++n) {
    const double lw = (n - 0.5) * lnI - I -
                      0.5 * (std::lgamma(n + 1.0) + std::lgamma(static_cast<double>(n)));
    s += st.rho12(n, n - 1) * std::exp(lw);
  }
  return s / M_PI;
}

// rho_Sigma(I) = rho_21(I) + rho_12(I) = 2 Re rho_12(I).
inline double coherence_sum(const SteadyState& st, double I) {
  return 2.0 * coherence_12(st, I).real();
}

struct CoherenceProfile {
  std::vector<double> grid_I, rho_sigma;
  double max_imag_ratio = 0.0;  // |Im rho_12| relative to the profile peak
};

inline CoherenceProfile coherence_profile(const SteadyState& st, const QProfile& q) {
  CoherenceProfile cp;
  cp.grid_I = q.grid_I;
  cp.rho_sigma.resize(cp.grid_I.size());
  double peak = 0.0, imax = 0.0;
  for (std::size_t i = 0; i < cp.grid_I.size(); ++i) {
    const std::complex<double> r12 = coherence_12(st, cp.grid_I[i]);
    cp.rho_sigma[i] = 2.0 * r12.real();
    peak = std::max(peak, std::abs(cp.rho_sigma[i]));
    imax = std::max(imax, std::abs(r12.imag()));
  }
  cp.max_imag_ratio = (peak > 0.0) ? imax / peak : imax;
  return cp;
}

inline CoherenceProfile coherence_profile(const SteadyState& st) {
  return coherence_profile(st, q_from_state(st));
}

// Continuity identity: rho_Sigma(I) = (kappa/g) sqrt(I) [Q(I) + Q'(I)].
// Returns the maximal deviation relative to the coherence peak.
inline double continuity_residual(const SteadyState& st, const QProfile& q) {
  const double ratio = st.rates.cavity_loss / st.rates.coupling;
  double peak = 0.0, dev = 0.0;
  for (double I : q.grid_I) {
    const double lhs = coherence_sum(st, I);
    const double rhs = ratio * std::sqrt(I) * (q(I) + q.derivative(I, 1));
    peak = std::max(peak, std::abs(lhs));
    dev = std::max(dev, std::abs(lhs - rhs));
  }
  if (!(peak > 0.0)) return dev;
  return dev / peak;
}

inline double continuity_residual(const SteadyState& st) {
  return continuity_residual(st, q_from_state(st));
}

struct OdeResidual {
  std::vector<double> grid_I, relative;
  double max_relative = 0.0;
};

// Residual of the fifth-order ODE sum_nu f_nu(I) Q^{(nu)}(I) on the oracle
// profile, relative to the sum of term magnitudes, over the grid where Q is
// at least 1e-12 of its peak.
inline OdeResidual ode_residual(const QProfile& q, const CoeffTable& table) {
  const PolySet polys = polynomials(table);
  double qpeak = 0.0;
  for (double v : q.grid_Q) qpeak = std::max(qpeak, v);

  OdeResidual out;
  for (double I : q.grid_I) {
    if (q(I) < 1e-12 * qpeak) continue;
    double r = 0.0, denom = 0.0;
    for (int nu = 0; nu <= 5; ++nu) {
      const double term = polys.eval(nu, I) * q.derivative(I, nu);
      r += term;
      denom += std::abs(term);
    }
    out.grid_I.push_back(I);
    const double rel = (denom > 0.0) ? std::abs(r) / denom : 0.0;
    out.relative.push_back(rel);
    out.max_relative = std::max(out.max_relative, rel);
  }
  return out;
}

inline OdeResidual ode_residual(const SteadyState& st, const CoeffTable& table) {
  return ode_residual(q_from_state(st), table);
}

}  // namespace salq
