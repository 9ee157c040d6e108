#pragma once

// Shared numerical kernels: real roots of low-degree polynomials, adaptive
// Gauss-Kronrod quadrature with integrable-endpoint handling, and log-domain
// evaluation of Poisson kernel sums e^{-I} I^n / n! and their derivatives.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "salq/errors.hpp"

namespace salq {

// ---------------------------------------------------------------------------
// Real roots of polynomials of degree <= 3, ascending coefficients.
// ---------------------------------------------------------------------------

struct RealRoots {
  std::array<double, 3> value{};         // sorted ascending, first `count` valid
  std::array<int, 3> multiplicity{};
  int count = 0;                         // number of distinct real roots
  bool has_complex_pair = false;
  std::complex<double> complex_root{};   // member of the conjugate pair, Im >= 0
};

namespace detail {

inline double eval_poly(std::span<const double> c, double x) {
  double v = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
  return v;
}

inline double eval_poly_deriv(std::span<const double> c, double x) {
  double v = 0.0;
  for (std::size_t i = c.size(); i-- > 1;) v = v * x + c[i] * static_cast<double>(i);
  return v;
}

// A couple of Newton steps on a simple root; bails out if not improving.
inline double polish_root(std::span<const double> c, double x) {
  for (int it = 0; it < 3; ++it) {
    const double f = eval_poly(c, x);
    const double df = eval_poly_deriv(c, x);
    if (df == 0.0) break;
    const double step = f / df;
    if (!std::isfinite(step)) break;
    const double xn = x - step;
    if (std::abs(eval_poly(c, xn)) >= std::abs(f)) break;
    x = xn;
  }
  return x;
}

inline void sort_roots(RealRoots& r) {
  std::array<std::pair<double, int>, 3> tmp;
  for (int i = 0; i < r.count; ++i) tmp[i] = {r.value[i], r.multiplicity[i]};
  std::sort(tmp.begin(), tmp.begin() + r.count);
  for (int i = 0; i < r.count; ++i) {
    r.value[i] = tmp[i].first;
    r.multiplicity[i] = tmp[i].second;
  }
}

inline RealRoots solve_linear(double c0, double c1) {
  RealRoots r;
  r.count = 1;
  r.value[0] = -c0 / c1;
  r.multiplicity[0] = 1;
  return r;
}

inline RealRoots solve_quadratic(double c0, double c1, double c2) {
  RealRoots r;
  const double disc = c1 * c1 - 4.0 * c2 * c0;
  const double scale = c1 * c1 + std::abs(4.0 * c2 * c0);
  if (disc < -1e-12 * scale) {
    r.has_complex_pair = true;
    r.complex_root = {-c1 / (2.0 * c2), std::sqrt(-disc) / (2.0 * std::abs(c2))};
    return r;
  }
  if (disc <= 1e-12 * scale) {  // double root, cancellation regime
    r.count = 1;
    r.value[0] = -c1 / (2.0 * c2);
    r.multiplicity[0] = 2;
    return r;
  }
  // Citardauq-stable split: avoid subtracting nearly equal quantities.
  const double s = std::sqrt(disc);
  const double q = -0.5 * (c1 + std::copysign(s, c1));
  double x0, x1;
  if (q != 0.0) {
    x0 = q / c2;
    x1 = c0 / q;
  } else {  // c1 == 0
    x0 = s / (2.0 * c2);
    x1 = -x0;
  }
  r.count = 2;
  r.value[0] = std::min(x0, x1);
  r.value[1] = std::max(x0, x1);
  r.multiplicity[0] = r.multiplicity[1] = 1;
  return r;
}

// Monic depressed-cubic solve, x^3 + a x^2 + b x + c.
// See e.g. Numerical Recipes sec. 5.6.
inline RealRoots solve_cubic_monic(double a, double b, double c) {
  RealRoots r;
  const double Q = (a * a - 3.0 * b) / 9.0;
  const double R = (a * (2.0 * a * a - 9.0 * b) + 27.0 * c) / 54.0;
  const double R2 = R * R;
  const double Q3 = Q * Q * Q;
  const double scale = R2 + std::abs(Q3);

  const std::array<double, 4> coeff{c, b, a, 1.0};
  if (std::abs(R2 - Q3) <= 1e-12 * scale) {
    // Vanishing discriminant: multiple roots.
    if (std::abs(Q) <= 1e-14 * std::max(1.0, a * a)) {
      r.count = 1;
      r.value[0] = -a / 3.0;
      r.multiplicity[0] = 3;
      return r;
    }
    const double sq = std::sqrt(std::max(Q, 0.0));
    const double sgn = (R >= 0.0) ? 1.0 : -1.0;
    r.count = 2;
    r.value[0] = -2.0 * sgn * sq - a / 3.0;
    r.multiplicity[0] = 1;
    r.value[1] = sgn * sq - a / 3.0;
    r.multiplicity[1] = 2;
    r.value[0] = polish_root(coeff, r.value[0]);
    sort_roots(r);
    return r;
  }

  if (R2 < Q3) {
    // Three distinct real roots (trigonometric form).
    const double theta = std::acos(std::clamp(R / std::sqrt(Q3), -1.0, 1.0));
    const double m = -2.0 * std::sqrt(Q);
    r.count = 3;
    r.value[0] = m * std::cos(theta / 3.0) - a / 3.0;
    r.value[1] = m * std::cos((theta + 2.0 * M_PI) / 3.0) - a / 3.0;
    r.value[2] = m * std::cos((theta - 2.0 * M_PI) / 3.0) - a / 3.0;
    for (int i = 0; i < 3; ++i) {
      r.multiplicity[i] = 1;
      r.value[i] = polish_root(coeff, r.value[i]);
    }
    sort_roots(r);
    return r;
  }

  // One real root, one complex pair.
  const double A = -std::copysign(std::cbrt(std::abs(R) + std::sqrt(R2 - Q3)), R);
  const double B = (A != 0.0) ? Q / A : 0.0;
  r.count = 1;
  r.value[0] = polish_root(coeff, (A + B) - a / 3.0);
  r.multiplicity[0] = 1;
  r.has_complex_pair = true;
  r.complex_root = {-0.5 * (A + B) - a / 3.0, 0.5 * std::sqrt(3.0) * std::abs(A - B)};
  return r;
}

}  // namespace detail

// Roots of c[0] + c[1] x + ... + c[deg] x^deg, deg <= 3 after trimming
// negligible leading coefficients (|c| <= 1e-300).
inline RealRoots real_roots(std::span<const double> coeff) {
  if (coeff.size() > 4) throw domain_error("real_roots: degree > 3 unsupported");
  std::size_t deg = coeff.size();
  while (deg > 0 && std::abs(coeff[deg - 1]) <= 1e-300) --deg;
  if (deg == 0) throw domain_error("real_roots: zero polynomial");
  if (deg == 1) return {};  // nonzero constant: no roots
  if (deg == 2) return detail::solve_linear(coeff[0], coeff[1]);
  if (deg == 3) return detail::solve_quadratic(coeff[0], coeff[1], coeff[2]);
  return detail::solve_cubic_monic(coeff[2] / coeff[3], coeff[1] / coeff[3],
                                   coeff[0] / coeff[3]);
}

inline RealRoots real_roots(std::initializer_list<double> coeff) {
  return real_roots(std::span<const double>(coeff.begin(), coeff.size()));
}

// Expands a monic polynomial from roots (with multiplicities); used by the
// factorization round-trip checks.
inline std::vector<double> monic_from_roots(std::span<const double> roots) {
  std::vector<double> c{1.0};
  for (double rt : roots) {
    c.insert(c.begin(), 0.0);
    for (std::size_t i = 0; i + 1 < c.size(); ++i) c[i] -= rt * c[i + 1];
  }
  return c;
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod quadrature (G7,K15 panels).
// ---------------------------------------------------------------------------

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_panels = 200000;
  std::vector<double> singular_points;  // integrable singularities in (a,b)
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // conservative estimate
  int panels = 0;
};

namespace detail {

// QUADPACK dqk15 abscissae/weights on [-1,1].
inline constexpr std::array<double, 8> kKronrodX = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodW = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussW = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
inline void gk15(F&& f, double a, double b, double& value, double& err) {
  const double h = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  std::array<double, 15> fv;
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(mid - h * kKronrodX[i]);
    fv[14 - i] = f(mid + h * kKronrodX[i]);
  }
  fv[7] = f(mid);
  double k = kKronrodW[7] * fv[7];
  double g = kGaussW[3] * fv[7];
  for (int i = 0; i < 7; ++i) {
    k += kKronrodW[i] * (fv[i] + fv[14 - i]);
    if (i % 2 == 1) g += kGaussW[i / 2] * (fv[i] + fv[14 - i]);
  }
  value = k * h;
  err = std::abs((k - g) * h);
}

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

}  // namespace detail

template <class F>
QuadratureResult integrate(F&& f, double a, double b, QuadratureOptions opts = {}) {
  QuadratureResult res;
  if (!(a < b)) {
    if (a == b) return res;
    throw domain_error("integrate: inverted interval");
  }

  // Seed panels with splits at the flagged singular points. GK nodes are
  // interior, so the singularities themselves are never evaluated.
  std::vector<double> cuts{a};
  for (double s : opts.singular_points)
    if (s > a && s < b) cuts.push_back(s);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<detail::Panel> heap;
  double total = 0.0, toterr = 0.0;
  auto push = [&](double lo, double hi) {
    detail::Panel p{lo, hi, 0.0, 0.0};
    detail::gk15(f, lo, hi, p.value, p.error);
    if (!std::isfinite(p.value))
      throw integration_error("integrate: non-finite integrand");
    total += p.value;
    toterr += p.error;
    heap.push_back(p);
    std::push_heap(heap.begin(), heap.end());
  };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) push(cuts[i], cuts[i + 1]);

  while (toterr > std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) {
    if (static_cast<int>(heap.size()) >= opts.max_panels)
      throw integration_error("integrate: panel budget exhausted");
    std::pop_heap(heap.begin(), heap.end());
    detail::Panel worst = heap.back();
    heap.pop_back();
    total -= worst.value;
    toterr -= worst.error;
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b)
      throw integration_error("integrate: interval collapsed before converging");
    push(worst.a, mid);
    push(mid, worst.b);
  }
  res.value = total;
  res.error = toterr;
  res.panels = static_cast<int>(heap.size());
  return res;
}

// Semi-infinite integral of a decaying integrand: geometric extension until
// three consecutive blocks contribute below tolerance.
template <class F>
QuadratureResult integrate_to_infinity(F&& f, double a, QuadratureOptions opts = {}) {
  QuadratureResult total;
  double lo = a;
  double width = 1.0;
  int quiet = 0;
  for (int block = 0; block < 400; ++block) {
    QuadratureOptions o = opts;
    o.singular_points.clear();
    for (double s : opts.singular_points)
      if (s > lo && s < lo + width) o.singular_points.push_back(s);
    const QuadratureResult piece = integrate(f, lo, lo + width, o);
    total.value += piece.value;
    total.error += piece.error;
    total.panels += piece.panels;
    lo += width;
    width *= 2.0;
    const double tol = std::max(opts.abs_tol, opts.rel_tol * std::abs(total.value));
    quiet = (std::abs(piece.value) < 0.25 * tol) ? quiet + 1 : 0;
    if (quiet >= 3) return total;
  }
  throw integration_error("integrate_to_infinity: tail did not decay");
}

// ---------------------------------------------------------------------------
// Poisson kernels K_n(I) = e^{-I} I^n / n! in the log domain.
// ---------------------------------------------------------------------------

// ln K_n(I); safe for n, I up to ~1e6.
inline double log_poisson_kernel(std::int64_t n, double I) {
  if (n < 0) return -std::numeric_limits<double>::infinity();
  if (I < 0.0) throw domain_error("log_poisson_kernel: negative intensity");
  if (I == 0.0)
    return n == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return static_cast<double>(n) * std::log(I) - I -
         std::lgamma(static_cast<double>(n) + 1.0);
}

inline double poisson_kernel(std::int64_t n, double I) {
  return std::exp(log_poisson_kernel(n, I));
}

// Scratch table of K_m(I), m = 0..nmax.
inline void poisson_kernel_table(double I, std::size_t nmax, std::vector<double>& K) {
  K.resize(nmax + 1);
  for (std::size_t m = 0; m <= nmax; ++m)
    K[m] = poisson_kernel(static_cast<std::int64_t>(m), I);
}

// sum_n p[n] * d^k/dI^k [ e^{-I} I^n / n! ].
// The derivative follows from d/dI K_n = K_{n-1} - K_n, hence
// d^k K_n = sum_j (-1)^{k-j} C(k,j) K_{n-j}.
inline double poisson_sum(std::span<const double> p, double I, int order = 0) {
  if (order < 0 || order > 12) throw domain_error("poisson_sum: bad derivative order");
  if (p.empty()) return 0.0;
  static thread_local std::vector<double> K;
  poisson_kernel_table(I, p.size() - 1, K);

  double acc = 0.0;
  double binom = 1.0;
  for (int j = 0; j <= order; ++j) {
    // T_j = sum_m p[m+j] K_m
    double t = 0.0;
    for (std::size_t m = 0; m + j < p.size(); ++m) t += p[m + j] * K[m];
    const double sign = ((order - j) % 2 == 0) ? 1.0 : -1.0;
    acc += sign * binom * t;
    binom = binom * static_cast<double>(order - j) / static_cast<double>(j + 1);
  }
  return acc;
}

}  // namespace salq
