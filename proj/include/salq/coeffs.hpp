#pragma once

// Coefficient table b_ik(omega, eta, tau) of the fifth-order intensity ODE,
// the six polynomials f_nu(I) built from it, and their labeled real roots.

#include <array>
#include <complex>
#include <string>

#include "salq/errors.hpp"
#include "salq/numerics.hpp"
#include "salq/params.hpp"

namespace salq {

struct CoeffTable {
  double b02, b03;
  double b11, b12, b13;
  double b20, b21, b22, b23;
  double b30, b31, b32, b33;
  double b40, b41, b42;
  double b50, b51, b52;

  double& by_name(const std::string& name) {
    static constexpr const char* names[] = {"b02", "b03", "b11", "b12", "b13",
                                            "b20", "b21", "b22", "b23", "b30",
                                            "b31", "b32", "b33", "b40", "b41",
                                            "b42", "b50", "b51", "b52"};
    double* fields[] = {&b02, &b03, &b11, &b12, &b13, &b20, &b21, &b22, &b23, &b30,
                        &b31, &b32, &b33, &b40, &b41, &b42, &b50, &b51, &b52};
    for (std::size_t i = 0; i < std::size(names); ++i)
      if (name == names[i]) return *fields[i];
    throw domain_error("CoeffTable: unknown coefficient " + name);
  }

  static constexpr std::array<const char*, 19> names() {
    return {"b02", "b03", "b11", "b12", "b13", "b20", "b21", "b22", "b23", "b30",
            "b31", "b32", "b33", "b40", "b41", "b42", "b50", "b51", "b52"};
  }
};

inline CoeffTable coefficients(const ReducedParams& p) {
  p.validate();
  const double w = p.omega, e = p.eta, t = p.tau;
  const double t2 = t * t, t3 = t2 * t, t4 = t2 * t2;
  const double e2 = e * e, e3 = e2 * e;
  const double w2 = w * w, w3 = w2 * w;

  CoeffTable b{};
  b.b02 = -2.0 * t3 * (w + e + t);
  b.b03 = 4.0 * t4;

  b.b11 = -12.0 * t3 * (w + e + t);
  b.b12 = 2.0 * t3 * (7.0 * t - 3.0 * w - 3.0 * e);
  b.b13 = 12.0 * t4;

  b.b20 = -12.0 * t3 * (w + e + t);
  b.b21 = -t2 * (26.0 * e * t - 3.0 * e2 + 21.0 * t2 - 6.0 * e * w + 26.0 * t * w - 3.0 * w2);
  b.b22 = 12.0 * t3 * (4.0 * t - w - e);
  b.b23 = 12.0 * t4;

  b.b30 = -2.0 * t2 * (8.0 * e * t - 3.0 * e2 + 15.0 * t2 - 6.0 * e * w + 8.0 * t * w - 3.0 * w2);
  b.b31 = -2.0 * t * (e + t - 3.0 * e2 * t + 13.0 * e * t2 + w - 6.0 * e * t * w + 13.0 * t2 * w - 3.0 * t * w2);
  b.b32 = 2.0 * t2 * (2.0 - 7.0 * e * t + 23.0 * t2 - 7.0 * t * w);
  b.b33 = 4.0 * t4;

  b.b40 = -e3 * t + e2 * (8.0 * t2 - 1.0 - 3.0 * t * w) -
          t * (3.0 * t + 24.0 * t3 + 3.0 * w - t2 * w - 8.0 * t * w2 + w3) +
          e * (t3 - w + 16.0 * t2 * w - t * (4.0 + 3.0 * w2));
  b.b41 = t * (5.0 * e2 * t + 15.0 * t3 - 4.0 * w - 20.0 * t2 * w -
               2.0 * e * (1.0 + 10.0 * t2 - 5.0 * t * w) + t * (5.0 * w2 - 2.0));
  b.b42 = 2.0 * t2 * (4.0 - 3.0 * e * t + 7.0 * t2 - 3.0 * t * w);

  b.b50 = -e3 * t - 6.0 * t4 + 5.0 * t3 * w + w2 - t * w3 +
          e2 * (2.0 * t2 - 1.0 - 3.0 * t * w) +
          e * t * (5.0 * t2 - 4.0 + 4.0 * t * w - 3.0 * w2) + t2 * (2.0 * w2 - 3.0);
  b.b51 = 2.0 * t * (e2 * t + 3.0 * t3 - 2.0 * w - 4.0 * t2 * w + t * w2 +
                     2.0 * e * t * (w - 2.0 * t));
  b.b52 = 4.0 * t2;
  return b;
}

// Ascending coefficient arrays of f_0..f_5; f_nu multiplies Q^{(nu)}(I).
struct PolySet {
  std::array<std::array<double, 4>, 6> f{};

  double eval(int nu, double I) const {
    const auto& c = f[nu];
    return ((c[3] * I + c[2]) * I + c[1]) * I + c[0];
  }
};

inline PolySet polynomials(const CoeffTable& b) {
  PolySet p;
  p.f[0] = {b.b50, b.b51, b.b52, 0.0};
  p.f[1] = {b.b40, b.b41, b.b42, 0.0};
  p.f[2] = {b.b30, b.b31, b.b32, b.b33};
  p.f[3] = {b.b20, b.b21, b.b22, b.b23};
  p.f[4] = {0.0, b.b11, b.b12, b.b13};
  p.f[5] = {0.0, 0.0, b.b02, b.b03};
  return p;
}

// Coefficients of the low-intensity characteristic cubic
// b50 + b40 x + b30 x^2 + b20 x^3 (the constant terms of f_0..f_3).
inline std::array<double, 4> thermal_cubic(const CoeffTable& b) {
  return {b.b50, b.b40, b.b30, b.b20};
}

struct QuadRootPair {
  bool real = false;
  double lo = 0.0, hi = 0.0;               // valid when real
  std::complex<double> complex_root{};     // valid when !real
};

struct RootCatalog {
  QuadRootPair f1;        // I_-4 = f1.lo, I_+4 = f1.hi
  QuadRootPair f0;        // I_-5 = f0.lo, I_+5 = f0.hi
  double I_00 = 0.0;      // nonzero root of f_5
  QuadRootPair f4;        // I_11, I_12 (roots of f_4 / I)
  RealRoots f3;           // I_21, I_22, I_23
  RealRoots f2;           // I_31, I_32, I_33

  // Thermal branch data; only meaningful where the cubic has a unique
  // negative real root (inside the lasing window it typically has none).
  bool thermal_ok = false;
  std::string thermal_issue;
  double thermal_rate_raw = 0.0;  // negative real root lambda of the cubic
  double thermal_root_raw = 0.0;  // a = 1/lambda: Q_1(I) = N0 exp(I/a)

  double I_minus4() const { return f1.lo; }
  double I_plus4() const { return f1.hi; }
  double I_minus5() const { return f0.lo; }
  double I_plus5() const { return f0.hi; }

  double thermal_rate() const {
    if (!thermal_ok) throw root_selection_error("thermal root: " + thermal_issue);
    return thermal_rate_raw;
  }
  double thermal_root() const {
    if (!thermal_ok) throw root_selection_error("thermal root: " + thermal_issue);
    return thermal_root_raw;
  }
};

namespace detail {

inline QuadRootPair quad_pair(double c0, double c1, double c2) {
  QuadRootPair q;
  const RealRoots rr = real_roots({c0, c1, c2});
  if (rr.has_complex_pair) {
    q.real = false;
    q.complex_root = rr.complex_root;
  } else {
    q.real = true;
    q.lo = rr.value[0];
    q.hi = (rr.count == 2) ? rr.value[1] : rr.value[0];
  }
  return q;
}

}  // namespace detail

// Extracts and labels the real roots of the polynomial set. The -/+ subscripts
// of the quadratic roots map to (smaller, larger). The thermal exponent a is
// chosen so that exp(I/a) solves the constant-coefficient reduction of the
// ODE: the cubic root itself is the decay rate lambda, and a = 1/lambda.
inline RootCatalog roots(const PolySet& polys, const CoeffTable& table) {
  if (std::abs(table.b42) <= 1e-300 || std::abs(table.b52) <= 1e-300)
    throw regime_error("roots: degenerate regime, b42 or b52 vanishes");

  RootCatalog cat;
  cat.f1 = detail::quad_pair(polys.f[1][0], polys.f[1][1], polys.f[1][2]);
  cat.f0 = detail::quad_pair(polys.f[0][0], polys.f[0][1], polys.f[0][2]);
  cat.I_00 = -table.b02 / table.b03;
  cat.f4 = detail::quad_pair(table.b11, table.b12, table.b13);
  cat.f3 = real_roots(std::span<const double>(polys.f[3].data(), 4));
  cat.f2 = real_roots(std::span<const double>(polys.f[2].data(), 4));

  const auto cubic = thermal_cubic(table);
  const RealRoots tr = real_roots(std::span<const double>(cubic.data(), 4));
  int negatives = 0;
  double lambda = 0.0;
  for (int i = 0; i < tr.count; ++i)
    if (tr.value[i] < 0.0) {
      ++negatives;
      lambda = tr.value[i];
    }
  if (negatives == 1) {
    cat.thermal_ok = true;
    cat.thermal_rate_raw = lambda;
    cat.thermal_root_raw = 1.0 / lambda;
  } else {
    cat.thermal_issue = (negatives == 0) ? "cubic has no negative real root"
                                         : "cubic has several negative real roots";
  }
  return cat;
}

}  // namespace salq
