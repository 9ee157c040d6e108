#pragma once

// Asymptotic phase-averaged Q profiles: the generating solution of the
// first-order reduction, the low-pump thermal exponential, the Gaussian
// approximation near the intensity maximum, plus normalization and photon
// statistics extracted from Q moments.

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "salq/coeffs.hpp"
#include "salq/errors.hpp"
#include "salq/linear_theory.hpp"
#include "salq/numerics.hpp"
#include "salq/params.hpp"

namespace salq {

enum class ProfileKind { generating, thermal, gaussian, oracle };

inline const char* to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::generating: return "generating";
    case ProfileKind::thermal: return "thermal";
    case ProfileKind::gaussian: return "gaussian";
    case ProfileKind::oracle: return "oracle";
  }
  return "?";
}

// ln shape = e1 ln(1 - I/I_m4) + e2 ln|1 - I/I_p4| - slope I - log_offset.
// The offset pins the peak near exp(0) so the shape never overflows.
struct GeneratingShape {
  double e1 = 0.0, e2 = 0.0, slope = 0.0;
  double I_m4 = 0.0, I_p4 = 0.0;
  double log_offset = 0.0;
};

struct ThermalShape {
  double a = -1.0;  // Q ~ exp(I/a), a < 0
};

struct GaussianShape {
  double center = 0.0, sigma2 = 1.0;
};

struct OracleShape {
  std::shared_ptr<const std::vector<double>> populations;  // p_n, trace 1
};

struct FieldMoments {
  double mean_photon = 0.0;        // <n>
  double mean_I_Q = 0.0;           // pi int I Q dI   = <a a^+>
  double second_moment_I_Q = 0.0;  // pi int I^2 Q dI = <a^2 a^+^2>
  std::optional<double> mandel_Qf; // empty for vacuum-adjacent states
};

struct QProfile {
  ProfileKind kind = ProfileKind::thermal;
  ReducedParams params;
  double I_max = 0.0;
  double norm = 1.0;  // N0
  bool normalized = false;
  std::variant<GeneratingShape, ThermalShape, GaussianShape, OracleShape> shape;
  std::vector<double> grid_I, grid_Q;
  std::vector<std::string> warnings;

  double unnorm(double I) const {
    if (const auto* g = std::get_if<GeneratingShape>(&shape)) {
      const double ln = g->e1 * std::log1p(-I / g->I_m4) +
                        g->e2 * std::log(std::abs(1.0 - I / g->I_p4)) -
                        g->slope * I - g->log_offset;
      return std::exp(ln);
    }
    if (const auto* t = std::get_if<ThermalShape>(&shape)) return std::exp(I / t->a);
    if (const auto* n = std::get_if<GaussianShape>(&shape)) {
      const double d = I - n->center;
      return std::exp(-0.5 * d * d / n->sigma2);
    }
    const auto& o = std::get<OracleShape>(shape);
    return poisson_sum(*o.populations, I) / M_PI;
  }

  double operator()(double I) const { return norm * unnorm(I); }

  // d ln Q0 / dI of the generating form (analytic).
  double log_derivative(double I) const {
    const auto* g = std::get_if<GeneratingShape>(&shape);
    if (!g) throw domain_error("QProfile::log_derivative: generating profiles only");
    return g->e1 / (I - g->I_m4) + g->e2 / (I - g->I_p4) - g->slope;
  }

  // d^k Q / dI^k; analytic for oracle-backed profiles.
  double derivative(double I, int order) const {
    const auto* o = std::get_if<OracleShape>(&shape);
    if (!o) throw domain_error("QProfile::derivative: oracle profiles only");
    return norm * poisson_sum(*o->populations, I, order) / M_PI;
  }

  std::vector<double> singular_points() const {
    if (const auto* g = std::get_if<GeneratingShape>(&shape))
      if (g->I_p4 > 0.0) return {g->I_p4};
    return {};
  }
};

namespace detail {

inline QuadratureOptions profile_quad_options(const QProfile& p) {
  QuadratureOptions opts;
  opts.singular_points = p.singular_points();
  return opts;
}

// Fills the exported sample grid: uniform cover plus refinement around the
// peak and the branch point of the generating form.
inline void sample_grid(QProfile& p, double peak, double width) {
  std::vector<double> gi;
  const int n_uniform = 1000;
  for (int i = 0; i <= n_uniform; ++i)
    gi.push_back(p.I_max * static_cast<double>(i) / n_uniform);
  if (width > 0.0 && width < p.I_max) {
    const double lo = std::max(0.0, peak - 6.0 * width);
    const double hi = std::min(p.I_max, peak + 6.0 * width);
    for (int i = 0; i <= 240; ++i) gi.push_back(lo + (hi - lo) * i / 240.0);
  }
  if (const auto* g = std::get_if<GeneratingShape>(&p.shape)) {
    if (g->I_p4 > 0.0 && g->I_p4 < p.I_max) {
      for (int k = 2; k <= 9; ++k) {
        const double off = std::pow(10.0, -k) * std::max(1.0, std::abs(g->I_p4));
        gi.push_back(g->I_p4 - off);
        gi.push_back(g->I_p4 + off);
      }
    }
  }
  std::sort(gi.begin(), gi.end());
  gi.erase(std::unique(gi.begin(), gi.end()), gi.end());
  std::erase_if(gi, [&](double x) { return x < 0.0 || x > p.I_max; });
  p.grid_I = std::move(gi);
  p.grid_Q.resize(p.grid_I.size());
  for (std::size_t i = 0; i < p.grid_I.size(); ++i) p.grid_Q[i] = p(p.grid_I[i]);
}

// Extends I_max geometrically until the remaining tail is negligible
// relative to the accumulated mass.
inline double extend_cutoff(const QProfile& p, double I_hi) {
  QuadratureOptions opts = profile_quad_options(p);
  opts.abs_tol = 0.0;
  opts.rel_tol = 1e-12;
  double total = integrate([&](double I) { return p.unnorm(I); }, 0.0, I_hi, opts).value;
  if (!(total > 0.0)) throw integration_error("profile has no positive mass");
  for (int it = 0; it < 60; ++it) {
    const double piece =
        integrate([&](double I) { return p.unnorm(I); }, I_hi, 2.0 * I_hi, opts).value;
    if (piece <= 1e-10 * total) return I_hi;
    total += piece;
    I_hi *= 2.0;
  }
  throw integration_error("profile tail does not decay");
}

}  // namespace detail

// Fixes N0 so that pi * int_0^{I_max} Q dI = 1. Idempotent.
inline QProfile normalize(QProfile profile) {
  QuadratureOptions opts = detail::profile_quad_options(profile);
  const double total =
      M_PI * integrate([&](double I) { return profile(I); }, 0.0, profile.I_max, opts).value;
  if (!(total > 0.0) || !std::isfinite(total))
    throw integration_error("normalize: profile has no positive integrable mass");
  profile.norm /= total;
  for (double& q : profile.grid_Q) q /= total;
  profile.normalized = true;
  return profile;
}

inline FieldMoments moments(const QProfile& profile) {
  if (!profile.normalized) throw domain_error("moments: profile not normalized");
  QuadratureOptions opts = detail::profile_quad_options(profile);
  FieldMoments m;
  m.mean_I_Q =
      M_PI * integrate([&](double I) { return I * profile(I); }, 0.0, profile.I_max, opts).value;
  m.second_moment_I_Q =
      M_PI *
      integrate([&](double I) { return I * I * profile(I); }, 0.0, profile.I_max, opts).value;
  m.mean_photon = m.mean_I_Q - 1.0;
  if (m.mean_I_Q > 1.0 + 1e-12) {
    const double M1 = m.mean_I_Q, M2 = m.second_moment_I_Q;
    m.mandel_Qf = (M2 - M1 * M1 - M1) / (M1 - 1.0) - 1.0;
  }
  return m;
}

// Generating solution of the first-order reduction
//   f1(I) Q' + f0(I) Q = 0,
// written with the factored roots of f1, f0 and the modulus convention for
// the branch factor beyond I_+4.
inline QProfile q_generating(const ReducedParams& params, const RootCatalog& cat,
                             const CoeffTable& table) {
  if (!(table.b42 > 0.0))
    throw regime_error("q_generating: b42 <= 0, outside asymptotic regime");
  if (!cat.f1.real || !cat.f0.real)
    throw regime_error("q_generating: complex roots of f1/f0, no generating solution");

  const double Im4 = cat.I_minus4(), Ip4 = cat.I_plus4();
  const double Im5 = cat.I_minus5(), Ip5 = cat.I_plus5();
  if (!(Im4 < 0.0))
    throw regime_error("q_generating: I_-4 not negative, outside asymptotic regime");

  GeneratingShape sh;
  sh.slope = table.b52 / table.b42;
  sh.I_m4 = Im4;
  sh.I_p4 = Ip4;
  sh.e1 = -sh.slope * (Im4 - Im5) * (Im4 - Ip5) / (Im4 - Ip4);
  sh.e2 = sh.slope * (Ip4 - Im5) * (Ip4 - Ip5) / (Im4 - Ip4);
  if (sh.e2 <= -1.0)
    throw regime_error("q_generating: branch exponent <= -1, profile not normalizable");

  QProfile p;
  p.kind = ProfileKind::generating;
  p.params = params;
  p.shape = sh;

  const double cIs = params.c * params.I_s;
  if (cIs < 50.0)
    p.warnings.push_back("c*I_s = " + std::to_string(cIs) +
                         " below 50: asymptotic solution may be inaccurate");

  // Stationary points of ln Q are the roots of f0; the physical peak is
  // I_-5 when positive, else the boundary I = 0.
  const double peak = std::max(Im5, 0.0);
  auto& gs = std::get<GeneratingShape>(p.shape);
  gs.log_offset = gs.e1 * std::log1p(-peak / gs.I_m4) +
                  gs.e2 * std::log(std::abs(1.0 - peak / gs.I_p4)) - gs.slope * peak;

  // Local width from the log-curvature at the peak.
  const double h = std::max(1e-3, 1e-4 * std::max(1.0, peak));
  const double curv =
      (p.log_derivative(peak + h) - p.log_derivative(std::max(peak - h, 0.0))) /
      (peak + h - std::max(peak - h, 0.0));
  const double width = (curv < 0.0) ? 1.0 / std::sqrt(-curv) : 1.0;

  double I_hi = peak + 8.0 * width;
  for (int it = 0; it < 200; ++it) {
    const double ln =
        gs.e1 * std::log1p(-I_hi / gs.I_m4) +
        gs.e2 * std::log(std::abs(1.0 - I_hi / gs.I_p4)) - gs.slope * I_hi - gs.log_offset;
    if (ln < std::log(1e-14)) break;
    I_hi += 4.0 * width;
  }
  if (Ip4 > 0.0) I_hi = std::max(I_hi, 1.02 * Ip4 + 5.0 * width);
  if (Ip5 > 0.0) I_hi = std::max(I_hi, 1.02 * Ip5 + 5.0 * width);
  p.I_max = detail::extend_cutoff(p, I_hi);

  p = normalize(std::move(p));
  detail::sample_grid(p, peak, width);
  return p;
}

// Thermal exponential Q_1(I) = N0 exp(I/a); mean photon number -(a+1).
inline QProfile q_thermal(const ReducedParams& params, double a) {
  if (!(a < 0.0))
    throw root_selection_error("q_thermal: exponent a must be negative");
  QProfile p;
  p.kind = ProfileKind::thermal;
  p.params = params;
  p.shape = ThermalShape{a};
  p.I_max = detail::extend_cutoff(p, 40.0 * std::abs(a) + 10.0);
  p = normalize(std::move(p));
  detail::sample_grid(p, 0.0, std::abs(a));
  return p;
}

// Gaussian approximation around the classical intensity, truncated at I = 0;
// sigma^2 = 1 + I0 (2 + Qf_lin).
inline QProfile q_gaussian(const ReducedParams& params, const LinearTheoryResult& lin) {
  if (!lin.valid)
    throw regime_error("q_gaussian: linear theory invalid at these parameters");
  QProfile p;
  p.kind = ProfileKind::gaussian;
  p.params = params;
  GaussianShape sh;
  sh.center = lin.I0;
  sh.sigma2 = 1.0 + lin.I0 * (2.0 + lin.Qf_lin);
  if (!(sh.sigma2 > 0.0))
    throw regime_error("q_gaussian: non-positive variance");
  p.shape = sh;
  if (params.I_s < 10.0)
    p.warnings.push_back("I_s = " + std::to_string(params.I_s) +
                         " below 10: Gaussian approximation may be inaccurate");
  const double sigma = std::sqrt(sh.sigma2);
  p.I_max = detail::extend_cutoff(p, sh.center + 10.0 * sigma);
  p = normalize(std::move(p));
  detail::sample_grid(p, sh.center, sigma);
  return p;
}

// Branch policy: the generating solution loses meaning well below threshold.
inline ProfileKind select_solution(const ReducedParams& params, double theta = 0.5) {
  params.validate();
  if (!(params.c > 8.0)) return ProfileKind::thermal;
  const Thresholds t = thresholds(params.c);
  return (params.r < theta * t.r_th) ? ProfileKind::thermal : ProfileKind::generating;
}

// Convenience: build the asymptotic profile of the requested kind from the
// dimensionless parameters alone.
inline QProfile solve_profile(const ReducedParams& params, ProfileKind kind) {
  const CoeffTable table = coefficients(params);
  const PolySet polys = polynomials(table);
  switch (kind) {
    case ProfileKind::generating: {
      const RootCatalog cat = roots(polys, table);
      return q_generating(params, cat, table);
    }
    case ProfileKind::thermal: {
      const RootCatalog cat = roots(polys, table);
      return q_thermal(params, cat.thermal_root());
    }
    case ProfileKind::gaussian:
      return q_gaussian(params, linear_result(params.r, params.I_s, params.c));
    case ProfileKind::oracle:
      throw domain_error("solve_profile: oracle profiles come from steady states");
  }
  throw domain_error("solve_profile: bad kind");
}

}  // namespace salq
