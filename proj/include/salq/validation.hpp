#pragma once

// Bundled invariant suite behind the `validate` subcommand: the continuity
// identity, the fifth-order ODE residual, normalization, moment identities
// and root sign checks, each with its declared tolerance.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "salq/coeffs.hpp"
#include "salq/linear_theory.hpp"
#include "salq/oracle.hpp"
#include "salq/params.hpp"
#include "salq/qsolution.hpp"

namespace salq {

namespace detail {
inline std::string fmt_point(double r, double I_s, double c) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%g,Is=%g,c=%g", r, I_s, c);
  return buf;
}
}  // namespace detail

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;      // measured
  double threshold = 0.0;  // declared bound
  std::string note;
};

struct ValidationReport {
  std::vector<Check> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

struct ValidationOptions {
  // Test hook: multiply one coefficient of the ODE table before the residual
  // checks. A 1% mutation of any b_ik must trip the residual bound.
  std::string mutate_coeff;
  double mutate_factor = 1.0;
};

namespace detail {

inline void check_le(ValidationReport& rep, const std::string& name, double value,
                     double threshold, const std::string& note = "") {
  rep.checks.push_back({name, value <= threshold, value, threshold, note});
}

}  // namespace detail

inline ValidationReport run_validation(const ValidationOptions& opts = {}) {
  ValidationReport rep;

  struct Point {
    double r, I_s, c;
    int N;
  };

  // Continuity identity at three desk-scale points.
  for (const Point& pt : {Point{3.0, 2.0, 40.0, 80}, Point{9.0, 40.0, 20.0, 160},
                          Point{20.0, 1.0, 100.0, 60}}) {
    const RateSet rates = from_dimensionless(pt.r, pt.I_s, pt.c);
    const SteadyState st = steady_state(rates, pt.N);
    const QProfile q = q_from_state(st);
    detail::check_le(rep,
                     "continuity(r=" + detail::fmt_point(pt.r, pt.I_s, pt.c) + ")",
                     continuity_residual(st, q), 1e-6);
  }

  // ODE residual (optionally with a mutated coefficient table).
  for (const Point& pt : {Point{3.0, 2.0, 40.0, 80}, Point{1.0, 1.0, 10.0, 40}}) {
    const RateSet rates = from_dimensionless(pt.r, pt.I_s, pt.c);
    const SteadyState st = steady_state(rates, pt.N);
    CoeffTable table = coefficients(reduce(rates));
    std::string note;
    if (!opts.mutate_coeff.empty()) {
      table.by_name(opts.mutate_coeff) *= opts.mutate_factor;
      note = "mutated " + opts.mutate_coeff;
    }
    const QProfile q = q_from_state(st);
    detail::check_le(rep, "ode_residual(r=" + detail::fmt_point(pt.r, pt.I_s, pt.c) + ")",
                     ode_residual(q, table).max_relative, 1e-6, note);
  }

  // Normalization of oracle and generating profiles.
  {
    const RateSet rates = from_dimensionless(3.0, 2.0, 40.0);
    const QProfile q = q_from_state(steady_state(rates, 80));
    QuadratureOptions qo;
    const double mass = M_PI * integrate([&](double I) { return q(I); }, 0.0, q.I_max, qo).value;
    detail::check_le(rep, "normalization(oracle)", std::abs(mass - 1.0), 1e-8);
  }
  {
    const ReducedParams p = params_from_triple(20.0, 95.95, 100.0);
    const CoeffTable table = coefficients(p);
    const RootCatalog cat = roots(polynomials(table), table);
    const QProfile q = q_generating(p, cat, table);
    QuadratureOptions qo;
    qo.singular_points = q.singular_points();
    const double mass = M_PI * integrate([&](double I) { return q(I); }, 0.0, q.I_max, qo).value;
    detail::check_le(rep, "normalization(generating)", std::abs(mass - 1.0), 1e-8);
    double qmin = 0.0;
    for (double v : q.grid_Q) qmin = std::min(qmin, v);
    detail::check_le(rep, "nonnegativity(generating)", -qmin, 1e-15);

    // factorization round-trip of f1 and f0
    double worst = 0.0;
    const double s1 = std::max({std::abs(table.b40), std::abs(table.b41), std::abs(table.b42)});
    const double q1c1 = -table.b42 * (cat.I_minus4() + cat.I_plus4());
    const double q1c0 = table.b42 * cat.I_minus4() * cat.I_plus4();
    worst = std::max(worst, std::abs(q1c1 - table.b41) /
                                (s1 * std::max(1.0, std::abs(cat.I_plus4()))));
    worst = std::max(worst, std::abs(q1c0 - table.b40) /
                                (s1 * std::max(1.0, cat.I_plus4() * cat.I_plus4())));
    const double s0 = std::max({std::abs(table.b50), std::abs(table.b51), std::abs(table.b52)});
    const double q0c1 = -table.b52 * (cat.I_minus5() + cat.I_plus5());
    const double q0c0 = table.b52 * cat.I_minus5() * cat.I_plus5();
    worst = std::max(worst, std::abs(q0c1 - table.b51) /
                                (s0 * std::max(1.0, std::abs(cat.I_plus5()))));
    worst = std::max(worst, std::abs(q0c0 - table.b50) /
                                (s0 * std::max(1.0, cat.I_plus5() * cat.I_plus5())));
    detail::check_le(rep, "factorization_roundtrip", worst, 1e-10);

    // root signs and the I_-5 ~ I0 identification
    const double I0 = classical_intensity(20.0, 95.95, 100.0);
    rep.checks.push_back({"root_signs", cat.I_minus4() < 0.0 && cat.I_plus4() > 0.0,
                          cat.I_minus4(), 0.0, "I_-4 < 0 < I_+4"});
    detail::check_le(rep, "I_minus5_vs_I0", std::abs(cat.I_minus5() - I0) / I0, 0.01);
  }

  // Antinormal moment identities against density-matrix traces.
  {
    const RateSet rates = from_dimensionless(3.0, 2.0, 40.0);
    const SteadyState st = steady_state(rates, 80);
    const QProfile q = q_from_state(st);
    const FieldMoments quad = moments(q);
    const FieldMoments tr = moments_exact(st);
    detail::check_le(rep, "moment_identity_first",
                     std::abs(quad.mean_I_Q - tr.mean_I_Q) / tr.mean_I_Q, 1e-6);
    detail::check_le(rep, "moment_identity_second",
                     std::abs(quad.second_moment_I_Q - tr.second_moment_I_Q) /
                         tr.second_moment_I_Q,
                     1e-6);
  }

  // Steady-state structural bounds.
  {
    const RateSet rates = from_dimensionless(3.0, 2.0, 40.0);
    const SteadyState st = steady_state(rates, 80);
    const auto pops = st.populations();
    double trace = 0.0, minpop = 0.0;
    for (double p : pops) {
      trace += p;
      minpop = std::min(minpop, p);
    }
    detail::check_le(rep, "trace", std::abs(trace - 1.0), 1e-10);
    detail::check_le(rep, "positivity", -minpop, 1e-12);
    detail::check_le(rep, "tail_mass", st.tail_mass, 1e-8);
    const double scale = rates.pump + rates.decay + rates.cavity_loss + rates.coupling;
    detail::check_le(rep, "stationarity", st.residual_norm, 1e-10 * scale);
  }

  return rep;
}

}  // namespace salq
