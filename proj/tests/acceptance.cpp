// Acceptance suite: one line per criterion, [PASS]/[FAIL] with the measured
// values. Criteria marked "documented" fail for reasons analyzed in the
// project notes (input rounding in the source table; first-order asymptotic
// error exceeding the chosen tolerance at the window edges).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "salq/oracle.hpp"
#include "salq/qsolution.hpp"
#include "salq/validation.hpp"

using namespace salq;

namespace {

struct Criterion {
  int id;
  std::string title;
  bool pass;
  std::string detail;
};

FieldMoments generating_moments(double r, double I_s, double c) {
  const ReducedParams p = params_from_triple(r, I_s, c);
  const CoeffTable table = coefficients(p);
  const RootCatalog cat = roots(polynomials(table), table);
  return moments(q_generating(p, cat, table));
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// 1. Table reproduction (fast).
Criterion c1() {
  const double qlin_ref[3] = {0.056, -0.040, -0.049};
  const double qf_ref[3] = {0.057, -0.039, -0.047};
  const double triples[3][3] = {
      {20.0, 95.95, 100.0}, {200.0, 8.83, 1000.0}, {2000.0, 0.87, 1e4}};
  bool pass = true;
  std::string detail;
  for (int k = 0; k < 3; ++k) {
    const double r = triples[k][0], I_s = triples[k][1], c = triples[k][2];
    const double qlin = mandel_lin(r, c);
    const FieldMoments m = generating_moments(r, I_s, c);
    const bool ok_qlin = std::abs(qlin - qlin_ref[k]) <= 0.001;
    const bool ok_n = std::abs(m.mean_photon - 700.1) <= 1.0;
    const bool ok_qf = std::abs(*m.mandel_Qf - qf_ref[k]) <= 0.003;
    pass = pass && ok_qlin && ok_n && ok_qf;
    detail += "col" + std::to_string(k + 1) + "[Qf_lin=" + fmt(qlin) +
              (ok_qlin ? "" : "!") + " n=" + fmt(m.mean_photon) + (ok_n ? "" : "!") +
              " Qf=" + fmt(*m.mandel_Qf) + (ok_qf ? "" : "!") + "] ";
  }
  if (!pass)
    detail += "(documented: the printed I_s=0.87 of column 3 is a truncation of "
              "0.875766, which reproduces n=700.1)";
  return {1, "table reproduction", pass, detail};
}

// 2. Asymptotic Mandel limit at r = c/5.
Criterion c2() {
  const double q = mandel_lin(1e8 / 5.0, 1e8);
  const bool pass = std::abs(q - (-0.05)) <= 1e-3;
  return {2, "Qf_lin -> -0.05 at r=c/5, c=1e8", pass, "Qf_lin=" + fmt(q)};
}

struct OraclePoint {
  SteadyState st;
  QProfile q;
  CoeffTable table;
};

OraclePoint solve_point(double r, double I_s, double c, int N) {
  const RateSet rates = from_dimensionless(r, I_s, c);
  OraclePoint pt{steady_state(rates, N), {}, coefficients(reduce(rates))};
  pt.q = q_from_state(pt.st);
  return pt;
}

// 3. ODE-of-record validation with mutation sensitivity.
Criterion c3() {
  OraclePoint a = solve_point(3.0, 2.0, 40.0, 80);
  OraclePoint b = solve_point(1.0, 1.0, 10.0, 40);
  const double res_a = ode_residual(a.q, a.table).max_relative;
  const double res_b = ode_residual(b.q, b.table).max_relative;
  bool pass = res_a <= 1e-6 && res_b <= 1e-6;
  double worst_mut = 1e300;
  std::string worst_name;
  for (const char* name : CoeffTable::names()) {
    CoeffTable ma = a.table, mb = b.table;
    ma.by_name(name) *= 1.01;
    mb.by_name(name) *= 1.01;
    const double res =
        std::max(ode_residual(a.q, ma).max_relative, ode_residual(b.q, mb).max_relative);
    if (res < worst_mut) {
      worst_mut = res;
      worst_name = name;
    }
  }
  pass = pass && worst_mut > 1e-3;
  return {3, "ODE residual <= 1e-6 + mutation sensitivity", pass,
          "residuals=" + fmt(res_a) + "," + fmt(res_b) +
              " weakest-mutation(" + worst_name + ")=" + fmt(worst_mut)};
}

// 4. Continuity identity at the same oracle points.
Criterion c4() {
  OraclePoint a = solve_point(3.0, 2.0, 40.0, 80);
  OraclePoint b = solve_point(1.0, 1.0, 10.0, 40);
  const double ra = continuity_residual(a.st, a.q);
  const double rb = continuity_residual(b.st, b.q);
  const bool pass = ra <= 1e-6 && rb <= 1e-6;
  return {4, "continuity identity <= 1e-6", pass, "residuals=" + fmt(ra) + "," + fmt(rb)};
}

// 5. Desk-scale sweep agreement and the threshold peak location.
Criterion c5() {
  const double I_s = 40.0, c = 20.0;
  const Thresholds t = thresholds(c, I_s);
  double worst_n = 0.0, worst_q = 0.0, worst_q_r = 0.0;
  for (double r = t.r_th + 0.5; r <= t.r_q - 0.5 + 1e-9; r += 0.25) {
    const FieldMoments asym = generating_moments(r, I_s, c);
    const FieldMoments oracle =
        moments_exact(steady_state(from_dimensionless(r, I_s, c), 160));
    worst_n = std::max(worst_n, std::abs(asym.mean_photon - oracle.mean_photon) /
                                    oracle.mean_photon);
    const double dq = std::abs(*asym.mandel_Qf - *oracle.mandel_Qf);
    if (dq > worst_q) {
      worst_q = dq;
      worst_q_r = r;
    }
  }
  // fine scan for the near-threshold Mandel peak
  double peak_r = 0.0, peak_q = -1e300;
  for (double r = t.r_th - 0.4; r <= t.r_th + 1.2 + 1e-9; r += 0.01) {
    const FieldMoments m = generating_moments(r, I_s, c);
    if (*m.mandel_Qf > peak_q) {
      peak_q = *m.mandel_Qf;
      peak_r = r;
    }
  }
  const bool ok_n = worst_n <= 0.02;
  const bool ok_q = worst_q <= 0.05;
  const bool ok_peak = std::abs(peak_r - t.r_th) <= 0.3;
  std::string detail = "worst dn/n=" + fmt(worst_n) + (ok_n ? "" : "!") +
                       " worst |dQf|=" + fmt(worst_q) + "@r=" + fmt(worst_q_r) +
                       (ok_q ? "" : "!") + " Qf-peak at r=" + fmt(peak_r) +
                       " (r_th=" + fmt(t.r_th) + ")" + (ok_peak ? "" : "!");
  if (!(ok_q && ok_peak))
    detail += " (documented: first-order asymptotic error ~1/(c I_s) exceeds the "
              "chosen tolerances near the window edges)";
  return {5, "sweep agreement vs oracle + threshold peak", ok_n && ok_q && ok_peak, detail};
}

// 6. Thermal branch against the oracle and the a -> -1 limits.
Criterion c6() {
  const double I_s = 40.0, c = 20.0;
  const Thresholds t = thresholds(c, I_s);
  const double r = 0.01 * t.r_th;
  const RateSet rates = from_dimensionless(r, I_s, c);
  const double n_oracle = moments_exact(steady_state(rates, 40)).mean_photon;
  const ReducedParams p = reduce(rates);
  const CoeffTable table = coefficients(p);
  const RootCatalog cat = roots(polynomials(table), table);
  const double n_th = -(cat.thermal_root() + 1.0);
  const bool ok_n =
      std::abs(n_th - n_oracle) <= std::max(0.10 * std::abs(n_oracle), 1e-3);
  double lim_dev = 0.0;
  for (double rr : {1e-6, 1e6}) {
    const ReducedParams pp = params_from_triple(rr, I_s, c);
    const CoeffTable tt = coefficients(pp);
    const RootCatalog cc = roots(polynomials(tt), tt);
    lim_dev = std::max(lim_dev, std::abs(cc.thermal_root() + 1.0));
  }
  const bool ok_lim = lim_dev <= 1e-3;
  return {6, "thermal branch vs oracle + a -> -1 limits", ok_n && ok_lim,
          "n_th=" + fmt(n_th) + " n_oracle=" + fmt(n_oracle) +
              " max|a+1|=" + fmt(lim_dev)};
}

// 7. Gaussian consistency.
Criterion c7() {
  const ReducedParams p = params_from_triple(20.0, 95.95, 100.0);
  const LinearTheoryResult lin = linear_result(20.0, 95.95, 100.0);
  const QProfile g = q_gaussian(p, lin);
  const double sigma2 = std::get<GaussianShape>(g.shape).sigma2;
  const FieldMoments m = moments(g);
  const bool ok_s = std::abs(sigma2 - 1440.2) <= 1.0;
  const bool ok_q = std::abs(*m.mandel_Qf - lin.Qf_lin) <= 0.003;
  return {7, "gaussian variance and Mandel consistency", ok_s && ok_q,
          "sigma2=" + fmt(sigma2) + " Qf(21)=" + fmt(*m.mandel_Qf) +
              " Qf_lin=" + fmt(lin.Qf_lin)};
}

// 8. Structural invariants.
Criterion c8() {
  bool pass = true;
  std::string detail;

  // normalization and nonnegativity of both profile families
  {
    OraclePoint a = solve_point(3.0, 2.0, 40.0, 80);
    QuadratureOptions qo;
    const double mass =
        M_PI * integrate([&](double I) { return a.q(I); }, 0.0, a.q.I_max, qo).value;
    const bool ok = std::abs(mass - 1.0) <= 1e-8;
    pass = pass && ok;
    detail += "oracle-norm-err=" + fmt(mass - 1.0) + (ok ? " " : "! ");
  }
  {
    const ReducedParams p = params_from_triple(20.0, 95.95, 100.0);
    const CoeffTable table = coefficients(p);
    const RootCatalog cat = roots(polynomials(table), table);
    const QProfile q = q_generating(p, cat, table);
    QuadratureOptions qo;
    qo.singular_points = q.singular_points();
    const double mass =
        M_PI * integrate([&](double I) { return q(I); }, 0.0, q.I_max, qo).value;
    double qmin = 0.0;
    for (double v : q.grid_Q) qmin = std::min(qmin, v);
    const bool ok = std::abs(mass - 1.0) <= 1e-8 && qmin >= 0.0;
    pass = pass && ok;
    detail += "gen-norm-err=" + fmt(mass - 1.0) + (ok ? " " : "! ");
  }

  // root sign pattern over a classical-regime grid; I_-5 vs I0 where c I_s >= 1e3
  {
    bool ok_signs = true;
    double worst_i5 = 0.0;
    for (double c : {20.0, 100.0, 1000.0, 10000.0}) {
      const Thresholds t = thresholds(c);
      for (double frac : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const double r = t.r_th + frac * (t.r_q - t.r_th);
        const double I_s = std::max(100.0 / c, 0.87);
        const ReducedParams p = params_from_triple(r, I_s, c);
        const CoeffTable table = coefficients(p);
        const RootCatalog cat = roots(polynomials(table), table);
        ok_signs = ok_signs && cat.f1.real && cat.I_minus4() < 0.0 && cat.I_plus4() > 0.0;
        const double I0 = classical_intensity(r, I_s, c);
        if (c * I_s >= 1e3 && cat.f0.real && I0 > 0.0)
          worst_i5 = std::max(worst_i5, std::abs(cat.I_minus5() - I0) / I0);
      }
    }
    const bool ok = ok_signs && worst_i5 <= 0.01;
    pass = pass && ok;
    detail += "signs=" + std::string(ok_signs ? "ok" : "bad") +
              " worst|I-5-I0|/I0=" + fmt(worst_i5) + (ok ? " " : "! ");
  }

  // factorization round-trip at the strong-coupling point
  {
    const ReducedParams p = params_from_triple(20.0, 95.95, 100.0);
    const CoeffTable b = coefficients(p);
    const RootCatalog cat = roots(polynomials(b), b);
    double worst = 0.0;
    const double s1 = std::max({std::abs(b.b40), std::abs(b.b41), std::abs(b.b42)});
    worst = std::max(worst, std::abs(-b.b42 * (cat.I_minus4() + cat.I_plus4()) - b.b41) /
                                (s1 * std::max(1.0, std::abs(cat.I_plus4()))));
    worst = std::max(worst, std::abs(b.b42 * cat.I_minus4() * cat.I_plus4() - b.b40) /
                                (s1 * std::max(1.0, cat.I_plus4() * cat.I_plus4())));
    const double s0 = std::max({std::abs(b.b50), std::abs(b.b51), std::abs(b.b52)});
    worst = std::max(worst, std::abs(-b.b52 * (cat.I_minus5() + cat.I_plus5()) - b.b51) /
                                (s0 * std::max(1.0, std::abs(cat.I_plus5()))));
    worst = std::max(worst, std::abs(b.b52 * cat.I_minus5() * cat.I_plus5() - b.b50) /
                                (s0 * std::max(1.0, cat.I_plus5() * cat.I_plus5())));
    const bool ok = worst <= 1e-10;
    pass = pass && ok;
    detail += "factor-roundtrip=" + fmt(worst) + (ok ? " " : "! ");
  }

  // steady-state structure and cutoff-doubling stability
  {
    const RateSet rates = from_dimensionless(3.0, 2.0, 40.0);
    const SteadyState st = steady_state(rates, 80);
    const auto pops = st.populations();
    double trace = 0.0, minpop = 0.0;
    for (double v : pops) {
      trace += v;
      minpop = std::min(minpop, v);
    }
    const double scale = rates.pump + rates.decay + rates.cavity_loss + rates.coupling;
    bool ok = std::abs(trace - 1.0) <= 1e-10 && minpop >= -1e-12 &&
              st.tail_mass < 1e-8 && st.residual_norm <= 1e-10 * scale;
    const FieldMoments m1 = moments_exact(st);
    const FieldMoments m2 = moments_exact(steady_state(rates, 160));
    const double dn = std::abs(m1.mean_photon - m2.mean_photon) / m2.mean_photon;
    const double dq = std::abs(*m1.mandel_Qf - *m2.mandel_Qf) / std::abs(*m2.mandel_Qf);
    ok = ok && dn < 1e-8 && dq < 1e-8;
    pass = pass && ok;
    detail += "state-bounds=" + std::string(ok ? "ok" : "bad") +
              " doubling-dn=" + fmt(dn);
  }

  return {8, "structural invariants", pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc == 3 && std::strcmp(argv[1], "--criterion") == 0) only = std::atoi(argv[2]);

  Criterion (*all[])() = {c1, c2, c3, c4, c5, c6, c7, c8};
  int failures = 0;
  for (int i = 0; i < 8; ++i) {
    if (only && i + 1 != only) continue;
    const Criterion c = all[i]();
    std::printf("[%s] C%d %s: %s\n", c.pass ? "PASS" : "FAIL", c.id, c.title.c_str(),
                c.detail.c_str());
    if (!c.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
