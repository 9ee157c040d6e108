// Command-line front end: pump scans, the comparison table, Q(I) profile
// export and the validation suite. Emits deterministic CSV/JSON (no
// timestamps; metadata in a commented header block).

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "salq/io.hpp"
#include "salq/oracle.hpp"
#include "salq/qsolution.hpp"
#include "salq/validation.hpp"

using nlohmann::ordered_json;
using namespace salq;

namespace {

struct ScanOptions {
  double I_s = 0.0, c = 0.0;
  double r_single = -1.0;
  std::string r_range;
  double r_step = 0.0;
  bool with_oracle = false;
  bool heavy = false;
  int cutoff = 0;
  double theta = 0.5;
  std::string format = "csv";
  std::string out;
};

// Oracle solve with cutoff growth on tail failures, bounded unless --heavy.
SteadyState solve_oracle(const RateSet& rates, int N0, int cap) {
  int N = N0;
  for (;;) {
    try {
      return steady_state(rates, N);
    } catch (const cutoff_error&) {
      N = static_cast<int>(std::ceil(N * 1.6)) + 10;
      if (N > cap) throw;
    }
  }
}

struct ScanRow {
  double r = 0.0;
  std::string I0, Qf_lin, n_asym, Qf_asym, branch, n_oracle, Qf_oracle, reason;
};

// Flat key=value config file mirroring the flags; values given on the
// command line win. '#' starts a comment.
int apply_config(const std::string& path, CLI::App* sub,
                 const std::map<std::string, std::function<void(const std::string&)>>& keys) {
  std::ifstream f(path);
  if (!f) {
    std::cerr << "error: cannot read config file " << path << "\n";
    return 2;
  }
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::cerr << "error: " << path << ":" << lineno << ": expected key=value\n";
      return 2;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = keys.find(key);
    if (it == keys.end()) {
      std::cerr << "error: " << path << ":" << lineno << ": unknown key '" << key << "'\n";
      return 2;
    }
    if (sub->count("--" + key) > 0) continue;  // flag wins
    try {
      it->second(value);
    } catch (...) {
      std::cerr << "error: " << path << ":" << lineno << ": bad value for '" << key << "'\n";
      return 2;
    }
  }
  return 0;
}

ScanRow compute_row(double r, const ScanOptions& o) {
  ScanRow row;
  row.r = r;
  std::vector<std::string> reasons;

  row.I0 = fmt17(classical_intensity(r, o.I_s, o.c));
  const LinearTheoryResult lin = linear_result(r, o.I_s, o.c);
  if (lin.valid)
    row.Qf_lin = fmt17(lin.Qf_lin);
  else if (o.c <= 8.0)
    reasons.push_back("no-lasing");
  else
    reasons.push_back(r <= lin.r_th ? "below-threshold" : "above-quenching");

  ReducedParams params;
  bool have_params = true;
  try {
    params = params_from_triple(r, o.I_s, o.c);
  } catch (const error& e) {
    have_params = false;
    reasons.push_back(std::string("params:") + e.what());
  }

  if (have_params) {
    const ProfileKind kind = select_solution(params, o.theta);
    row.branch = to_string(kind);
    try {
      const QProfile prof = solve_profile(params, kind);
      const FieldMoments m = moments(prof);
      row.n_asym = fmt17(m.mean_photon);
      if (m.mandel_Qf)
        row.Qf_asym = fmt17(*m.mandel_Qf);
      else
        reasons.push_back("mandel-undefined");
    } catch (const error& e) {
      reasons.push_back(std::string("asym:") + e.what());
    }

    if (o.with_oracle) {
      try {
        const RateSet rates = from_dimensionless(r, o.I_s, o.c);
        const int N = (o.cutoff > 0) ? o.cutoff : cutoff_policy(rates);
        const int cap = o.heavy ? 4000 : 400;
        if (o.cutoff <= 0 && N > cap) {
          reasons.push_back("heavy");
        } else {
          const SteadyState st =
              (o.cutoff > 0) ? steady_state(rates, o.cutoff) : solve_oracle(rates, N, cap);
          const FieldMoments m = moments_exact(st);
          row.n_oracle = fmt17(m.mean_photon);
          if (m.mandel_Qf) row.Qf_oracle = fmt17(*m.mandel_Qf);
        }
      } catch (const error& e) {
        reasons.push_back(std::string("oracle:") + e.what());
      }
    }
  }

  for (std::size_t i = 0; i < reasons.size(); ++i)
    row.reason += (i ? ";" : "") + reasons[i];
  return row;
}

int run_scan(const ScanOptions& o) {
  std::vector<double> rs;
  if (!o.r_range.empty() && o.r_single > 0.0) {
    std::cerr << "error: give either --r or --r-range, not both\n";
    return 2;
  }
  if (!o.r_range.empty()) {
    const auto colon = o.r_range.find(':');
    if (colon == std::string::npos) {
      std::cerr << "error: --r-range expects LO:HI\n";
      return 2;
    }
    double lo = 0.0, hi = 0.0;
    try {
      lo = std::stod(o.r_range.substr(0, colon));
      hi = std::stod(o.r_range.substr(colon + 1));
    } catch (...) {
      std::cerr << "error: --r-range expects numeric LO:HI\n";
      return 2;
    }
    if (!(o.r_step > 0.0) || hi < lo) {
      std::cerr << "error: empty pump range or non-positive --r-step\n";
      return 2;
    }
    for (double r = lo; r <= hi + 1e-9 * std::max(1.0, std::abs(hi)); r += o.r_step)
      rs.push_back(r);
  } else if (o.r_single > 0.0) {
    rs.push_back(o.r_single);
  }
  if (rs.empty()) {
    std::cerr << "error: no pump values; give --r or --r-range with --r-step\n";
    return 2;
  }

  std::vector<ScanRow> rows(rs.size());
  std::atomic<std::size_t> next{0};
  const unsigned nthreads = static_cast<unsigned>(
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), rs.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < nthreads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < rs.size(); i = next.fetch_add(1))
        rows[i] = compute_row(rs[i], o);
    });
  for (auto& th : pool) th.join();

  if (o.format == "json") {
    ordered_json doc;
    doc["schema"] = kScanSchema;
    doc["I_s"] = o.I_s;
    doc["c"] = o.c;
    doc["theta"] = o.theta;
    doc["with_oracle"] = o.with_oracle;
    ordered_json jrows = ordered_json::array();
    for (const auto& row : rows) {
      ordered_json jr;
      jr["r"] = row.r;
      auto put = [&](const char* key, const std::string& s) {
        if (s.empty())
          jr[key] = nullptr;
        else
          jr[key] = std::stod(s);
      };
      put("I0", row.I0);
      put("Qf_lin", row.Qf_lin);
      put("n_asym", row.n_asym);
      put("Qf_asym", row.Qf_asym);
      jr["branch_kind"] = row.branch;
      if (o.with_oracle) {
        put("n_oracle", row.n_oracle);
        put("Qf_oracle", row.Qf_oracle);
      }
      jr["reason"] = row.reason;
      jrows.push_back(jr);
    }
    doc["rows"] = jrows;
    write_output(doc.dump(2) + "\n", o.out);
    return 0;
  }

  CsvDocument csv;
  csv.meta("schema", kScanSchema);
  csv.meta("is", fmt17(o.I_s));
  csv.meta("c", fmt17(o.c));
  csv.meta("theta", fmt17(o.theta));
  csv.meta("with-oracle", o.with_oracle ? "1" : "0");
  csv.header = {"r", "I0", "Qf_lin", "n_asym", "Qf_asym", "branch_kind"};
  if (o.with_oracle) {
    csv.header.push_back("n_oracle");
    csv.header.push_back("Qf_oracle");
  }
  csv.header.push_back("reason");
  for (const auto& row : rows) {
    std::vector<std::string> cells{fmt17(row.r), row.I0,      row.Qf_lin,
                                   row.n_asym,  row.Qf_asym, row.branch};
    if (o.with_oracle) {
      cells.push_back(row.n_oracle);
      cells.push_back(row.Qf_oracle);
    }
    cells.push_back(row.reason);
    csv.rows.push_back(std::move(cells));
  }
  write_output(csv.str(), o.out);
  return 0;
}

struct TableCase {
  double r, I_s, c;
};
constexpr TableCase kTableCases[] = {
    {20.0, 95.95, 100.0}, {200.0, 8.83, 1000.0}, {2000.0, 0.87, 10000.0}};

int run_table(bool heavy, const std::string& format, const std::string& out, int cutoff) {
  std::vector<std::string> I0_row, qlin_row, n_q0, qf_q0, n_or, qf_or;
  for (const TableCase& tc : kTableCases) {
    I0_row.push_back(fmt17(classical_intensity(tc.r, tc.I_s, tc.c)));
    qlin_row.push_back(fmt17(mandel_lin(tc.r, tc.c)));
    const ReducedParams p = params_from_triple(tc.r, tc.I_s, tc.c);
    const CoeffTable table = coefficients(p);
    const RootCatalog cat = roots(polynomials(table), table);
    const FieldMoments m = moments(q_generating(p, cat, table));
    n_q0.push_back(fmt17(m.mean_photon));
    qf_q0.push_back(fmt17(m.mandel_Qf.value_or(std::nan(""))));
    if (heavy) {
      const RateSet rates = from_dimensionless(tc.r, tc.I_s, tc.c);
      const int N = (cutoff > 0) ? cutoff : cutoff_policy(rates);
      const FieldMoments mo = moments_exact(steady_state(rates, N));
      n_or.push_back(fmt17(mo.mean_photon));
      qf_or.push_back(fmt17(mo.mandel_Qf.value_or(std::nan(""))));
    }
  }

  if (format == "json") {
    ordered_json doc;
    doc["schema"] = kTableSchema;
    ordered_json cases = ordered_json::array();
    for (const TableCase& tc : kTableCases)
      cases.push_back({{"r", tc.r}, {"I_s", tc.I_s}, {"c", tc.c}});
    doc["cases"] = cases;
    auto nums = [](const std::vector<std::string>& v) {
      ordered_json a = ordered_json::array();
      for (const auto& s : v) a.push_back(std::stod(s));
      return a;
    };
    doc["I0"] = nums(I0_row);
    doc["Qf_lin"] = nums(qlin_row);
    doc["n_Q0"] = nums(n_q0);
    doc["Qf_Q0"] = nums(qf_q0);
    if (heavy) {
      doc["n_oracle"] = nums(n_or);
      doc["Qf_oracle"] = nums(qf_or);
    }
    write_output(doc.dump(2) + "\n", out);
    return 0;
  }

  CsvDocument csv;
  csv.meta("schema", kTableSchema);
  for (std::size_t i = 0; i < std::size(kTableCases); ++i) {
    const TableCase& tc = kTableCases[i];
    csv.meta("case_" + std::to_string(i + 1), "r=" + fmt17(tc.r) + " Is=" + fmt17(tc.I_s) +
                                                  " c=" + fmt17(tc.c));
  }
  csv.header = {"quantity", "case_1", "case_2", "case_3"};
  auto push_row = [&](const std::string& name, const std::vector<std::string>& v) {
    csv.rows.push_back({name, v[0], v[1], v[2]});
  };
  push_row("I0", I0_row);
  push_row("Qf_lin", qlin_row);
  push_row("n_Q0", n_q0);
  push_row("Qf_Q0", qf_q0);
  if (heavy) {
    push_row("n_oracle", n_or);
    push_row("Qf_oracle", qf_or);
  }
  write_output(csv.str(), out);
  return 0;
}

int run_profile(const ScanOptions& o, bool with_gaussian) {
  const ReducedParams params = params_from_triple(o.r_single, o.I_s, o.c);
  const ProfileKind kind = select_solution(params, o.theta);
  const QProfile asym = solve_profile(params, kind);

  std::vector<std::pair<std::string, std::string>> curve_errors;
  std::vector<std::string> warnings = asym.warnings;

  bool have_gauss = false;
  QProfile gauss;
  if (with_gaussian) {
    try {
      gauss = q_gaussian(params, linear_result(o.r_single, o.I_s, o.c));
      have_gauss = true;
      warnings.insert(warnings.end(), gauss.warnings.begin(), gauss.warnings.end());
    } catch (const error& e) {
      curve_errors.emplace_back("gaussian", e.what());
    }
  }

  bool have_oracle = false;
  QProfile oracle_q;
  if (o.with_oracle) {
    try {
      const RateSet rates = from_dimensionless(o.r_single, o.I_s, o.c);
      const int N = (o.cutoff > 0) ? o.cutoff : cutoff_policy(rates);
      const int cap = o.heavy ? 4000 : 400;
      if (o.cutoff <= 0 && N > cap) {
        curve_errors.emplace_back("oracle", "heavy point; pass --heavy to compute");
      } else {
        const SteadyState st =
            (o.cutoff > 0) ? steady_state(rates, o.cutoff) : solve_oracle(rates, N, cap);
        oracle_q = q_from_state(st);
        have_oracle = true;
      }
    } catch (const error& e) {
      curve_errors.emplace_back("oracle", e.what());
    }
  }

  CsvDocument csv;
  csv.meta("schema", kProfileSchema);
  csv.meta("is", fmt17(o.I_s));
  csv.meta("c", fmt17(o.c));
  csv.meta("r", fmt17(o.r_single));
  csv.meta("branch", to_string(kind));
  for (const auto& w : warnings) csv.meta("warning", w);
  for (const auto& [curve, msg] : curve_errors) csv.meta("curve-error", curve + ": " + msg);
  csv.header = {"I", "Q_asym"};
  if (have_gauss) csv.header.push_back("Q_gaussian");
  if (have_oracle) csv.header.push_back("Q_oracle");
  for (double I : asym.grid_I) {
    std::vector<std::string> cells{fmt17(I), fmt17(asym(I))};
    if (have_gauss) cells.push_back(fmt17(gauss(I)));
    if (have_oracle) cells.push_back(fmt17(oracle_q(I)));
    csv.rows.push_back(std::move(cells));
  }
  write_output(csv.str(), o.out);
  return 0;
}

int run_validate(const ValidationOptions& vopts, const std::string& out) {
  const ValidationReport rep = run_validation(vopts);
  ordered_json doc;
  doc["schema"] = kValidateSchema;
  if (!vopts.mutate_coeff.empty()) {
    doc["mutation"] = {{"coeff", vopts.mutate_coeff}, {"factor", vopts.mutate_factor}};
  }
  ordered_json checks = ordered_json::array();
  for (const Check& c : rep.checks) {
    ordered_json jc;
    jc["name"] = c.name;
    jc["pass"] = c.pass;
    jc["value"] = c.value;
    jc["threshold"] = c.threshold;
    if (!c.note.empty()) jc["note"] = c.note;
    checks.push_back(jc);
  }
  doc["checks"] = checks;
  doc["all_pass"] = rep.all_pass();
  write_output(doc.dump(2) + "\n", out);
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-atom-laser Q-distribution toolkit"};
  app.require_subcommand(1);

  ScanOptions so;
  bool with_gaussian = false;
  int table_cutoff = 0;
  bool table_heavy = false;
  std::string table_format = "csv", table_out, table_config;
  std::string scan_config, profile_config;
  ValidationOptions vopts;
  std::string validate_out;

  auto add_common = [&](CLI::App* sub, std::string& config) {
    sub->add_option("--is", so.I_s, "saturation parameter I_s");
    sub->add_option("--c", so.c, "cooperativity c");
    sub->add_option("--r", so.r_single, "pump parameter r");
    sub->add_option("--r-range", so.r_range, "pump range LO:HI");
    sub->add_option("--r-step", so.r_step, "pump step for --r-range");
    sub->add_flag("--with-oracle", so.with_oracle, "add master-equation oracle columns");
    sub->add_flag("--heavy", so.heavy, "allow table-scale oracle solves");
    sub->add_option("--cutoff", so.cutoff, "Fock cutoff override for the oracle");
    sub->add_option("--theta", so.theta, "thermal/generating switch at r = theta*r_th");
    sub->add_option("--format", so.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", so.out, "output path (default stdout)");
    sub->add_option("--config", config, "flat key=value config file; flags win");
  };

  auto common_keys = [&](bool gaussian_key) {
    std::map<std::string, std::function<void(const std::string&)>> keys{
        {"is", [&](const std::string& v) { so.I_s = std::stod(v); }},
        {"c", [&](const std::string& v) { so.c = std::stod(v); }},
        {"r", [&](const std::string& v) { so.r_single = std::stod(v); }},
        {"r-range", [&](const std::string& v) { so.r_range = v; }},
        {"r-step", [&](const std::string& v) { so.r_step = std::stod(v); }},
        {"with-oracle", [&](const std::string& v) { so.with_oracle = (v == "1" || v == "true"); }},
        {"heavy", [&](const std::string& v) { so.heavy = (v == "1" || v == "true"); }},
        {"cutoff", [&](const std::string& v) { so.cutoff = std::stoi(v); }},
        {"theta", [&](const std::string& v) { so.theta = std::stod(v); }},
        {"format", [&](const std::string& v) { so.format = v; }},
        {"out", [&](const std::string& v) { so.out = v; }},
    };
    if (gaussian_key)
      keys.emplace("with-gaussian",
                   [&](const std::string& v) { with_gaussian = (v == "1" || v == "true"); });
    return keys;
  };

  CLI::App* scan = app.add_subcommand("scan-pump", "sweep the pump parameter r");
  add_common(scan, scan_config);

  CLI::App* table = app.add_subcommand("table", "reproduce the comparison table");
  table->add_flag("--heavy", table_heavy, "add the oracle row (table-scale solves)");
  table->add_option("--cutoff", table_cutoff, "Fock cutoff override for the oracle row");
  table->add_option("--format", table_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  table->add_option("--out", table_out, "output path (default stdout)");
  table->add_option("--config", table_config, "flat key=value config file; flags win");

  CLI::App* profile = app.add_subcommand("profile", "export Q(I) curves");
  add_common(profile, profile_config);
  profile->add_flag("--with-gaussian", with_gaussian, "add the Gaussian approximation");

  CLI::App* validate = app.add_subcommand("validate", "run the invariant suite");
  validate->add_option("--out", validate_out, "output path (default stdout)");
  validate->add_option("--mutate-coeff", vopts.mutate_coeff, "")->group("");  // test hook
  validate->add_option("--mutate-factor", vopts.mutate_factor, "")->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (scan->parsed() || profile->parsed()) {
      CLI::App* sub = scan->parsed() ? scan : profile;
      const std::string& cfg = scan->parsed() ? scan_config : profile_config;
      if (!cfg.empty()) {
        const int rc = apply_config(cfg, sub, common_keys(profile->parsed()));
        if (rc != 0) return rc;
      }
      if (!(so.I_s > 0.0) || !(so.c > 0.0)) {
        std::cerr << "error: --is and --c are required (flags or config)\n";
        return 2;
      }
    }
    if (scan->parsed()) return run_scan(so);
    if (table->parsed()) {
      if (!table_config.empty()) {
        std::map<std::string, std::function<void(const std::string&)>> keys{
            {"heavy", [&](const std::string& v) { table_heavy = (v == "1" || v == "true"); }},
            {"cutoff", [&](const std::string& v) { table_cutoff = std::stoi(v); }},
            {"format", [&](const std::string& v) { table_format = v; }},
            {"out", [&](const std::string& v) { table_out = v; }},
        };
        const int rc = apply_config(table_config, table, keys);
        if (rc != 0) return rc;
      }
      return run_table(table_heavy, table_format, table_out, table_cutoff);
    }
    if (profile->parsed()) {
      if (!(so.r_single > 0.0)) {
        std::cerr << "error: profile needs --r\n";
        return 2;
      }
      if (so.format != "csv") {
        std::cerr << "error: profile emits CSV only\n";
        return 2;
      }
      return run_profile(so, with_gaussian);
    }
    if (validate->parsed()) return run_validate(vopts, validate_out);
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
