#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "twistlab/constants.hpp"
#include "twistlab/errors.hpp"
#include "twistlab/finite_vector.hpp"
#include "twistlab/interpolation.hpp"
#include "twistlab/random.hpp"
#include "twistlab/twisted.hpp"

namespace twistlab {

// A sweep request: which experiment, over which n grid, with which seed.
// An empty grid means the experiment's documented default grid.
struct SweepSpec {
  std::string name;
  std::vector<int> grid;
  std::uint64_t seed = 0;
  std::string csv_path;  // empty: caller renders the CSV itself
};

// Rows are preformatted cells (numbers via "%.17g", so every value written to
// CSV parses back to the exact double that was computed).  Failed grid points
// keep their row, with empty value cells and the error in the status column.
struct ExperimentResult {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  nlohmann::json summary;
};

namespace detail {

inline std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_int(long v) { return std::to_string(v); }

// Status cells never contain ',' or newlines, so rows need no quoting.
inline std::string sanitize_status(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

// Ordinary least squares of y against x; returns (slope, intercept).
inline std::pair<double, double> least_squares(const std::vector<double>& xs,
                                               const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  if (n < 2 || n != ys.size()) return {0.0, 0.0};
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  return {slope, my - slope * mx};
}

}  // namespace detail

inline std::string csv_text(const ExperimentResult& r) {
  std::string out;
  auto join = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';  // LF only
  };
  join(r.header);
  for (const auto& row : r.rows) join(row);
  return out;
}

inline void write_csv(const ExperimentResult& r, const std::string& path) {
  std::ofstream f(path, std::ios::binary);  // binary: keep LF endings as-is
  if (!f) throw Error("cannot open CSV output path: " + path);
  f << csv_text(r);
  if (!f) throw Error("failed writing CSV to " + path);
}

inline std::vector<std::string> experiment_names() {
  return {"kp-growth", "zt2-flat-centralizer", "log-hierarchy",
          "lemma-yo-sweep"};
}

namespace detail {

// Columns: n, distance_lower, closed_form, abs_dev, status.
// distance_lower is taken over the flat tuple {(0, e_j)}_{j <= n} in the
// Kalton-Peck space with linear slope 1; the closed form is 1 + log sqrt(n).
// Summary: least-squares slope of distance_lower against log n (expected 1/2).
inline ExperimentResult run_kp_growth(const SweepSpec& spec) {
  ExperimentResult r;
  r.name = "kp-growth";
  r.header = {"n", "distance_lower", "closed_form", "abs_dev", "status"};
  std::vector<int> grid = spec.grid.empty() ? std::vector<int>{2, 4, 8, 16}
                                            : spec.grid;

  auto model =
      TwistedSpaceModel::make(SpaceSpec::kalton_peck_space(PhiSpec::linear(1.0)));
  std::vector<double> logs, values;
  int failed = 0;
  for (int n : grid) {
    std::vector<std::string> row(5);
    row[0] = fmt_int(n);
    try {
      std::vector<TwistedVector> tuple;
      for (int j = 1; j <= n; ++j) tuple.push_back(TwistedVector::second_slot(j));
      const double value = distance_lower(model, tuple);
      const double closed = 1.0 + std::log(std::sqrt(static_cast<double>(n)));
      row[1] = fmt_g17(value);
      row[2] = fmt_g17(closed);
      row[3] = fmt_g17(std::fabs(value - closed));
      row[4] = "ok";
      logs.push_back(std::log(static_cast<double>(n)));
      values.push_back(value);
    } catch (const std::exception& e) {
      row[4] = sanitize_status(std::string("error: ") + e.what());
      ++failed;
    }
    r.rows.push_back(std::move(row));
  }
  const auto [slope, intercept] = least_squares(logs, values);
  r.summary = {{"experiment", r.name},
               {"grid", grid},
               {"seed", spec.seed},
               {"rows_ok", static_cast<int>(grid.size()) - failed},
               {"rows_failed", failed},
               {"slope_vs_log_n", slope},
               {"intercept", intercept}};
  return r;
}

// Columns: n, c_t2, abs_c_t2, spread_t2, eps_t2, c_l1linf, log_n, status.
// c is the leading coefficient of Omega(1_{[n,2n)}) in the given couple; the
// flat block makes all coefficients of the t2 centralizer equal up to solver
// noise (spread_t2 records max - min across the block).  The l1/linf column
// is the same coefficient for the classical couple, which grows like log n.
// Summary: slopes of |c_t2| and c_l1linf against log n.
inline ExperimentResult run_zt2_flat_centralizer(const SweepSpec& spec) {
  ExperimentResult r;
  r.name = "zt2-flat-centralizer";
  r.header = {"n",      "c_t2",     "abs_c_t2", "spread_t2",
              "eps_t2", "c_l1linf", "log_n",    "status"};
  std::vector<int> grid =
      spec.grid.empty() ? std::vector<int>{4, 8, 16, 32, 64} : spec.grid;

  Couple t2 = Couple::t2_pair();
  Couple classical = Couple::l1_linf();
  std::vector<double> logs, abs_t2, classical_vals;
  int failed = 0;
  for (int n : grid) {
    std::vector<std::string> row(8);
    row[0] = fmt_int(n);
    row[6] = fmt_g17(std::log(static_cast<double>(n)));
    try {
      if (n < 1) throw InvalidRangeError("grid entries must be positive");
      FiniteVector y;
      for (int j = n; j < 2 * n; ++j) y.set(j, 1.0);

      const CentralizerResult res = centralizer_detail(t2, y);
      double lo = res.omega.at(n), hi = res.omega.at(n);
      for (int j = n; j < 2 * n; ++j) {
        lo = std::min(lo, res.omega.at(j));
        hi = std::max(hi, res.omega.at(j));
      }
      const double c_t2 = res.omega.at(n);
      const FiniteVector om1 = centralizer(classical, y);
      const double c_l1 = om1.at(n);

      row[1] = fmt_g17(c_t2);
      row[2] = fmt_g17(std::fabs(c_t2));
      row[3] = fmt_g17(hi - lo);
      row[4] = fmt_g17(res.factorization.eps_achieved);
      row[5] = fmt_g17(c_l1);
      row[7] = "ok";
      logs.push_back(std::log(static_cast<double>(n)));
      abs_t2.push_back(std::fabs(c_t2));
      classical_vals.push_back(c_l1);
    } catch (const std::exception& e) {
      row[7] = sanitize_status(std::string("error: ") + e.what());
      ++failed;
    }
    r.rows.push_back(std::move(row));
  }
  const auto [slope_t2, icept_t2] = least_squares(logs, abs_t2);
  const auto [slope_l1, icept_l1] = least_squares(logs, classical_vals);
  double max_abs = 0.0;
  for (double v : abs_t2) max_abs = std::max(max_abs, v);
  r.summary = {{"experiment", r.name},
               {"grid", grid},
               {"seed", spec.seed},
               {"rows_ok", static_cast<int>(grid.size()) - failed},
               {"rows_failed", failed},
               {"max_abs_c_t2", max_abs},
               {"slope_abs_c_t2_vs_log_n", slope_t2},
               {"intercept_abs_c_t2", icept_t2},
               {"slope_c_l1linf_vs_log_n", slope_l1},
               {"intercept_c_l1linf", icept_l1}};
  return r;
}

// Columns: m, x, value, status.  The grid selects iteration depths m; each m
// is tabulated at x in {e^e, 16, e^(e^e)}.  Depths where log_m(x) would fall
// below 1 are recorded as per-row domain errors, not dropped.
inline ExperimentResult run_log_hierarchy(const SweepSpec& spec) {
  ExperimentResult r;
  r.name = "log-hierarchy";
  r.header = {"m", "x", "value", "status"};
  std::vector<int> grid = spec.grid.empty() ? std::vector<int>{1, 2, 3}
                                            : spec.grid;
  const double ee = std::exp(std::exp(1.0));
  const std::vector<double> xs = {ee, 16.0, std::exp(ee)};
  int ok = 0, failed = 0;
  for (int m : grid) {
    for (double x : xs) {
      std::vector<std::string> row(4);
      row[0] = fmt_int(m);
      row[1] = fmt_g17(x);
      try {
        row[2] = fmt_g17(iterated_log(m, x));
        row[3] = "ok";
        ++ok;
      } catch (const std::exception& e) {
        row[3] = sanitize_status(std::string("error: ") + e.what());
        ++failed;
      }
      r.rows.push_back(std::move(row));
    }
  }
  r.summary = {{"experiment", r.name},
               {"grid", grid},
               {"seed", spec.seed},
               {"rows_ok", ok},
               {"rows_failed", failed}};
  return r;
}

// Columns: couple, n, kind, a0, a1, lhs, rhs, ratio, rho, status.
// Sweeps the commutator-bound harness over flat and seeded random dyadic
// tuples on the l1/linf couple (a0 = sqrt(n) exact for l1; a1 from the
// deterministic finite type-2 search on the sup-norm model), then appends one
// diagnostic run on the t2 couple.  Ratios at or below 1 are expected for the
// classical couple; the t2 row is reported without expectation.
inline ExperimentResult run_lemma_yo_sweep(const SweepSpec& spec) {
  ExperimentResult r;
  r.name = "lemma-yo-sweep";
  r.header = {"couple", "n",   "kind",  "a0",  "a1",
              "lhs",    "rhs", "ratio", "rho", "status"};
  std::vector<int> grid = spec.grid.empty() ? std::vector<int>{2, 3, 4}
                                            : spec.grid;

  Couple classical = Couple::l1_linf();
  const auto sup_model = SequenceSpaceModel::linf();
  double max_ratio = 0.0;
  int ok = 0, failed = 0;

  auto push_row = [&](const Couple& couple, int n, const std::string& kind,
                      double a0, double a1,
                      const std::vector<FiniteVector>& tuple) {
    std::vector<std::string> row(10);
    row[0] = couple.tag;
    row[1] = fmt_int(n);
    row[2] = kind;
    try {
      const CommutatorReport rep =
          centralizer_commutator_check(couple, tuple, a0, a1);
      row[3] = fmt_g17(rep.a0);
      row[4] = fmt_g17(rep.a1);
      row[5] = fmt_g17(rep.lhs);
      row[6] = fmt_g17(rep.rhs);
      row[7] = fmt_g17(rep.ratio);
      row[8] = fmt_g17(rep.rho);
      row[9] = "ok";
      if (couple.tag == "l1linf") max_ratio = std::max(max_ratio, rep.ratio);
      ++ok;
    } catch (const std::exception& e) {
      row[9] = sanitize_status(std::string("error: ") + e.what());
      ++failed;
    }
    r.rows.push_back(std::move(row));
  };

  for (int n : grid) {
    const double a0 = std::sqrt(static_cast<double>(n));
    SearchOptions opts;
    opts.restarts = 4;
    opts.seed = spec.seed;
    double a1 = 1.0;
    std::string a1_note = "search";
    try {
      a1 = type2_lower(sup_model, n, opts).value;
    } catch (const std::exception&) {
      a1_note = "fallback";
    }

    std::vector<FiniteVector> flat;
    for (int j = 1; j <= n; ++j) {
      FiniteVector e;
      e.set(j, 1.0);
      flat.push_back(e);
    }
    push_row(classical, n, "flat-" + a1_note, a0, a1, flat);

    auto rng = make_rng(spec.seed, 500 + static_cast<std::uint64_t>(n));
    std::vector<FiniteVector> random_tuple;
    for (int j = 0; j < n; ++j) {
      FiniteVector v;
      while (v.empty()) {
        for (int k = 1; k <= 6; ++k) {
          if (uniform01(rng) < 0.5) continue;
          v.set(k, dyadic_value(rng, 4, 3));
        }
      }
      random_tuple.push_back(v);
    }
    push_row(classical, n, "random-" + a1_note, a0, a1, random_tuple);
  }

  // Diagnostic t2 row: flat pair on the convexified couple, a0 = a1 = sqrt(2)
  // (indicative inputs; the l2 midpoint is only equivalent to the exact
  // interpolation norm here, so no bound is asserted).
  {
    Couple t2 = Couple::t2_pair();
    std::vector<FiniteVector> pair;
    for (int j = 4; j <= 5; ++j) {
      FiniteVector e;
      e.set(j, 1.0);
      pair.push_back(e);
    }
    push_row(t2, 2, "flat-diagnostic", std::sqrt(2.0), std::sqrt(2.0), pair);
  }

  r.summary = {{"experiment", r.name},
               {"grid", grid},
               {"seed", spec.seed},
               {"rows_ok", ok},
               {"rows_failed", failed},
               {"max_ratio_l1linf", max_ratio}};
  return r;
}

}  // namespace detail

inline ExperimentResult run_experiment(const SweepSpec& spec) {
  if (spec.name == "kp-growth") return detail::run_kp_growth(spec);
  if (spec.name == "zt2-flat-centralizer") {
    return detail::run_zt2_flat_centralizer(spec);
  }
  if (spec.name == "log-hierarchy") return detail::run_log_hierarchy(spec);
  if (spec.name == "lemma-yo-sweep") return detail::run_lemma_yo_sweep(spec);
  throw UnknownExperimentError("unknown experiment: " + spec.name);
}

}  // namespace twistlab
