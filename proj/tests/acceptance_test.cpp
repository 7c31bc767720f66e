// Acceptance gate: every shipped guarantee exercised end to end, one verdict
// line per criterion.  The binary exits nonzero if any criterion fails, so a
// plain ctest run is the release check.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "twistlab/twistlab.hpp"

namespace {

using namespace twistlab;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Verdict {
  bool ok = false;
  std::string detail;
};

int g_failures = 0;

void run_criterion(int idx, const std::string& name,
                   const std::function<Verdict()>& body) {
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v.ok = false;
    v.detail = std::string("exception: ") + e.what();
  }
  if (!v.ok) ++g_failures;
  std::printf("[%s] criterion %d: %s (%s)\n", v.ok ? "PASS" : "FAIL", idx,
              name.c_str(), v.detail.c_str());
  std::fflush(stdout);
}

// Dyadic vector with support inside [lo, hi].
FiniteVector random_dyadic_in(std::mt19937_64& rng, int lo, int hi) {
  FiniteVector v;
  while (v.empty()) {
    for (int k = lo; k <= hi; ++k) {
      if (uniform01(rng) < 0.5) v.set(k, dyadic_value(rng, 8, 3));
    }
  }
  return v;
}

// --- criterion 1: recursive norm vs exhaustive reference -------------------

Verdict criterion_norm_exact() {
  const auto t0 = Clock::now();
  auto rng = make_rng(2026, 1);
  int mismatches = 0;
  for (int t = 0; t < 500; ++t) {
    const FiniteVector v = random_dyadic_in(rng, 1, 8);
    if (tsirelson_norm(v).value != tsirelson_norm_bruteforce(v)) ++mismatches;
  }
  bool goldens = tsirelson_norm(FiniteVector{{3, 1.0},
                                             {4, 1.0},
                                             {5, 1.0},
                                             {6, 1.0}})
                         .value == 1.5;
  {
    FiniteVector e5{{5, 1.0}};
    goldens = goldens && tsirelson_norm(e5).value == 1.0;
  }
  for (int n = 2; n <= 4; ++n) {
    FiniteVector block;
    for (int k = n; k <= 2 * n - 1; ++k) block.set(k, 1.0);
    goldens = goldens &&
              tsirelson_norm(block).value == static_cast<double>(n) / 2.0;
  }
  const double secs = seconds_since(t0);
  Verdict v;
  v.ok = mismatches == 0 && goldens && secs < 10.0;
  v.detail = "500 dyadic vectors, mismatches " + std::to_string(mismatches) +
             ", goldens " + (goldens ? "exact" : "BROKEN") + ", " + fmt(secs) +
             "s (limit 10s)";
  return v;
}

// --- criterion 2: norm property suite --------------------------------------

Verdict criterion_norm_properties() {
  auto rng = make_rng(2026, 2);
  int failures = 0;

  // 1-unconditionality, exhaustive over all sign patterns for support <= 6.
  for (int t = 0; t < 30; ++t) {
    const FiniteVector v = random_dyadic_in(rng, 1, 6);
    const double base = tsirelson_norm(v).value;
    std::vector<int> keys;
    for (const auto& [k, val] : v.entries()) keys.push_back(k);
    const std::size_t patterns = std::size_t{1} << keys.size();
    for (std::size_t mask = 0; mask < patterns; ++mask) {
      FiniteVector flipped = v;
      for (std::size_t i = 0; i < keys.size(); ++i) {
        if (mask & (std::size_t{1} << i)) {
          flipped.set(keys[i], -v.at(keys[i]));
        }
      }
      if (tsirelson_norm(flipped).value != base) ++failures;
    }
  }

  // Restriction monotonicity and the sup <= T <= l1 sandwich.
  for (int t = 0; t < 100; ++t) {
    const FiniteVector v = random_dyadic_in(rng, 1, 8);
    const double full = tsirelson_norm(v).value;
    const int lo = static_cast<int>(uniform_int(rng, 1, 8));
    const int hi = static_cast<int>(uniform_int(rng, lo, 8));
    const FiniteVector part = restrict(v, lo, hi);
    if (!part.empty() && tsirelson_norm(part).value > full) ++failures;
    if (sup_norm(v) > full || full > l1_norm(v) * (1.0 + 1e-12)) ++failures;
  }

  // Witness functionals: reproduce the value and stay dual-feasible.
  double worst_eq = 0.0, worst_feas = 0.0;
  for (int t = 0; t < 100; ++t) {
    const FiniteVector v = random_dyadic_in(rng, 1, 8);
    const NormResult r = tsirelson_norm(v);
    const FiniteVector w = witness_functional(r.witness);
    worst_eq = std::max(worst_eq, std::fabs(dot(w, v.abs()) - r.value));
    const FiniteVector z = random_dyadic_in(rng, 1, 8);
    worst_feas =
        std::max(worst_feas, dot(w, z.abs()) - tsirelson_norm(z).value);
  }
  if (worst_eq > 1e-12 || worst_feas > 1e-12) ++failures;

  Verdict v;
  v.ok = failures == 0;
  v.detail = "exhaustive sign patterns, restrictions, sandwich, witness "
             "feasibility (worst defect " +
             fmt(std::max(worst_eq, worst_feas)) + "): " +
             std::to_string(failures) + " failures";
  return v;
}

// --- criterion 3: certified dual norm --------------------------------------

Verdict criterion_dual_certified() {
  const auto t0 = Clock::now();
  auto rng = make_rng(2026, 3);
  double worst_dev = 0.0, worst_gap = 0.0;
  int bad = 0;
  for (int t = 0; t < 50; ++t) {
    const FiniteVector y = random_dyadic_in(rng, 1, 6);
    const DualCertificate cert = t2_dual_norm(y);
    const double ref = dual_norm_bruteforce(y);
    const double dev = std::fabs(cert.value - ref);
    worst_dev = std::max(worst_dev, dev);
    worst_gap = std::max(worst_gap, cert.gap);
    if (dev > 1e-6 || cert.gap > 1e-6) ++bad;
  }
  // Hoelder: |<x, y>| <= ||x||_T2 ||y||_(T2)* on a fresh corpus.
  int holder_bad = 0;
  for (int t = 0; t < 200; ++t) {
    const FiniteVector x = random_dyadic_in(rng, 1, 8);
    const FiniteVector y = random_dyadic_in(rng, 1, 8);
    const double lhs = std::fabs(dot(x, y));
    const double rhs = tsirelson2_norm(x).value * t2_dual_norm(y).value;
    if (lhs > rhs * (1.0 + 1e-9) + 1e-12) ++holder_bad;
  }
  const double secs = seconds_since(t0);
  Verdict v;
  v.ok = bad == 0 && holder_bad == 0 && secs < 60.0;
  v.detail = "worst |value-ref| " + fmt(worst_dev) + ", worst gap " +
             fmt(worst_gap) + " (tol 1e-6), Hoelder violations " +
             std::to_string(holder_bad) + "/200, " + fmt(secs) +
             "s (limit 60s)";
  return v;
}

// --- criterion 4: classical couple factorization and closed form -----------

Verdict criterion_l1linf_factorization() {
  auto rng = make_rng(2026, 4);
  const Couple couple = Couple::l1_linf();
  double worst_eps = 0.0, worst_omega_dev = 0.0;
  int bad = 0;
  for (int t = 0; t < 100; ++t) {
    FiniteVector y;
    while (y.empty()) {
      for (int k = 1; k <= 12; ++k) {
        if (uniform01(rng) < 0.4) y.set(k, uniform_real(rng, -1.0, 1.0));
      }
    }
    y *= 1.0 / l2_norm(y);
    const CentralizerResult r = centralizer_detail(couple, y);
    worst_eps = std::max(worst_eps, r.factorization.eps_achieved);
    FiniteVector ref = kalton_peck_omega(y, PhiSpec::linear(2.0));
    FiniteVector diff = r.omega;
    diff -= ref;
    worst_omega_dev = std::max(worst_omega_dev, sup_norm(diff));
    if (r.factorization.eps_achieved > 1e-6 || sup_norm(diff) > 1e-6) ++bad;
  }
  Verdict v;
  v.ok = bad == 0;
  v.detail = "100 unit vectors, worst eps " + fmt(worst_eps) +
             ", worst |omega - closed form| " + fmt(worst_omega_dev) +
             " (tol 1e-6)";
  return v;
}

// --- criterion 5: derived-couple factorization -----------------------------

Verdict criterion_t2_factorization() {
  const auto t0 = Clock::now();
  auto rng = make_rng(2026, 5);
  const Couple couple = Couple::t2_pair();
  double worst_eps = 0.0;
  int product_bad = 0, eps_bad = 0;
  for (int t = 0; t < 50; ++t) {
    const FiniteVector y = random_dyadic_in(rng, 4, 16);
    const Factorization f = lozanovskii_factorize(couple, y);
    for (const auto& [k, yv] : y.entries()) {
      if (f.a.at(k) * f.b.at(k) != yv * yv) ++product_bad;  // bitwise
    }
    worst_eps = std::max(worst_eps, f.eps_achieved);
    if (f.eps_achieved > 0.05) ++eps_bad;
  }
  const double secs = seconds_since(t0);
  Verdict v;
  v.ok = product_bad == 0 && eps_bad == 0 && secs < 300.0;
  v.detail = "50 vectors, non-exact products " + std::to_string(product_bad) +
             ", worst eps " + fmt(worst_eps) + " (budget 0.05), " + fmt(secs) +
             "s (limit 300s)";
  return v;
}

// --- criterion 6: centralizer symmetries and selector derivative -----------

Verdict criterion_symmetries_and_derivative() {
  auto rng = make_rng(2026, 6);
  const Couple couple = Couple::l1_linf();
  int sym_bad = 0;
  for (int t = 0; t < 20; ++t) {
    FiniteVector y;
    while (y.empty()) {
      for (int k = 1; k <= 10; ++k) {
        if (uniform01(rng) < 0.4) y.set(k, dyadic_value(rng, 8, 3));
      }
    }
    const FiniteVector base = centralizer(couple, y);
    // Sign flips commute with the centralizer coordinatewise, bitwise.
    FiniteVector flipped = y;
    FiniteVector expected = base;
    for (const auto& [k, val] : y.entries()) {
      if (uniform01(rng) < 0.5) {
        flipped.set(k, -val);
        expected.set(k, -base.at(k));
      }
    }
    const FiniteVector got = centralizer(couple, flipped);
    for (const auto& [k, val] : expected.entries()) {
      if (got.at(k) != val) ++sym_bad;
    }
    // Dyadic dilation y -> 2y rescales the centralizer output, bitwise.
    FiniteVector doubled = y;
    doubled *= 2.0;
    const FiniteVector scaled = centralizer(couple, doubled);
    for (const auto& [k, val] : base.entries()) {
      if (scaled.at(k) != 2.0 * val) ++sym_bad;
    }
  }

  double err3 = 0.0, err4 = 0.0;
  for (int t = 0; t < 10; ++t) {
    FiniteVector y;
    while (y.empty()) {
      for (int k = 1; k <= 10; ++k) {
        if (uniform01(rng) < 0.4) y.set(k, uniform_real(rng, -1.0, 1.0));
      }
    }
    y *= 1.0 / l2_norm(y);
    const PowerSelector s = make_power_selector(couple, y);
    const FiniteVector omega = centralizer(couple, y);
    for (double h : {1e-3, 1e-4}) {
      FiniteVector d = s.evaluate(0.5 + h);
      d -= s.evaluate(0.5 - h);
      d *= 1.0 / (2.0 * h);
      d -= omega;
      (h == 1e-3 ? err3 : err4) =
          std::max(h == 1e-3 ? err3 : err4, l2_norm(d));
    }
  }
  const double order = std::log(err3 / err4) / std::log(10.0);
  Verdict v;
  v.ok = sym_bad == 0 && order >= 1.8;
  v.detail = "symmetry violations " + std::to_string(sym_bad) +
             " (exact), finite-difference order " + fmt(order) +
             " (need >= 1.8)";
  return v;
}

// --- criterion 7: flat sign averages and distance growth -------------------

Verdict criterion_flat_averages() {
  const TwistedSpaceModel model =
      TwistedSpaceModel::make(SpaceSpec::kalton_peck_space(PhiSpec::linear(1.0)));
  double worst_avg = 0.0, worst_dist = 0.0, worst_var = 0.0;
  std::vector<double> logs, dists;
  for (int n : {2, 4, 8, 16}) {
    std::vector<TwistedVector> tuple;
    for (int j = 1; j <= n; ++j) tuple.push_back(TwistedVector::second_slot(j));
    const RademacherResult r = rademacher_average(*model.space, tuple);
    const double root = std::sqrt(static_cast<double>(n));
    worst_avg = std::max(worst_avg,
                         std::fabs(r.mean - root * (1.0 + std::log(root))));
    worst_var = std::max(worst_var, r.stddev);
    const double d = distance_lower(model, tuple);
    worst_dist = std::max(
        worst_dist, std::fabs(d - (1.0 + 0.5 * std::log(
                                             static_cast<double>(n)))));
    logs.push_back(std::log(static_cast<double>(n)));
    dists.push_back(d);
  }
  const auto [slope, intercept] = detail::least_squares(logs, dists);
  Verdict v;
  v.ok = worst_avg <= 1e-12 && worst_var <= 1e-12 && worst_dist <= 1e-12 &&
         std::fabs(slope - 0.5) <= 1e-9;
  v.detail = "worst |avg - closed form| " + fmt(worst_avg) +
             ", worst stddev " + fmt(worst_var) + ", worst distance dev " +
             fmt(worst_dist) + " (tol 1e-12), slope " + fmt(slope) +
             " (0.5 +- 1e-9)";
  return v;
}

// --- criterion 8: bounded centralizer on the derived couple ----------------

// Independent optimizer for the n = 4 flat profile: a dense two-stage grid
// search over log-coordinates of a (b = y^2 / a), scoring the larger of the
// two couple norms with the exhaustive dual oracle.  No subgradient steps, no
// canonicalization, nothing shared with the production solver.
double grid_search_flat4_logratio() {
  const FiniteVector y{{4, 1.0}, {5, 1.0}, {6, 1.0}, {7, 1.0}};
  const std::vector<int> keys{4, 5, 6, 7};
  const auto score = [&](const std::array<double, 4>& u, double& lr) {
    FiniteVector a, b;
    for (int i = 0; i < 4; ++i) {
      a.set(keys[i], std::exp(u[i]));
      b.set(keys[i], std::exp(-u[i]));  // a.b = y^2 = 1 on the block
    }
    lr = std::log(b.at(4) / a.at(4));
    return std::max(tsirelson2_norm(a).value, dual_norm_bruteforce(b));
  };
  std::array<double, 4> best{};
  double best_score = std::numeric_limits<double>::infinity();
  double lr = 0.0;
  const auto sweep = [&](double center0, double center1, double center2,
                         double center3, double half, double step) {
    std::array<double, 4> centers{center0, center1, center2, center3};
    std::array<double, 4> u{};
    for (double u0 = centers[0] - half; u0 <= centers[0] + half + 1e-12;
         u0 += step) {
      u[0] = u0;
      for (double u1 = centers[1] - half; u1 <= centers[1] + half + 1e-12;
           u1 += step) {
        u[1] = u1;
        for (double u2 = centers[2] - half; u2 <= centers[2] + half + 1e-12;
             u2 += step) {
          u[2] = u2;
          for (double u3 = centers[3] - half; u3 <= centers[3] + half + 1e-12;
               u3 += step) {
            u[3] = u3;
            double cand_lr = 0.0;
            const double s = score(u, cand_lr);
            if (s < best_score) {
              best_score = s;
              best = u;
            }
          }
        }
      }
    }
  };
  sweep(0.0, 0.0, 0.0, 0.0, 1.2, 0.2);                    // 13^4 coarse pass
  sweep(best[0], best[1], best[2], best[3], 0.2, 0.04);   // 11^4 refinement
  sweep(best[0], best[1], best[2], best[3], 0.04, 0.008); // 11^4 polish
  score(best, lr);
  return lr;
}

Verdict criterion_bounded_centralizer() {
  const auto t0 = Clock::now();
  SweepSpec spec;
  spec.name = "zt2-flat-centralizer";
  const ExperimentResult res = run_experiment(spec);
  const double max_abs = res.summary.at("max_abs_c_t2").get<double>();
  double c4 = 0.0, worst_l1linf_dev = 0.0, c_l1linf_64 = 0.0;
  int rows_bad = 0;
  for (const auto& row : res.rows) {
    // columns: n, c_t2, abs_c_t2, spread_t2, eps_t2, c_l1linf, log_n, status
    const double n = std::stod(row.at(0));
    if (std::stod(row.at(2)) > 2.0) ++rows_bad;
    if (n == 4.0) c4 = std::stod(row.at(1));
    if (n == 64.0) c_l1linf_64 = std::stod(row.at(5));
    worst_l1linf_dev = std::max(
        worst_l1linf_dev, std::fabs(std::stod(row.at(5)) - std::log(n)));
  }
  const double grid_c4 = grid_search_flat4_logratio();
  const double cross_dev = std::fabs(grid_c4 - c4);
  const double secs = seconds_since(t0);
  Verdict v;
  v.ok = rows_bad == 0 && max_abs <= 2.0 && worst_l1linf_dev <= 1e-6 &&
         c_l1linf_64 > 4.0 && cross_dev <= 0.05 && secs < 600.0;
  v.detail = "max |c_n(T2)| " + fmt(max_abs) + " (bound 2), |c_n(l1linf) - "
             "log n| " + fmt(worst_l1linf_dev) + ", c_64(l1linf) " +
             fmt(c_l1linf_64) + " (> 4), grid-search c_4 " + fmt(grid_c4) +
             " vs solver " + fmt(c4) + " (dev " + fmt(cross_dev) +
             ", tol 0.05), " + fmt(secs) + "s (limit 600s)";
  return v;
}

// --- criterion 9: commutator inequality harness ----------------------------

Verdict criterion_commutator_harness(const std::filesystem::path& results_dir) {
  const Couple l1linf = Couple::l1_linf();
  double worst_ratio = 0.0;
  int bad = 0;

  std::vector<FiniteVector> flat;
  for (int j = 1; j <= 4; ++j) {
    FiniteVector e;
    e.set(j, 1.0);
    flat.push_back(e);
  }
  {
    const CommutatorReport rep =
        centralizer_commutator_check(l1linf, flat, 2.0, 1.5);
    worst_ratio = std::max(worst_ratio, rep.ratio);
    if (rep.ratio > 1.0) ++bad;
  }
  for (int i = 1; i <= 3; ++i) {
    auto rng = make_rng(31, static_cast<std::uint64_t>(i));
    const int n = static_cast<int>(uniform_int(rng, 2, 4));
    std::vector<FiniteVector> tuple;
    for (int j = 0; j < n; ++j) {
      tuple.push_back(random_dyadic_in(rng, 1, 6));
    }
    const CommutatorReport rep = centralizer_commutator_check(
        l1linf, tuple, std::sqrt(static_cast<double>(n)), 1.5);
    worst_ratio = std::max(worst_ratio, rep.ratio);
    if (rep.ratio > 1.0) ++bad;
  }

  // Derived-couple run: completes with finite diagnostics and is persisted.
  std::vector<FiniteVector> pair;
  for (int j = 4; j <= 5; ++j) {
    FiniteVector e;
    e.set(j, 1.0);
    pair.push_back(e);
  }
  const CommutatorReport t2rep = centralizer_commutator_check(
      Couple::t2_pair(), pair, std::sqrt(2.0), std::sqrt(2.0));
  const bool t2_finite = std::isfinite(t2rep.lhs) && std::isfinite(t2rep.rhs) &&
                         t2rep.rhs > 0.0;

  RunRecord rec;
  rec.command = "commutator-check";
  rec.params = {{"couple", t2rep.couple_tag},
                {"n", t2rep.n},
                {"a0", t2rep.a0},
                {"a1", t2rep.a1}};
  rec.seed = 0;
  rec.outputs = {{"lhs", t2rep.lhs},
                 {"rhs", t2rep.rhs},
                 {"gamma", t2rep.gamma},
                 {"rho", t2rep.rho},
                 {"ratio", t2rep.ratio},
                 {"status", "ok"}};
  append_run_record(results_dir.string(), rec);
  bool persisted = false;
  {
    std::ifstream f(results_dir / "runs.jsonl");
    std::string line, last;
    while (std::getline(f, line)) {
      if (!line.empty()) last = line;
    }
    if (!last.empty()) {
      const nlohmann::json j = nlohmann::json::parse(last);
      persisted = j.at("command") == "commutator-check" &&
                  j.at("outputs").at("lhs").get<double>() == t2rep.lhs;
    }
  }

  Verdict v;
  v.ok = bad == 0 && t2_finite && persisted;
  v.detail = "classical ratios <= 1 (worst " + fmt(worst_ratio) +
             ", failures " + std::to_string(bad) + "), derived run lhs " +
             fmt(t2rep.lhs) + " rhs " + fmt(t2rep.rhs) + " finite and " +
             (persisted ? "persisted" : "NOT PERSISTED");
  return v;
}

// --- criterion 10: reproducibility -----------------------------------------

Verdict criterion_reproducibility() {
  const std::string verify_a = to_json(verify_all()).dump();
  const std::string verify_b = to_json(verify_all()).dump();
  bool ok = verify_a == verify_b;
  std::string note = ok ? "verify-all identical" : "verify-all DIFFERS";
  for (const std::string name : {"kp-growth", "zt2-flat-centralizer"}) {
    SweepSpec spec;
    spec.name = name;
    const ExperimentResult a = run_experiment(spec);
    const ExperimentResult b = run_experiment(spec);
    const bool same =
        csv_text(a) == csv_text(b) && a.summary.dump() == b.summary.dump();
    ok = ok && same;
    note += ", " + name + (same ? " identical" : " DIFFERS");
  }
  Verdict v;
  v.ok = ok;
  v.detail = note + " (timestamps excluded by construction)";
  return v;
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  const std::filesystem::path scratch =
      std::filesystem::temp_directory_path() / "twistlab-acceptance";
  std::filesystem::remove_all(scratch);
  std::filesystem::create_directories(scratch);

  run_criterion(1, "recursive norm matches exhaustive reference",
                criterion_norm_exact);
  run_criterion(2, "norm property suite", criterion_norm_properties);
  run_criterion(3, "certified dual norm", criterion_dual_certified);
  run_criterion(4, "classical factorization and closed-form centralizer",
                criterion_l1linf_factorization);
  run_criterion(5, "derived-couple factorization", criterion_t2_factorization);
  run_criterion(6, "centralizer symmetries and selector derivative",
                criterion_symmetries_and_derivative);
  run_criterion(7, "flat sign averages and distance growth",
                criterion_flat_averages);
  run_criterion(8, "bounded centralizer on the derived couple",
                criterion_bounded_centralizer);
  run_criterion(9, "commutator inequality harness",
                [&] { return criterion_commutator_harness(scratch); });
  run_criterion(10, "byte-level reproducibility", criterion_reproducibility);

  std::printf("%d/10 criteria passed in %.2fs\n", 10 - g_failures,
              seconds_since(t0));
  return g_failures == 0 ? 0 : 1;
}
