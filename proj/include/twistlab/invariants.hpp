#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "json.hpp"
#include "twistlab/constants.hpp"
#include "twistlab/dual_bruteforce.hpp"
#include "twistlab/dual_norm.hpp"
#include "twistlab/errors.hpp"
#include "twistlab/experiments.hpp"
#include "twistlab/finite_vector.hpp"
#include "twistlab/interpolation.hpp"
#include "twistlab/json_io.hpp"
#include "twistlab/random.hpp"
#include "twistlab/tsirelson.hpp"
#include "twistlab/tsirelson_bruteforce.hpp"
#include "twistlab/twisted.hpp"

namespace twistlab {

// One named invariant check; detail carries the observed metrics so a failed
// run states what was measured, and a passed run documents the margins.
struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckResult> checks;

  bool passed() const {
    for (const auto& c : checks) {
      if (!c.passed) return false;
    }
    return true;
  }
};

inline nlohmann::json to_json(const CheckResult& c) {
  return nlohmann::json{
      {"name", c.name}, {"passed", c.passed}, {"detail", c.detail}};
}

inline nlohmann::json to_json(const SuiteResult& s) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : s.checks) checks.push_back(to_json(c));
  return nlohmann::json{
      {"suite", s.suite}, {"passed", s.passed()}, {"checks", checks}};
}

inline nlohmann::json to_json(const std::vector<SuiteResult>& all) {
  nlohmann::json suites = nlohmann::json::array();
  bool ok = true;
  for (const auto& s : all) {
    suites.push_back(to_json(s));
    ok = ok && s.passed();
  }
  return nlohmann::json{{"passed", ok}, {"suites", suites}};
}

namespace detail {

// The body receives the CheckResult to fill in; an escaped exception fails
// the check rather than the whole suite.
template <typename F>
void add_check(SuiteResult& suite, const std::string& name, F&& body) {
  CheckResult c;
  c.name = name;
  try {
    body(c);
  } catch (const std::exception& e) {
    c.passed = false;
    c.detail = std::string("exception: ") + e.what();
  }
  suite.checks.push_back(std::move(c));
}

inline FiniteVector random_vector(std::mt19937_64& rng, int max_index,
                                  double density = 0.4) {
  FiniteVector v;
  while (v.empty()) {
    for (int k = 1; k <= max_index; ++k) {
      if (uniform01(rng) < density) v.set(k, uniform_real(rng, -2.0, 2.0));
    }
  }
  return v;
}

inline FiniteVector random_unit_vector(std::mt19937_64& rng, int max_index,
                                       double density = 0.4) {
  FiniteVector v = random_vector(rng, max_index, density);
  v *= 1.0 / l2_norm(v);
  return v;
}

inline FiniteVector random_dyadic_vector(std::mt19937_64& rng, int max_index) {
  FiniteVector v;
  while (v.empty()) {
    for (int k = 1; k <= max_index; ++k) {
      if (uniform01(rng) < 0.5) v.set(k, dyadic_value(rng, 8, 3));
    }
  }
  return v;
}

inline FiniteVector flat_block(int lo, int hi) {  // 1 on [lo, hi]
  FiniteVector v;
  for (int k = lo; k <= hi; ++k) v.set(k, 1.0);
  return v;
}

}  // namespace detail

inline SuiteResult verify_sequence_core() {
  using detail::fmt_g17;
  SuiteResult suite;
  suite.suite = "sequence-core";

  detail::add_check(suite, "lp-norm-axioms", [](CheckResult& c) {
    auto rng = make_rng(7);
    double worst = 0.0;
    bool ok = true;
    for (int t = 0; t < 60; ++t) {
      const FiniteVector x = detail::random_vector(rng, 12);
      const FiniteVector y = detail::random_vector(rng, 12);
      FiniteVector sum = x;
      sum += y;
      FiniteVector dx = x;
      dx *= 2.0;
      for (Lp p : {Lp::l1, Lp::l2, Lp::linf}) {
        const double slack = lp_norm(x, p) + lp_norm(y, p) - lp_norm(sum, p);
        worst = std::min(worst, slack);
        ok = ok && slack >= -1e-12;
        ok = ok && lp_norm(dx, p) == 2.0 * lp_norm(x, p);  // dyadic: exact
        ok = ok && lp_norm(x.abs(), p) == lp_norm(x, p);
      }
    }
    c.passed = ok;
    c.detail = "worst triangle slack " + fmt_g17(worst);
  });

  detail::add_check(suite, "pairing-bilinearity", [](CheckResult& c) {
    auto rng = make_rng(8);
    double worst = 0.0;
    bool ok = true;
    for (int t = 0; t < 50; ++t) {
      const FiniteVector x = detail::random_vector(rng, 12);
      const FiniteVector y = detail::random_vector(rng, 12);
      const FiniteVector z = detail::random_vector(rng, 12);
      FiniteVector sum = x;
      sum += y;
      const double lin = std::fabs(dot(sum, z) - dot(x, z) - dot(y, z));
      worst = std::max(worst, lin);
      ok = ok && lin <= 1e-9;
      ok = ok && std::fabs(dot(x, y)) <= l2_norm(x) * l2_norm(y) * (1 + 1e-12);
    }
    c.passed = ok;
    c.detail = "worst bilinearity defect " + fmt_g17(worst);
  });

  detail::add_check(suite, "restriction-partition", [](CheckResult& c) {
    auto rng = make_rng(9);
    double worst = 0.0;
    bool ok = true;
    for (int t = 0; t < 40; ++t) {
      const FiniteVector x = detail::random_vector(rng, 16);
      const int mid = static_cast<int>(uniform_int(rng, 1, 15));
      const FiniteVector left = restrict(x, 1, mid);
      const FiniteVector right = restrict(x, mid + 1, 16);
      const double total = l2_norm(x) * l2_norm(x);
      const double split =
          l2_norm(left) * l2_norm(left) + l2_norm(right) * l2_norm(right);
      const double rel = std::fabs(total - split) / total;
      worst = std::max(worst, rel);
      ok = ok && rel <= 1e-12;
      ok = ok && restrict(left, 1, mid) == left;  // idempotent
    }
    c.passed = ok;
    c.detail = "worst partition defect " + fmt_g17(worst);
  });

  detail::add_check(suite, "json-roundtrip", [](CheckResult& c) {
    auto rng = make_rng(10);
    bool ok = true;
    for (int t = 0; t < 20; ++t) {
      const FiniteVector x = detail::random_vector(rng, 20);
      ok = ok && vector_from_json(to_json(x)) == x;  // bitwise
    }
    c.passed = ok;
    c.detail = ok ? "20 vectors bitwise stable" : "roundtrip mismatch";
  });

  return suite;
}

inline SuiteResult verify_tsirelson() {
  using detail::fmt_g17;
  SuiteResult suite;
  suite.suite = "tsirelson";

  detail::add_check(suite, "golden-values", [](CheckResult& c) {
    bool ok = tsirelson_norm(detail::flat_block(3, 6)).value == 1.5;
    for (int n = 2; n <= 4; ++n) {
      ok = ok && tsirelson_norm(detail::flat_block(n, 2 * n - 1)).value ==
                     static_cast<double>(n) / 2.0;
    }
    ok = ok && tsirelson_norm(detail::flat_block(1, 2)).value == 1.0;
    ok = ok && tsirelson_norm(detail::flat_block(5, 5)).value == 1.0;
    c.passed = ok;
    c.detail = ok ? "interval and singleton goldens exact" : "golden mismatch";
  });

  detail::add_check(suite, "bruteforce-agreement", [](CheckResult& c) {
    auto rng = make_rng(11);
    int mismatches = 0;
    for (int t = 0; t < 100; ++t) {
      const FiniteVector v = detail::random_dyadic_vector(rng, 8);
      if (tsirelson_norm(v).value != tsirelson_norm_bruteforce(v)) {
        ++mismatches;
      }
    }
    c.passed = mismatches == 0;
    c.detail = "mismatches " + std::to_string(mismatches) + "/100 (exact)";
  });

  detail::add_check(suite, "unconditionality", [](CheckResult& c) {
    auto rng = make_rng(12);
    int mismatches = 0;
    for (int t = 0; t < 50; ++t) {
      const FiniteVector v = detail::random_vector(rng, 8);
      FiniteVector flipped;
      for (const auto& [k, x] : v.entries()) {
        flipped.set(k, uniform01(rng) < 0.5 ? -x : x);
      }
      if (tsirelson_norm(v).value != tsirelson_norm(flipped).value) {
        ++mismatches;
      }
    }
    c.passed = mismatches == 0;
    c.detail = "sign-flip mismatches " + std::to_string(mismatches) + "/50";
  });

  detail::add_check(suite, "restriction-monotone", [](CheckResult& c) {
    auto rng = make_rng(13);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
      const FiniteVector v = detail::random_vector(rng, 10);
      const int lo = static_cast<int>(uniform_int(rng, 1, 5));
      const int hi = static_cast<int>(uniform_int(rng, lo, 10));
      const double whole = tsirelson_norm(v).value;
      const double part = tsirelson_norm(restrict(v, lo, hi)).value;
      worst = std::max(worst, part - whole);
    }
    c.passed = worst <= 1e-12;
    c.detail = "worst restriction excess " + fmt_g17(worst);
  });

  detail::add_check(suite, "norm-sandwich", [](CheckResult& c) {
    auto rng = make_rng(14);
    bool ok = true;
    for (int t = 0; t < 100; ++t) {
      const FiniteVector v = detail::random_vector(rng, 10);
      const double tn = tsirelson_norm(v).value;
      ok = ok && sup_norm(v) <= tn * (1 + 1e-12) &&
           tn <= l1_norm(v) * (1 + 1e-12);
    }
    c.passed = ok;
    c.detail = ok ? "sup <= T <= l1 on 100 probes" : "sandwich violated";
  });

  detail::add_check(suite, "witness-validity", [](CheckResult& c) {
    auto rng = make_rng(15);
    double worst_eq = 0.0, worst_feas = 0.0;
    for (int t = 0; t < 50; ++t) {
      const FiniteVector v = detail::random_vector(rng, 10);
      const NormResult r = tsirelson_norm(v);
      const FiniteVector w = witness_functional(r.witness);
      worst_eq = std::max(worst_eq, std::fabs(dot(w, v.abs()) - r.value));
      const FiniteVector z = detail::random_vector(rng, 10);
      worst_feas = std::max(
          worst_feas, dot(w, z.abs()) - tsirelson_norm(z).value);
    }
    c.passed = worst_eq <= 1e-12 && worst_feas <= 1e-12;
    c.detail = "worst value defect " + fmt_g17(worst_eq) +
               ", worst feasibility excess " + fmt_g17(worst_feas);
  });

  detail::add_check(suite, "t2-consistency", [](CheckResult& c) {
    auto rng = make_rng(16);
    bool ok = true;
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      const FiniteVector v = detail::random_vector(rng, 10);
      const double t2 = tsirelson2_norm(v).value;
      ok = ok && t2 == std::sqrt(tsirelson_norm(squared(v)).value);
      FiniteVector dv = v;
      dv *= 2.0;
      const double rel =
          std::fabs(tsirelson2_norm(dv).value - 2.0 * t2) / (2.0 * t2);
      worst = std::max(worst, rel);
      ok = ok && rel <= 1e-12;
    }
    c.passed = ok;
    c.detail = "worst homogeneity defect " + fmt_g17(worst);
  });

  return suite;
}

inline SuiteResult verify_dual_norm() {
  using detail::fmt_g17;
  SuiteResult suite;
  suite.suite = "dual-norm";

  detail::add_check(suite, "bruteforce-agreement", [](CheckResult& c) {
    auto rng = make_rng(17);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      const FiniteVector y = detail::random_vector(rng, 6, 0.6);
      const DualCertificate cert = t2_dual_norm(y);
      const double brute = dual_norm_bruteforce(y);
      worst = std::max(worst,
                       std::fabs(cert.value - brute) / std::max(1.0, brute));
      worst = std::max(worst, cert.gap);
    }
    c.passed = worst <= 1e-6;
    c.detail = "worst relative deviation or gap " + fmt_g17(worst);
  });

  detail::add_check(suite, "certificate-sidedness", [](CheckResult& c) {
    auto rng = make_rng(18);
    bool ok = true;
    for (int t = 0; t < 20; ++t) {
      const FiniteVector y = detail::random_vector(rng, 8, 0.5);
      const DualCertificate cert = t2_dual_norm(y);
      ok = ok && cert.lower <= cert.value + 1e-12 * std::max(1.0, cert.value);
      // gap is clamped at zero when primal rounding noses past value
      ok = ok && (cert.gap == cert.value - cert.lower ||
                  cert.gap == std::max(0.0, cert.value - cert.lower));
      ok = ok && (cert.quality == "certified" || cert.quality == "lower-bound");
    }
    c.passed = ok;
    c.detail = ok ? "lower <= value, gap consistent" : "certificate broken";
  });

  detail::add_check(suite, "hoelder-pairing", [](CheckResult& c) {
    auto rng = make_rng(19);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
      const FiniteVector x = detail::random_vector(rng, 8, 0.5);
      const FiniteVector y = detail::random_vector(rng, 8, 0.5);
      const double bound =
          tsirelson2_norm(x).value * t2_dual_norm(y).value;
      const double excess = std::fabs(dot(x, y)) - bound * (1 + 1e-9);
      worst = std::max(worst, excess);
    }
    c.passed = worst <= 0.0;
    c.detail = "worst pairing excess " + fmt_g17(worst);
  });

  detail::add_check(suite, "scale-equivariance", [](CheckResult& c) {
    auto rng = make_rng(20);
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      const FiniteVector y = detail::random_vector(rng, 8, 0.5);
      FiniteVector sy = y;
      sy *= 3.0;
      const double a = t2_dual_norm(sy).value;
      const double b = 3.0 * t2_dual_norm(y).value;
      worst = std::max(worst, std::fabs(a - b) / b);
    }
    c.passed = worst <= 1e-9;
    c.detail = "worst relative defect " + fmt_g17(worst);
  });

  return suite;
}

inline SuiteResult verify_interpolation() {
  using detail::fmt_g17;
  SuiteResult suite;
  suite.suite = "interpolation";

  detail::add_check(suite, "l1linf-closed-form", [](CheckResult& c) {
    auto rng = make_rng(21);
    const Couple couple = Couple::l1_linf();
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      const FiniteVector y = detail::random_unit_vector(rng, 12);
      const Factorization f = lozanovskii_factorize(couple, y);
      for (int k : y.support()) {
        const double ak = y.at(k) * y.at(k);  // unit vector: a = y^2, b = 1
        worst = std::max(worst, std::fabs(f.a.at(k) - ak) / ak);
        worst = std::max(worst, std::fabs(f.b.at(k) - 1.0));
      }
    }
    c.passed = worst <= 1e-6;
    c.detail = "worst coordinate deviation " + fmt_g17(worst);
  });

  detail::add_check(suite, "kalton-peck-agreement", [](CheckResult& c) {
    auto rng = make_rng(22);
    const Couple couple = Couple::l1_linf();
    double worst_omega = 0.0, worst_eps = 0.0;
    for (int t = 0; t < 100; ++t) {
      const FiniteVector y = detail::random_unit_vector(rng, 12);
      const CentralizerResult r = centralizer_detail(couple, y);
      worst_eps = std::max(worst_eps, r.factorization.eps_achieved);
      const FiniteVector kp = kalton_peck_omega(y, PhiSpec::linear(2.0));
      FiniteVector diff = r.omega;
      diff -= kp;
      worst_omega = std::max(worst_omega, sup_norm(diff));
    }
    c.passed = worst_omega <= 1e-6 && worst_eps <= 1e-6;
    c.detail = "worst omega deviation " + fmt_g17(worst_omega) +
               ", worst eps " + fmt_g17(worst_eps);
  });

  detail::add_check(suite, "product-identity-bitwise", [](CheckResult& c) {
    auto rng = make_rng(23);
    Couple l1 = Couple::l1_linf();
    Couple t2 = Couple::t2_pair();
    int bad = 0;
    double worst_balance = 0.0;
    for (int t = 0; t < 10; ++t) {
      FiniteVector y;
      while (y.empty()) {
        for (int k = 4; k <= 12; ++k) {
          if (uniform01(rng) < 0.5) y.set(k, uniform_real(rng, -2.0, 2.0));
        }
      }
      for (Couple* cp : {&l1, &t2}) {
        const Factorization f = lozanovskii_factorize(*cp, y);
        for (const auto& [k, x] : y.entries()) {
          if (f.a.at(k) * f.b.at(k) != x * x) ++bad;
        }
        const double n0 = cp->x0->evaluate(f.a);
        const double n1 = cp->x1->evaluate(f.b);
        worst_balance = std::max(worst_balance, std::fabs(n0 - n1) / n0);
      }
    }
    // balance slack 1e-6: the bitwise-product repair may move one coordinate
    // of a by ~1e-7 relative after the exact-balance rescale
    c.passed = bad == 0 && worst_balance <= 1e-6;
    c.detail = "non-exact coordinates " + std::to_string(bad) +
               ", worst balance defect " + fmt_g17(worst_balance);
  });

  detail::add_check(suite, "sign-equivariance-homogeneity", [](CheckResult& c) {
    auto rng = make_rng(24);
    const Couple couple = Couple::l1_linf();
    bool ok = true;
    for (int t = 0; t < 10; ++t) {
      const FiniteVector y = detail::random_vector(rng, 10);
      const FiniteVector base = centralizer(couple, y);
      FiniteVector flips, flipped;
      for (const auto& [k, x] : y.entries()) {
        const double s = uniform01(rng) < 0.5 ? -1.0 : 1.0;
        flips.set(k, s);
        flipped.set(k, s * x);
      }
      ok = ok && centralizer(couple, flipped) == hadamard(flips, base);
      FiniteVector sy = y;
      sy *= 4.0;
      FiniteVector sb = base;
      sb *= 4.0;
      ok = ok && centralizer(couple, sy) == sb;  // dyadic scaling: bitwise
    }
    c.passed = ok;
    c.detail = ok ? "sign flips and dyadic scalings bitwise exact"
                  : "equivariance broken";
  });

  detail::add_check(suite, "centralizer-bound-corpus", [](CheckResult& c) {
    auto rng = make_rng(25);
    const Couple couple = Couple::l1_linf();
    double c_emp = 0.0;
    for (int t = 0; t < 200; ++t) {
      const FiniteVector x = detail::random_vector(rng, 10);
      FiniteVector a;  // multiplier, sup norm <= 1, bounded away from zero
      for (int k : x.support()) {
        const double mag = uniform_real(rng, 0.05, 1.0);
        a.set(k, uniform01(rng) < 0.5 ? -mag : mag);
      }
      const FiniteVector lhs1 = centralizer(couple, hadamard(a, x));
      const FiniteVector lhs2 = hadamard(a, centralizer(couple, x));
      FiniteVector diff = lhs1;
      diff -= lhs2;
      c_emp = std::max(c_emp, l2_norm(diff) / l2_norm(x));
    }
    c.passed = c_emp <= 10.0;
    c.detail = "empirical commutation constant " + fmt_g17(c_emp) +
               " over 200 pairs";
  });

  detail::add_check(suite, "selector-derivative-fd", [](CheckResult& c) {
    auto rng = make_rng(26);
    const Couple couple = Couple::l1_linf();
    double err3 = 0.0, err4 = 0.0;
    for (int t = 0; t < 10; ++t) {
      const FiniteVector y = detail::random_unit_vector(rng, 10);
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
    c.passed = order >= 1.7 && err3 <= 1e-3;
    c.detail = "max err(1e-3) " + fmt_g17(err3) + ", max err(1e-4) " +
               fmt_g17(err4) + ", observed order " + fmt_g17(order);
  });

  detail::add_check(suite, "selector-norm-chain", [](CheckResult& c) {
    auto rng = make_rng(27);
    Couple l1 = Couple::l1_linf();
    Couple t2 = Couple::t2_pair();
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      FiniteVector y;
      while (y.empty()) {
        for (int k = 4; k <= 12; ++k) {
          if (uniform01(rng) < 0.5) y.set(k, uniform_real(rng, -2.0, 2.0));
        }
      }
      for (Couple* cp : {&l1, &t2}) {
        const PowerSelector s = make_power_selector(*cp, y);
        const SelectorNorms norms = selector_norms(s, *cp);
        const double scale = std::max(1.0, norms.strip_sup_norm);
        worst = std::max(worst,
                         (l2_norm(y) - norms.interpolation_norm) / scale);
        worst = std::max(
            worst, (norms.interpolation_norm - norms.strip_sup_norm) / scale);
      }
    }
    c.passed = worst <= 1e-9;
    c.detail = "worst chain violation " + fmt_g17(worst);
  });

  detail::add_check(suite, "theta-tilde", [](CheckResult& c) {
    c.passed = Couple::l1_linf().theta_tilde() == 2.0 &&
               Couple::t2_pair().theta_tilde() == 2.0;
    c.detail = "midpoint couples have theta_tilde 2";
  });

  return suite;
}

inline SuiteResult verify_twisted() {
  using detail::fmt_g17;
  SuiteResult suite;
  suite.suite = "twisted";

  detail::add_check(suite, "quasinorm-golden", [](CheckResult& c) {
    TwistedSpace z2(SpaceSpec::kalton_peck_space(PhiSpec::linear(1.0)));
    const TwistedVector flat{FiniteVector{}, detail::flat_block(1, 4)};
    const double golden = 2.0 * std::log(2.0) + 2.0;
    const double got = z2.quasi_norm(flat);
    bool ok = std::fabs(got - golden) <= 1e-12;
    auto rng = make_rng(28);
    for (int t = 0; t < 10; ++t) {
      const FiniteVector x = detail::random_vector(rng, 10);
      ok = ok && z2.quasi_norm(TwistedVector{x, FiniteVector{}}) == l2_norm(x);
    }
    c.passed = ok;
    c.detail = "flat block value " + fmt_g17(got) + " vs " + fmt_g17(golden);
  });

  detail::add_check(suite, "sign-flip-invariance", [](CheckResult& c) {
    TwistedSpace z2(SpaceSpec::kalton_peck_space(PhiSpec::linear(1.0)));
    TwistedSpace zt2(SpaceSpec::derived_t2(4));
    auto rng = make_rng(29);
    bool ok = true;
    for (int t = 0; t < 5; ++t) {
      FiniteVector y;
      while (y.empty()) {
        for (int k = 4; k <= 10; ++k) {
          if (uniform01(rng) < 0.5) y.set(k, uniform_real(rng, -2.0, 2.0));
        }
      }
      FiniteVector flipped;
      for (const auto& [k, x] : y.entries()) {
        flipped.set(k, uniform01(rng) < 0.5 ? -x : x);
      }
      ok = ok && z2.quasi_norm(TwistedVector{FiniteVector{}, y}) ==
                     z2.quasi_norm(TwistedVector{FiniteVector{}, flipped});
      ok = ok && zt2.quasi_norm(TwistedVector{FiniteVector{}, y}) ==
                     zt2.quasi_norm(TwistedVector{FiniteVector{}, flipped});
    }
    c.passed = ok;
    c.detail = ok ? "bitwise equal under sign flips" : "invariance broken";
  });

  detail::add_check(suite, "quasi-triangle", [](CheckResult& c) {
    TwistedSpace z2(SpaceSpec::kalton_peck_space(PhiSpec::linear(1.0)));
    auto rng = make_rng(30);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      const TwistedVector u{detail::random_vector(rng, 8),
                            detail::random_vector(rng, 8)};
      const TwistedVector v{detail::random_vector(rng, 8),
                            detail::random_vector(rng, 8)};
      const double lhs = z2.quasi_norm(u + v);
      const double rhs = z2.quasi_norm(u) + z2.quasi_norm(v);
      worst = std::max(worst, lhs / rhs);
    }
    c.passed = worst <= 8.0;
    c.detail = "worst quasi-triangle ratio " + fmt_g17(worst);
  });

  detail::add_check(suite, "duality-pairing-bound", [](CheckResult& c) {
    TwistedSpace z2(SpaceSpec::kalton_peck_space(PhiSpec::linear(1.0)));
    auto rng = make_rng(31);
    double lambda = 0.0;
    for (int t = 0; t < 50; ++t) {
      const TwistedVector u{detail::random_vector(rng, 8),
                            detail::random_vector(rng, 8)};
      const TwistedVector v{detail::random_vector(rng, 8),
                            detail::random_vector(rng, 8)};
      lambda = std::max(lambda, std::fabs(pairing(u, v)) /
                                    (z2.quasi_norm(u) * z2.quasi_norm(v)));
    }
    c.passed = lambda < 50.0;
    c.detail = "empirical pairing constant " + fmt_g17(lambda);
  });

  detail::add_check(suite, "flat-averages", [](CheckResult& c) {
    TwistedSpace z2(SpaceSpec::kalton_peck_space(PhiSpec::linear(1.0)));
    double worst = 0.0, worst_dev = 0.0;
    for (int n : {2, 4, 8}) {
      std::vector<TwistedVector> tuple;
      for (int j = 1; j <= n; ++j) tuple.push_back(TwistedVector::second_slot(j));
      const RademacherResult r = rademacher_average(z2, tuple);
      const double expect =
          std::sqrt(static_cast<double>(n)) *
          (1.0 + std::log(std::sqrt(static_cast<double>(n))));
      worst = std::max(worst, std::fabs(r.mean - expect));
      worst_dev = std::max(worst_dev, r.stddev);
    }
    c.passed = worst <= 1e-12 && worst_dev <= 1e-12;
    c.detail = "worst mean deviation " + fmt_g17(worst) +
               ", worst stddev " + fmt_g17(worst_dev);
  });

  detail::add_check(suite, "montecarlo-determinism", [](CheckResult& c) {
    TwistedSpace z2(SpaceSpec::kalton_peck_space(PhiSpec::linear(1.0)));
    std::vector<TwistedVector> tuple;
    for (int j = 1; j <= 4; ++j) tuple.push_back(TwistedVector::second_slot(j));
    const RademacherResult exact = rademacher_average(z2, tuple);
    const RademacherResult mc1 =
        rademacher_average(z2, tuple, AverageMode::montecarlo, 4096, 42);
    const RademacherResult mc2 =
        rademacher_average(z2, tuple, AverageMode::montecarlo, 4096, 42);
    const bool same = mc1.mean == mc2.mean && mc1.stddev == mc2.stddev;
    const double dev = std::fabs(mc1.mean - exact.mean);
    c.passed = same && dev <= 6.0 * mc1.stderr_of_mean;
    c.detail = "seeded repeat bitwise " + std::string(same ? "yes" : "no") +
               ", |mc - exact| " + fmt_g17(dev) + " vs 6*stderr " +
               fmt_g17(6.0 * mc1.stderr_of_mean);
  });

  detail::add_check(suite, "zt2-flat-value", [](CheckResult& c) {
    TwistedSpace zt2(SpaceSpec::derived_t2(4));
    const TwistedVector flat{FiniteVector{}, detail::flat_block(4, 7)};
    const double golden = 2.0 * std::log(2.0) + 2.0;
    const double got = zt2.quasi_norm(flat);
    const double rho = zt2.rho_bound();
    c.passed = std::fabs(got - golden) <= 1e-3 && rho >= 1.0 && rho <= 1.5;
    c.detail = "flat block value " + fmt_g17(got) + " vs " + fmt_g17(golden) +
               ", rho bound " + fmt_g17(rho);
  });

  detail::add_check(suite, "tail-support-enforcement", [](CheckResult& c) {
    TwistedSpace zt2(SpaceSpec::derived_t2(4));
    bool threw_y = false, threw_x = false, threw_tail = false;
    try {
      zt2.quasi_norm(TwistedVector::second_slot(3));
    } catch (const SupportViolationError&) {
      threw_y = true;
    }
    try {
      zt2.quasi_norm(TwistedVector::first_slot(1));
    } catch (const SupportViolationError&) {
      threw_x = true;
    }
    try {
      SpaceSpec::derived_t2(0);
    } catch (const InvalidRangeError&) {
      threw_tail = true;
    }
    const bool ok_inside = zt2.quasi_norm(TwistedVector::first_slot(4)) == 1.0;
    c.passed = threw_y && threw_x && threw_tail && ok_inside;
    c.detail = "support violations rejected, admissible coordinate accepted";
  });

  return suite;
}

inline SuiteResult verify_constants() {
  using detail::fmt_g17;
  SuiteResult suite;
  suite.suite = "constants";

  detail::add_check(suite, "iterated-log-goldens", [](CheckResult& c) {
    bool ok = std::fabs(iterated_log(1, std::exp(1.0)) - 1.0) <= 1e-15;
    ok = ok &&
         std::fabs(iterated_log(2, std::exp(std::exp(1.0))) - 1.0) <= 1e-15;
    const double v = iterated_log(2, 16.0);
    ok = ok && std::fabs(v - 1.0197814405382262) <= 1e-14;
    int thrown = 0;
    for (auto [m, x] : std::vector<std::pair<int, double>>{
             {2, std::exp(1.0)}, {3, 2.0}, {2, 0.0}}) {
      try {
        iterated_log(m, x);
      } catch (const Error&) {
        ++thrown;
      }
    }
    c.passed = ok && thrown == 3;
    c.detail = "log(log 16) = " + fmt_g17(v) + ", domain errors " +
               std::to_string(thrown) + "/3";
  });

  detail::add_check(suite, "hilbert-type-cotype", [](CheckResult& c) {
    const auto model = SequenceSpaceModel::l2();
    SearchOptions opts;
    opts.restarts = 2;
    double worst = 0.0;
    for (int n : {2, 3}) {
      worst = std::max(worst, std::fabs(type2_lower(model, n, opts).value - 1));
      worst =
          std::max(worst, std::fabs(cotype2_lower(model, n, opts).value - 1));
    }
    c.passed = worst <= 1e-9;
    c.detail = "worst deviation from 1: " + fmt_g17(worst);
  });

  detail::add_check(suite, "sup-model-cotype", [](CheckResult& c) {
    const auto model = SequenceSpaceModel::linf();
    SearchOptions opts;
    opts.restarts = 2;
    const auto est = cotype2_lower(model, 2, opts);
    const double recomputed = cotype_ratio(model, est.witnesses);
    const bool ok = std::fabs(est.value - std::sqrt(2.0)) <= 1e-9 &&
                    std::fabs(recomputed - est.value) <=
                        1e-12 * std::fabs(est.value);
    c.passed = ok;
    c.detail = "cotype estimate " + fmt_g17(est.value) +
               ", witness recompute " + fmt_g17(recomputed);
  });

  detail::add_check(suite, "kp-type-estimate", [](CheckResult& c) {
    auto model = TwistedSpaceModel::make(
        SpaceSpec::kalton_peck_space(PhiSpec::linear(1.0)));
    SearchOptions opts;
    opts.restarts = 2;
    const auto est = type2_lower(model, 4, opts);
    const double floor_val = 1.0 + std::log(2.0);
    const double recomputed = type_ratio(model, est.witnesses);
    c.passed = est.value >= floor_val - 1e-12 &&
               std::fabs(recomputed - est.value) <= 1e-12 * est.value;
    c.detail = "type-2 estimate " + fmt_g17(est.value) + " vs floor " +
               fmt_g17(floor_val);
  });

  detail::add_check(suite, "distance-growth", [](CheckResult& c) {
    auto model = TwistedSpaceModel::make(
        SpaceSpec::kalton_peck_space(PhiSpec::linear(1.0)));
    std::vector<double> logs, values;
    double worst = 0.0, prev = 0.0;
    bool monotone = true;
    for (int n : {2, 4, 8, 16}) {
      std::vector<TwistedVector> tuple;
      for (int j = 1; j <= n; ++j) tuple.push_back(TwistedVector::second_slot(j));
      const double value = distance_lower(model, tuple);
      const double expect = 1.0 + 0.5 * std::log(static_cast<double>(n));
      worst = std::max(worst, std::fabs(value - expect));
      monotone = monotone && value > prev;
      prev = value;
      logs.push_back(std::log(static_cast<double>(n)));
      values.push_back(value);
    }
    const auto [slope, intercept] = detail::least_squares(logs, values);
    c.passed = worst <= 1e-12 && monotone &&
               std::fabs(slope - 0.5) <= 1e-9;
    c.detail = "worst deviation " + fmt_g17(worst) + ", slope " +
               fmt_g17(slope) + ", intercept " + fmt_g17(intercept);
  });

  detail::add_check(suite, "kwapien-combination", [](CheckResult& c) {
    ConstantEstimate<FiniteVector> a, b;
    a.kind = ConstantKind::type2;
    b.kind = ConstantKind::cotype2;
    a.n = b.n = 2;
    a.space = b.space = "l2";
    a.value = b.value = 1.0;
    const DistanceBounds d = kwapien_combination(a, b);
    const double golden = 5.0132565492620005;  // 2 sqrt(2 pi)
    bool ok = std::fabs(d.upper_indicative - golden) <= 1e-14 * golden;
    a.value = 2.0;
    ok = ok && kwapien_combination(a, b).upper_indicative > d.upper_indicative;
    bool threw = false;
    b.n = 3;
    try {
      kwapien_combination(a, b);
    } catch (const MismatchedInputsError&) {
      threw = true;
    }
    c.passed = ok && threw;
    c.detail = "Hilbert combination " + fmt_g17(d.upper_indicative) +
               ", mismatch rejected";
  });

  detail::add_check(suite, "commutator-fixed-tuples", [](CheckResult& c) {
    const Couple couple = Couple::l1_linf();
    FiniteVector b1;
    b1.set(2, 0.75);
    b1.set(5, -1.5);
    const CommutatorReport single = centralizer_commutator_check(
        couple, {b1}, std::sqrt(2.0), std::sqrt(2.0));
    bool ok = single.lhs == 0.0;
    std::vector<FiniteVector> flat;
    for (int j = 1; j <= 4; ++j) {
      FiniteVector e;
      e.set(j, 1.0);
      flat.push_back(e);
    }
    // a1 = 1.5 is the four-vector sup-norm search value (aligned Hadamard
    // rows); a search lower bound only tightens the asserted inequality.
    const CommutatorReport rep =
        centralizer_commutator_check(couple, flat, 2.0, 1.5);
    ok = ok && rep.ratio <= 1.0;
    ok = ok && rep.gamma == rep.theta_tilde * rep.rho * std::sqrt(rep.a0) *
                                std::sqrt(rep.a1);
    c.passed = ok;
    c.detail = "single-vector lhs " + fmt_g17(single.lhs) +
               ", flat tuple ratio " + fmt_g17(rep.ratio);
  });

  detail::add_check(suite, "derived-type-bound", [](CheckResult& c) {
    TwistedSpace z2(SpaceSpec::kalton_peck_space(PhiSpec::linear(1.0)));
    std::vector<TwistedVector> first;
    for (int j = 1; j <= 3; ++j) first.push_back(TwistedVector::first_slot(j));
    const DerivedTypeReport r1 =
        derived_type_bound_check(z2, first, 1.0, 1.0, 1.0);
    bool ok = std::fabs(r1.lhs - 1.0) <= 1e-12 && r1.lhs < r1.rhs;
    std::vector<TwistedVector> flat;
    for (int j = 1; j <= 4; ++j) flat.push_back(TwistedVector::second_slot(j));
    const DerivedTypeReport r2 =
        derived_type_bound_check(z2, flat, 2.0, 1.5, 1.0);
    ok = ok && r2.ratio <= 1.0;
    c.passed = ok;
    c.detail = "first-slot lhs " + fmt_g17(r1.lhs) + ", flat ratio " +
               fmt_g17(r2.ratio);
  });

  return suite;
}

// Fixed-tuple commutator harness; the l1/linf rows carry the inequality, the
// t2 row is diagnostic (the l2 midpoint is only equivalent to the exact
// interpolation norm there, so completion is the contract).
inline SuiteResult verify_commutator_harness() {
  using detail::fmt_g17;
  SuiteResult suite;
  suite.suite = "commutator-harness";
  const Couple couple = Couple::l1_linf();

  detail::add_check(suite, "flat-tuple-n4", [&](CheckResult& c) {
    std::vector<FiniteVector> flat;
    for (int j = 1; j <= 4; ++j) {
      FiniteVector e;
      e.set(j, 1.0);
      flat.push_back(e);
    }
    const CommutatorReport rep =
        centralizer_commutator_check(couple, flat, 2.0, 1.5);
    c.passed = rep.ratio <= 1.0;
    c.detail = "lhs " + fmt_g17(rep.lhs) + ", rhs " + fmt_g17(rep.rhs) +
               ", gamma " + fmt_g17(rep.gamma) + ", ratio " +
               fmt_g17(rep.ratio);
  });

  for (int i = 1; i <= 3; ++i) {
    detail::add_check(
        suite, "random-dyadic-tuple-" + std::to_string(i), [&, i](CheckResult& c) {
          auto rng = make_rng(31, static_cast<std::uint64_t>(i));
          const int n = static_cast<int>(uniform_int(rng, 2, 4));
          std::vector<FiniteVector> tuple;
          for (int j = 0; j < n; ++j) {
            tuple.push_back(detail::random_dyadic_vector(rng, 6));
          }
          // a0 = sqrt(n) is exact for l1 (disjoint units); a1 = 1.5 is the
          // n <= 4 sup-norm search value, a lower bound that only tightens
          // the asserted inequality.
          const CommutatorReport rep = centralizer_commutator_check(
              couple, tuple, std::sqrt(static_cast<double>(n)), 1.5);
          c.passed = rep.ratio <= 1.0;
          c.detail = "n " + std::to_string(rep.n) + ", lhs " +
                     fmt_g17(rep.lhs) + ", rhs " + fmt_g17(rep.rhs) +
                     ", ratio " + fmt_g17(rep.ratio);
        });
  }

  detail::add_check(suite, "t2-diagnostic", [](CheckResult& c) {
    const Couple t2 = Couple::t2_pair();
    std::vector<FiniteVector> pair;
    for (int j = 4; j <= 5; ++j) {
      FiniteVector e;
      e.set(j, 1.0);
      pair.push_back(e);
    }
    const CommutatorReport rep = centralizer_commutator_check(
        t2, pair, std::sqrt(2.0), std::sqrt(2.0));
    c.passed = std::isfinite(rep.lhs) && std::isfinite(rep.rhs) &&
               rep.rhs > 0.0;
    c.detail = "completed; lhs " + fmt_g17(rep.lhs) + ", rhs " +
               fmt_g17(rep.rhs) + ", ratio " + fmt_g17(rep.ratio) +
               " (diagnostic only)";
  });

  return suite;
}

// Derived-space type-bound harness on fixed tuples; reports both sides of
// the quadratic-average inequality for twisted vectors.
inline SuiteResult verify_derived_type_harness() {
  using detail::fmt_g17;
  SuiteResult suite;
  suite.suite = "derived-type-harness";

  detail::add_check(suite, "first-slot-tuple", [](CheckResult& c) {
    TwistedSpace z2(SpaceSpec::kalton_peck_space(PhiSpec::linear(1.0)));
    std::vector<TwistedVector> tuple;
    for (int j = 1; j <= 3; ++j) tuple.push_back(TwistedVector::first_slot(j));
    const DerivedTypeReport rep =
        derived_type_bound_check(z2, tuple, 1.0, 1.0, 1.0);
    c.passed = std::fabs(rep.lhs - 1.0) <= 1e-12 && rep.lhs < rep.rhs;
    c.detail = "lhs " + fmt_g17(rep.lhs) + " far below rhs " +
               fmt_g17(rep.rhs);
  });

  detail::add_check(suite, "kp-flat-tuple-n4", [](CheckResult& c) {
    TwistedSpace z2(SpaceSpec::kalton_peck_space(PhiSpec::linear(1.0)));
    std::vector<TwistedVector> tuple;
    for (int j = 1; j <= 4; ++j) tuple.push_back(TwistedVector::second_slot(j));
    const DerivedTypeReport rep =
        derived_type_bound_check(z2, tuple, 2.0, 1.5, 1.0);
    c.passed = rep.ratio <= 1.0;
    c.detail = "lhs " + fmt_g17(rep.lhs) + ", rhs " + fmt_g17(rep.rhs) +
               ", ratio " + fmt_g17(rep.ratio);
  });

  detail::add_check(suite, "zt2-diagnostic", [](CheckResult& c) {
    TwistedSpace zt2(SpaceSpec::derived_t2(4));
    std::vector<TwistedVector> tuple;
    for (int j = 4; j <= 5; ++j) tuple.push_back(TwistedVector::first_slot(j));
    const DerivedTypeReport rep =
        derived_type_bound_check(zt2, tuple, std::sqrt(2.0), std::sqrt(2.0),
                                 1.0);
    c.passed = std::isfinite(rep.lhs) && rep.rhs > 0.0;
    c.detail = "completed; lhs " + fmt_g17(rep.lhs) + ", rhs " +
               fmt_g17(rep.rhs) + " (diagnostic only)";
  });

  return suite;
}

inline SuiteResult verify_suite(const std::string& name) {
  if (name == "sequence-core") return verify_sequence_core();
  if (name == "tsirelson") return verify_tsirelson();
  if (name == "dual-norm") return verify_dual_norm();
  if (name == "interpolation") return verify_interpolation();
  if (name == "twisted") return verify_twisted();
  if (name == "constants") return verify_constants();
  if (name == "lemma-yo") return verify_commutator_harness();
  if (name == "prop22") return verify_derived_type_harness();
  throw InvalidRangeError("unknown verification suite: " + name);
}

inline std::vector<SuiteResult> verify_all() {
  return {verify_sequence_core(), verify_tsirelson(),
          verify_dual_norm(),     verify_interpolation(),
          verify_twisted(),       verify_constants(),
          verify_commutator_harness(), verify_derived_type_harness()};
}

}  // namespace twistlab
