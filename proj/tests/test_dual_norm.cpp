#include "twistlab/dual_norm.hpp"

#include <cmath>

#include "catch_amalgamated.hpp"
#include "twistlab/dual_bruteforce.hpp"
#include "twistlab/random.hpp"

using namespace twistlab;

namespace {

FiniteVector random_dyadic(std::mt19937_64& rng, int lo, int hi, int max_pts) {
  FiniteVector v;
  const long count = uniform_int(rng, 1, max_pts);
  for (long c = 0; c < count; ++c) {
    const int idx = static_cast<int>(uniform_int(rng, lo, hi));
    v.set(idx, dyadic_value(rng, 16, 3));
  }
  return v;
}

}  // namespace

TEST_CASE("dual norm of unit vectors") {
  for (int j : {1, 2, 7, 40}) {
    const DualCertificate c = t2_dual_norm(FiniteVector::unit(j));
    CHECK_THAT(c.value, Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK(c.converged);
    CHECK(c.gap <= 1e-6);
  }
  const DualCertificate zero = t2_dual_norm(FiniteVector{});
  CHECK(zero.value == 0.0);
  CHECK(zero.converged);
}

TEST_CASE("dual norm of flat interval vectors") {
  // pairing the flat vector against itself is optimal: value sqrt(2n)
  for (int n : {2, 4, 8}) {
    const FiniteVector y = FiniteVector::indicator(n, 2 * n - 1);
    const DualCertificate c = t2_dual_norm(y);
    CHECK(c.converged);
    CHECK_THAT(c.value, Catch::Matchers::WithinAbs(std::sqrt(2.0 * n), 1e-6));
  }
}

TEST_CASE("certificate structure is sound") {
  auto rng = make_rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    const FiniteVector y = random_dyadic(rng, 1, 30, 10);
    const DualCertificate c = t2_dual_norm(y);
    CHECK(c.converged);
    CHECK(c.gap <= 1e-6);
    CHECK(c.lower <= c.value + 1e-12);
    CHECK_THAT(dot(c.primal, y), Catch::Matchers::WithinAbs(c.lower, 1e-12));
    CHECK(tsirelson2_norm(c.primal).value <= 1.0 + 1e-9);
    double mass = 0.0;
    for (const auto& [f, lam] : c.weights) {
      CHECK(lam > 0.0);
      mass += lam;
      CHECK_NOTHROW(f);  // functionals are feasible by construction
    }
    CHECK_THAT(mass, Catch::Matchers::WithinAbs(1.0, 1e-9));
  }
}

TEST_CASE("agrees with the enumeration oracle") {
  auto rng = make_rng(22);
  for (int trial = 0; trial < 60; ++trial) {
    const FiniteVector y = random_dyadic(rng, 1, 12, 6);
    if (y.support_size() > kMaxDualBruteforceSupport) continue;
    const double fw = t2_dual_norm(y).value;
    const double bf = dual_norm_bruteforce(y);
    CHECK_THAT(fw, Catch::Matchers::WithinAbs(bf, 1e-6));
  }
}

TEST_CASE("holder inequality against the primal norm") {
  auto rng = make_rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const FiniteVector x = random_dyadic(rng, 1, 40, 12);
    const FiniteVector y = random_dyadic(rng, 1, 40, 12);
    const double lhs = std::fabs(dot(x, y));
    const double rhs = tsirelson2_norm(x).value * t2_dual_norm(y).value;
    CHECK(lhs <= rhs * (1.0 + 1e-9) + 1e-12);
  }
}

TEST_CASE("functional enumeration on tiny supports") {
  // coordinate 1 admits no branching at all
  auto d1 = enumerate_witness_functionals({1});
  REQUIRE(d1.size() == 1);
  CHECK(d1[0] == FiniteVector::unit(1));
  // {2,3}: two leaves plus the one admissible pair
  auto d23 = enumerate_witness_functionals({2, 3});
  CHECK(d23.size() == 3);
  // every functional is feasible
  auto rng = make_rng(24);
  auto fam = enumerate_witness_functionals({3, 4, 5, 6});
  for (int trial = 0; trial < 40; ++trial) {
    const FiniteVector z = random_dyadic(rng, 1, 10, 6);
    const double tz = tsirelson_norm(z).value;
    for (const auto& f : fam) {
      CHECK(dot(f, z.abs()) <= tz + 1e-12);
    }
  }
}

TEST_CASE("bruteforce dual rejects oversized supports") {
  CHECK_THROWS_AS(dual_norm_bruteforce(FiniteVector::indicator(1, 7)),
                  SupportTooLargeError);
}

TEST_CASE("generic dual estimator on classical norms") {
  auto rng = make_rng(25);
  L1Oracle l1;
  SupOracle linf;
  L2Oracle l2;
  for (int trial = 0; trial < 40; ++trial) {
    const FiniteVector y = random_dyadic(rng, 1, 20, 8);
    const DualCertificate a = dual_norm_generic(l1, y);
    CHECK(a.quality == "certified");
    CHECK_THAT(a.value, Catch::Matchers::WithinRel(sup_norm(y), 1e-12));
    CHECK(a.lower <= a.value + 1e-12);
    CHECK(a.lower >= a.value - 1e-6);

    const DualCertificate b = dual_norm_generic(linf, y);
    CHECK_THAT(b.value, Catch::Matchers::WithinRel(l1_norm(y), 1e-12));
    CHECK(b.lower >= b.value - 1e-6);

    const DualCertificate c = dual_norm_generic(l2, y);
    CHECK_THAT(c.value, Catch::Matchers::WithinRel(l2_norm(y), 1e-12));
    CHECK(c.lower >= c.value - 1e-6);
  }
}

TEST_CASE("generic dual estimator against the certified solver") {
  auto rng = make_rng(26);
  Tsirelson2Oracle t2;
  for (int trial = 0; trial < 20; ++trial) {
    const FiniteVector y = random_dyadic(rng, 1, 16, 6);
    const DualCertificate gen = dual_norm_generic(t2, y);
    const DualCertificate fw = t2_dual_norm(y);
    // ascent lower bounds can only undershoot the true dual norm
    CHECK(gen.lower <= fw.value + 1e-9);
    CHECK(gen.lower >= 0.0);
    // the coordinate bound is a genuine upper bound
    CHECK(fw.value <= gen.value + 1e-9);
  }
}

TEST_CASE("dual oracle wrapper") {
  Tsirelson2DualOracle dual;
  const FiniteVector y = FiniteVector::indicator(4, 7);
  const double first = dual.evaluate(y);
  const double second = dual.evaluate(y);  // warm-started
  CHECK_THAT(second, Catch::Matchers::WithinAbs(first, 2e-6));
  CHECK(dual.dominates_sup_norm());
  const FiniteVector g = dual.subgradient(y);
  CHECK(tsirelson2_norm(g).value <= 1.0 + 1e-9);
  CHECK(dot(g, y) >= first - 1e-5);
}
