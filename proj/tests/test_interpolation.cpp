#include "twistlab/interpolation.hpp"

#include <cmath>

#include "catch_amalgamated.hpp"
#include "twistlab/random.hpp"

using namespace twistlab;

namespace {

FiniteVector random_unit(std::mt19937_64& rng, int max_index, int max_pts) {
  FiniteVector v;
  const long count = uniform_int(rng, 1, max_pts);
  for (long c = 0; c < count; ++c) {
    const int idx = static_cast<int>(uniform_int(rng, 1, max_index));
    v.set(idx, dyadic_value(rng, 16, 3));
  }
  if (v.empty()) v.set(1, 1.0);
  return v * (1.0 / l2_norm(v));
}

}  // namespace

TEST_CASE("l1/linf factorization matches the closed form") {
  // For (l1, linf) at theta = 1/2 the balanced optimum is a = y^2 / ||y||_2,
  // b = ||y||_2 * 1, so the solver can be checked against exact values.
  auto rng = make_rng(11);
  const Couple c = Couple::l1_linf();
  for (int t = 0; t < 25; ++t) {
    const FiniteVector y = random_unit(rng, 12, 12);
    const double n = l2_norm(y);
    const Factorization f = lozanovskii_factorize(c, y);
    REQUIRE(f.converged);
    CHECK(f.eps_achieved <= 1e-6);
    CHECK(f.eps_achieved >= -1e-12);
    for (int k : y.support()) {
      const double ak = y.at(k) * y.at(k) / n;
      CHECK_THAT(f.a.at(k), Catch::Matchers::WithinRel(ak, 1e-6));
      CHECK_THAT(f.b.at(k), Catch::Matchers::WithinRel(n, 1e-6));
    }
  }
}

TEST_CASE("factorization product identity and balance") {
  auto rng = make_rng(12);
  const Couple c = Couple::l1_linf();
  for (int t = 0; t < 25; ++t) {
    const FiniteVector y = random_unit(rng, 12, 12);
    const Factorization f = lozanovskii_factorize(c, y);
    REQUIRE(f.balanced);
    for (int k : y.support()) {
      CHECK(f.a.at(k) * f.b.at(k) == y.at(k) * y.at(k));  // bitwise
    }
    CHECK_THAT(l1_norm(f.a), Catch::Matchers::WithinRel(sup_norm(f.b), 1e-9));
  }
}

TEST_CASE("centralizer agrees with the logarithmic map on l1/linf") {
  auto rng = make_rng(5);
  const Couple c = Couple::l1_linf();
  FactorizeOptions fo;
  fo.eps_target = 1e-6;
  for (int t = 0; t < 100; ++t) {
    const FiniteVector y = random_unit(rng, 12, 12);
    const CentralizerResult r = centralizer_detail(c, y, fo);
    REQUIRE(r.factorization.converged);
    CHECK(r.factorization.eps_achieved <= 1e-6);
    const FiniteVector kp = kalton_peck_omega(y, PhiSpec::linear(2.0));
    CHECK(sup_norm(r.omega - kp) <= 1e-6);
  }
}

TEST_CASE("centralizer on a flat block has slope log on l1/linf") {
  // y = indicator of [1, 4]: every coordinate carries phi(log 2) with slope 2.
  const FiniteVector y = FiniteVector::indicator(1, 4);
  const FiniteVector om = centralizer(Couple::l1_linf(), y);
  for (int k = 1; k <= 4; ++k) {
    CHECK_THAT(om.at(k), Catch::Matchers::WithinRel(2.0 * std::log(2.0), 1e-9));
  }
}

TEST_CASE("centralizer is exactly sign-equivariant") {
  auto rng = make_rng(13);
  const Couple c = Couple::l1_linf();
  for (int t = 0; t < 10; ++t) {
    const FiniteVector y = random_unit(rng, 12, 10);
    FiniteVector ys;
    FiniteVector flips;
    for (int k : y.support()) {
      const double s = uniform01(rng) < 0.5 ? -1.0 : 1.0;
      flips.set(k, s);
      ys.set(k, s * y.at(k));
    }
    const FiniteVector base = centralizer(c, y);
    const FiniteVector flipped = centralizer(c, ys);
    CHECK(flipped == hadamard(flips, base));
  }
}

TEST_CASE("centralizer is exactly homogeneous for dyadic scalings") {
  auto rng = make_rng(14);
  const Couple c = Couple::l1_linf();
  for (int t = 0; t < 10; ++t) {
    const FiniteVector y = random_unit(rng, 12, 10);
    const FiniteVector base = centralizer(c, y);
    CHECK(centralizer(c, y * 4.0) == base * 4.0);
    CHECK(centralizer(c, y * 0.125) == base * 0.125);
  }
}

TEST_CASE("factorization rejects bad inputs") {
  const Couple c = Couple::l1_linf();
  CHECK_THROWS_AS(lozanovskii_factorize(c, FiniteVector{}), ZeroVectorError);
  CHECK_THROWS_AS(make_power_selector(c, FiniteVector{}), ZeroVectorError);
  Couple off = Couple::l1_linf();
  off.theta = 0.3;
  CHECK_THROWS_AS(lozanovskii_factorize(off, FiniteVector::unit(1)), Error);
  CHECK(centralizer(c, FiniteVector{}).empty());
}

TEST_CASE("couple reports its convexity parameter") {
  CHECK(Couple::l1_linf().theta_tilde() == 2.0);
}

TEST_CASE("t2 couple factorizes flat blocks with a constant ratio") {
  // On the convexified pair the balanced split of 1_{[n,2n)} is a = sqrt(2) 1,
  // b = 1/sqrt(2) 1, so the centralizer multiplies flat blocks by -log 2
  // independent of n.
  for (int n : {2, 4, 8}) {
    const FiniteVector y = FiniteVector::indicator(n, 2 * n - 1);
    const Couple c = Couple::t2_pair();
    FactorizeOptions fo;
    fo.eps_target = 0.05;
    const CentralizerResult r = centralizer_detail(c, y, fo);
    REQUIRE(r.factorization.converged);
    CHECK(std::fabs(r.factorization.eps_achieved) <= 1e-4);
    for (int k = n; k < 2 * n; ++k) {
      CHECK_THAT(r.factorization.a.at(k),
                 Catch::Matchers::WithinRel(std::sqrt(2.0), 1e-4));
      CHECK_THAT(r.omega.at(k),
                 Catch::Matchers::WithinRel(-std::log(2.0), 1e-4));
    }
  }
}

TEST_CASE("t2 couple factorizes random vectors to the coarse tolerance") {
  auto rng = make_rng(15);
  for (int t = 0; t < 8; ++t) {
    const FiniteVector y = random_unit(rng, 12, 6);
    const Couple c = Couple::t2_pair();
    FactorizeOptions fo;
    fo.eps_target = 0.05;
    const Factorization f = lozanovskii_factorize(c, y, fo);
    CHECK(f.converged);
    CHECK(f.eps_achieved <= 0.05);
    for (int k : y.support()) {
      CHECK(f.a.at(k) * f.b.at(k) == y.at(k) * y.at(k));  // bitwise
    }
  }
}

TEST_CASE("t2 factorization is reproducible across fresh couples") {
  // The dual oracle's warm cache lives inside the couple, so two fresh
  // couples must walk the identical deterministic path.
  const FiniteVector y{{1, 0.5}, {2, -0.25}, {4, 0.75}, {5, 0.125}};
  FactorizeOptions fo;
  fo.eps_target = 0.05;
  const Factorization f1 = lozanovskii_factorize(Couple::t2_pair(), y, fo);
  const Factorization f2 = lozanovskii_factorize(Couple::t2_pair(), y, fo);
  CHECK(f1.a == f2.a);
  CHECK(f1.b == f2.b);
  CHECK(f1.eps_achieved == f2.eps_achieved);
  CHECK(f1.iterations == f2.iterations);
}

TEST_CASE("power selector recovers the vector and its centralizer") {
  auto rng = make_rng(16);
  const Couple c = Couple::l1_linf();
  for (int t = 0; t < 10; ++t) {
    const FiniteVector y = random_unit(rng, 12, 10);
    const PowerSelector s = make_power_selector(c, y);
    const FiniteVector mid = s.evaluate(0.5);
    CHECK(sup_norm(mid - y) <= 1e-12 * sup_norm(y));
    const FiniteVector om = centralizer(c, y);
    CHECK(sup_norm(s.derivative(0.5) - om) <=
          1e-10 * std::max(1.0, sup_norm(om)));

    const SelectorNorms norms = selector_norms(s, c);
    const double n2 = l2_norm(y);
    CHECK(norms.strip_sup_norm >= norms.interpolation_norm - 1e-15);
    CHECK(norms.interpolation_norm >= n2 * (1.0 - 1e-9));
    CHECK(norms.interpolation_norm <= n2 * (1.0 + 1e-6));
  }
}

TEST_CASE("selector endpoints carry the factorization with signs") {
  const FiniteVector y{{1, 1.0}, {2, -2.0}, {4, 0.5}};
  const Couple c = Couple::l1_linf();
  const PowerSelector s = make_power_selector(c, y);
  const Factorization f = lozanovskii_factorize(c, y);
  const FiniteVector at0 = s.evaluate(0.0);
  const FiniteVector at1 = s.evaluate(1.0);
  for (int k : y.support()) {
    const double sg = y.at(k) < 0 ? -1.0 : 1.0;
    CHECK_THAT(at0.at(k), Catch::Matchers::WithinRel(sg * f.a.at(k), 1e-12));
    CHECK_THAT(at1.at(k), Catch::Matchers::WithinRel(sg * f.b.at(k), 1e-12));
  }
}

TEST_CASE("logarithmic map closed forms") {
  const FiniteVector y = FiniteVector::indicator(1, 4);
  const FiniteVector lin = kalton_peck_omega(y, PhiSpec::linear(1.0));
  const FiniteVector cap = kalton_peck_omega(y, PhiSpec::capped());
  const double l2v = std::log(2.0);
  for (int k = 1; k <= 4; ++k) {
    CHECK_THAT(lin.at(k), Catch::Matchers::WithinRel(l2v, 1e-15));
    CHECK_THAT(cap.at(k), Catch::Matchers::WithinRel(l2v / (1.0 + l2v), 1e-15));
  }
  // A single unit vector has log(||y||/|y_j|) = 0 everywhere on its support.
  CHECK(kalton_peck_omega(FiniteVector::unit(3), PhiSpec::linear(1.0)).empty());
  CHECK(kalton_peck_omega(FiniteVector{}, PhiSpec::capped()).empty());
}

TEST_CASE("phi profile tags are stable") {
  CHECK(PhiSpec::linear(2.0).tag() == "linear:2");
  CHECK(PhiSpec::linear(0.5).tag() == "linear:0.5");
  CHECK(PhiSpec::capped().tag() == "capped");
  CHECK(PhiSpec::linear(3.0)(2.0) == 6.0);
  CHECK_THAT(PhiSpec::capped()(1.0), Catch::Matchers::WithinRel(0.5, 1e-15));
}
