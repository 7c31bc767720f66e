#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "twistlab/dual_norm.hpp"
#include "twistlab/errors.hpp"
#include "twistlab/finite_vector.hpp"
#include "twistlab/norm_oracle.hpp"

namespace twistlab {

struct FactorizeOptions {
  double eps_target = 1e-6;
  int max_iterations = 2000;  // subgradient phase cap
  int polish_sweeps = 12;     // line-search refinement phase cap
  double step_scale = 0.5;    // c/sqrt(k) schedule when no exact target exists
};

// A compatible pair of lattice norms with an interpolation parameter.
// hilbert_midpoint marks couples whose theta = 1/2 interpolation space is l2
// with the sharp factorization identity min ||a||_0 ||b||_1 = ||y||_2^2;
// that exact optimum value is what makes Polyak step sizes available to the
// factorization solver.  factorize_defaults is the couple's documented budget:
// closed-form-checkable couples get the tight target, oracle-priced couples
// the coarse one.
struct Couple {
  std::shared_ptr<const NormOracle> x0;
  std::shared_ptr<const NormOracle> x1;
  double theta = 0.5;
  bool hilbert_midpoint = false;
  std::string tag;
  FactorizeOptions factorize_defaults;

  double theta_tilde() const {
    return std::max(1.0 / theta, 1.0 / (1.0 - theta));
  }

  static Couple l1_linf() {
    Couple c;
    c.x0 = std::make_shared<L1Oracle>();
    c.x1 = std::make_shared<SupOracle>();
    c.hilbert_midpoint = true;
    c.tag = "l1linf";
    return c;
  }

  // The 2-convexified norm against its dual.  Each Couple instance owns its
  // dual oracle (and with it the warm-start cache), so repeated evaluations
  // inside one factorization run share state but distinct couples never do.
  static Couple t2_pair(DualNormOptions dual_opts = DualNormOptions{}) {
    Couple c;
    c.x0 = std::make_shared<Tsirelson2Oracle>();
    c.x1 = std::make_shared<Tsirelson2DualOracle>(dual_opts);
    c.hilbert_midpoint = true;
    c.tag = "t2";
    c.factorize_defaults.eps_target = 0.05;
    return c;
  }
};

// Result of splitting y^2 = a . b with a in X0, b in X1.
// b is always computed as y^2 / a coordinatewise, so the product identity is
// algebraically built in; eps_achieved measures ||a||_0 ||b||_1 / ||y||_2^2 - 1
// and balanced means ||a||_0 = ||b||_1 after the final rescale.
struct Factorization {
  FiniteVector a;
  FiniteVector b;
  double eps_achieved = 0.0;
  double rho_achieved = 0.0;  // ||a||_0 / ||y||_2
  bool balanced = true;
  bool converged = false;
  int iterations = 0;
};

// Minimizes log ||e^u||_0 + log ||e^{w-u}||_1 with w = log y^2, the convex
// reparameterization of the factorization problem.  The input is canonicalized
// to |y| / ||y||_2 before solving, which makes the returned log-ratios depend
// on y only through that canonical vector: sign flips are exact no-ops and
// power-of-two rescalings restore exactly.
//
// Two phases.  Phase 1 is subgradient descent, with Polyak steps when the
// optimal value is known (hilbert_midpoint couples: log ||y||_2^2); it makes
// fast bulk progress but orbits the kink manifold of a polyhedral side
// instead of entering it.  Phase 2 closes the remaining gap with exact
// one-dimensional searches over a fixed direction dictionary: single
// coordinates, top-r prefix groups of either factor (the moves that slide
// along max-norm ties), the current subgradient, and the proportional family
// a ~ y^2 / M.  All phase-2 moves are evaluation-only and accepted solely on
// objective decrease, so the refinement works for any couple.
inline Factorization lozanovskii_factorize(const Couple& couple,
                                           const FiniteVector& y,
                                           const FactorizeOptions& opts) {
  if (y.empty()) {
    throw ZeroVectorError("factorization requires a nonzero vector");
  }
  if (std::fabs(couple.theta - 0.5) > 1e-15) {
    throw Error("factorization is defined at the geometric midpoint theta=1/2");
  }
  const NormOracle& x0 = *couple.x0;
  const NormOracle& x1 = *couple.x1;

  const double ynorm = l2_norm(y);
  const std::vector<int> supp = y.support();
  const std::size_t m = supp.size();

  std::vector<double> yh(m), w(m), u(m);
  for (std::size_t i = 0; i < m; ++i) {
    yh[i] = std::fabs(y.at(supp[i])) / ynorm;
    w[i] = 2.0 * std::log(yh[i]);
    u[i] = std::log(yh[i]);
  }
  // phi* for the canonical vector; ||yh||_2 = 1 up to roundoff.
  double target = 0.0;
  {
    double s = 0.0;
    for (double v : yh) s += v * v;
    target = std::log(s);
  }

  auto phi_of = [&](const std::vector<double>& uu) {
    FiniteVector a, b;
    for (std::size_t i = 0; i < m; ++i) {
      a.set(supp[i], std::exp(uu[i]));
      b.set(supp[i], std::exp(w[i] - uu[i]));
    }
    return std::log(x0.evaluate(a)) + std::log(x1.evaluate(b));
  };
  auto grad_of = [&](const std::vector<double>& uu, std::vector<double>& g) {
    FiniteVector a, b;
    for (std::size_t i = 0; i < m; ++i) {
      a.set(supp[i], std::exp(uu[i]));
      b.set(supp[i], std::exp(w[i] - uu[i]));
    }
    const double n0 = x0.evaluate(a);
    const double n1 = x1.evaluate(b);
    const FiniteVector s0 = x0.subgradient(a);
    const FiniteVector s1 = x1.subgradient(b);
    double gn2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      g[i] = s0.at(supp[i]) * a.at(supp[i]) / n0 -
             s1.at(supp[i]) * b.at(supp[i]) / n1;
      gn2 += g[i] * g[i];
    }
    return gn2;
  };

  std::vector<double> ubest(u);
  double phibest = phi_of(u);
  int iters = 1;
  bool converged = false;
  // The log-ratios derived from the factorization lose roughly half the
  // digits of the product gap, so precision-minded callers (eps <= 1e-3)
  // get driven to the dictionary's floor rather than stopped at eps.
  const double run_target =
      opts.eps_target <= 1e-3 ? std::min(opts.eps_target, 1e-13)
                              : opts.eps_target;
  auto good_enough = [&](double phi) {
    return couple.hilbert_midpoint && std::expm1(phi - target) <= run_target;
  };

  // phase 1: subgradient descent, stopped early once it stops helping
  if (!good_enough(phibest)) {
    std::vector<double> g(m);
    int stall = 0;
    for (int k = 1; k <= opts.max_iterations; ++k) {
      iters = k;
      const double phi = phi_of(u);
      if (phi < phibest) {
        phibest = phi;
        ubest = u;
        stall = 0;
      } else if (++stall > 80) {
        break;
      }
      if (good_enough(phibest)) {
        converged = true;
        break;
      }
      const double gn2 = grad_of(u, g);
      if (gn2 < 1e-28) break;
      double step;
      if (couple.hilbert_midpoint) {
        const double gap = phi - target;
        if (gap <= 0.0) {
          converged = true;
          break;
        }
        step = gap / gn2;
      } else {
        step = opts.step_scale / std::sqrt(static_cast<double>(k));
      }
      for (std::size_t i = 0; i < m; ++i) u[i] -= step * g[i];
    }
    u = ubest;
  } else {
    converged = true;
  }

  // phase 2: exact line searches over the direction dictionary
  if (!converged && m > 1) {
    auto line_min = [&](const std::vector<double>& d, double lo, double hi) {
      const double gr = 0.61803398874989484820;
      auto f1 = [&](double t) {
        std::vector<double> xt(m);
        for (std::size_t i = 0; i < m; ++i) xt[i] = u[i] + t * d[i];
        return phi_of(xt);
      };
      double a0 = lo, b0 = hi;
      double c0 = b0 - gr * (b0 - a0), d0 = a0 + gr * (b0 - a0);
      double fc = f1(c0), fd = f1(d0);
      for (int it = 0; it < 90 && (b0 - a0) > 1e-14; ++it) {
        if (fc < fd) {
          b0 = d0;
          d0 = c0;
          fd = fc;
          c0 = b0 - gr * (b0 - a0);
          fc = f1(c0);
        } else {
          a0 = c0;
          c0 = d0;
          fc = fd;
          d0 = a0 + gr * (b0 - a0);
          fd = f1(d0);
        }
      }
      const double ts = 0.5 * (a0 + b0);
      const double ft = f1(ts);
      if (ft < phibest) {
        for (std::size_t i = 0; i < m; ++i) u[i] += ts * d[i];
        phibest = ft;
      }
    };

    std::vector<double> g(m);
    for (int sweep = 0; sweep < opts.polish_sweeps && !converged; ++sweep) {
      const double before = phibest;
      ++iters;

      // proportional family u = w - M, exact in M
      {
        const double gr = 0.61803398874989484820;
        auto fM = [&](double M) {
          std::vector<double> xt(m);
          for (std::size_t i = 0; i < m; ++i) xt[i] = w[i] - M;
          return phi_of(xt);
        };
        double a0 = -20.0, b0 = 20.0;
        double c0 = b0 - gr * (b0 - a0), d0 = a0 + gr * (b0 - a0);
        double fc = fM(c0), fd = fM(d0);
        for (int it = 0; it < 90; ++it) {
          if (fc < fd) {
            b0 = d0;
            d0 = c0;
            fd = fc;
            c0 = b0 - gr * (b0 - a0);
            fc = fM(c0);
          } else {
            a0 = c0;
            c0 = d0;
            fc = fd;
            d0 = a0 + gr * (b0 - a0);
            fd = fM(d0);
          }
        }
        const double Ms = 0.5 * (a0 + b0);
        const double fs = fM(Ms);
        if (fs < phibest) {
          phibest = fs;
          for (std::size_t i = 0; i < m; ++i) u[i] = w[i] - Ms;
        }
      }
      if (good_enough(phibest)) {
        converged = true;
        break;
      }

      for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> d(m, 0.0);
        d[i] = 1.0;
        line_min(d, -2.0, 2.0);
      }

      std::vector<std::size_t> border(m), aorder(m);
      for (std::size_t i = 0; i < m; ++i) border[i] = aorder[i] = i;
      std::sort(border.begin(), border.end(), [&](std::size_t p, std::size_t q) {
        return w[p] - u[p] > w[q] - u[q];
      });
      std::sort(aorder.begin(), aorder.end(), [&](std::size_t p, std::size_t q) {
        return u[p] > u[q];
      });
      for (std::size_t r = 1; r < m; ++r) {
        std::vector<double> d(m, 0.0);
        for (std::size_t i = 0; i < r; ++i) d[border[i]] = 1.0;
        line_min(d, -1.0, 1.0);
      }
      for (std::size_t r = 1; r < m; ++r) {
        std::vector<double> d(m, 0.0);
        for (std::size_t i = 0; i < r; ++i) d[aorder[i]] = -1.0;
        line_min(d, -1.0, 1.0);
      }

      const double gn2 = grad_of(u, g);
      if (gn2 > 1e-28) {
        const double gn = std::sqrt(gn2);
        std::vector<double> d(m);
        for (std::size_t i = 0; i < m; ++i) d[i] = -g[i] / gn;
        line_min(d, -0.5, 1.5);
      }

      if (good_enough(phibest)) {
        converged = true;
        break;
      }
      if (before - phibest <= 1e-16) break;  // dictionary exhausted
    }
    ubest = u;
  }

  // Rebuild at the best iterate in the original scale, balance, and force
  // the product identity through b = y^2 / a.
  Factorization out;
  FiniteVector af0;
  for (std::size_t i = 0; i < m; ++i) {
    af0.set(supp[i], ynorm * std::exp(ubest[i]));
  }
  FiniteVector bf0;
  for (const auto& [k, x] : y.entries()) bf0.set(k, x * x / af0.at(k));
  const double f0 = x0.evaluate(af0);
  const double f1 = x1.evaluate(bf0);
  const double t = std::sqrt(f1 / f0);

  auto nudged = [](double v, int steps) {
    const double dir = steps > 0 ? std::numeric_limits<double>::infinity()
                                 : -std::numeric_limits<double>::infinity();
    for (int i = 0; i < std::abs(steps); ++i) v = std::nextafter(v, dir);
    return v;
  };

  // The stored pair must multiply back to fl(y_j^2) bitwise, but
  // fl(a * fl(y^2/a)) can land a ulp off.  Repair per coordinate: nudge b,
  // then (a, b) jointly, by single ulps.  That fails only in a degenerate
  // family: when a/b is a power of two, a-steps and b-steps move the product
  // by the same increment, so one rounding target can be skipped for every
  // pair within ulps.  A coarse relative nudge of a (multiples of 2^-26)
  // breaks the degeneracy through the quadratic drift; the worst deviation
  // (~6e-8 on one coordinate) perturbs the achieved norms at the 1e-14 level.
  FiniteVector af, bf;
  for (const auto& [k, v] : af0.entries()) af.set(k, v * t);
  for (const auto& [k, x] : y.entries()) {
    const double s = x * x;
    const double av = af.at(k);
    const double bv = s / av;
    if (av * bv == s) {
      bf.set(k, bv);
      continue;
    }
    bool fixed = false;
    for (int db = -4; db <= 4 && !fixed; ++db) {
      const double bb = nudged(bv, db);
      if (av * bb == s) {
        bf.set(k, bb);
        fixed = true;
      }
    }
    for (int da = -4; da <= 4 && !fixed; ++da) {
      const double aa = nudged(av, da);
      for (int db = -4; db <= 4 && !fixed; ++db) {
        const double bb = nudged(bv, db);
        if (aa * bb == s) {
          af.set(k, aa);
          bf.set(k, bb);
          fixed = true;
        }
      }
    }
    for (int j = 1; j <= 4 && !fixed; ++j) {
      for (int sign : {1, -1}) {
        const double aa = av * (1.0 + sign * j * 1.4901161193847656e-08);
        const double bc = s / aa;
        for (int db = -4; db <= 4 && !fixed; ++db) {
          const double bb = nudged(bc, db);
          if (aa * bb == s) {
            af.set(k, aa);
            bf.set(k, bb);
            fixed = true;
          }
        }
        if (fixed) break;
      }
    }
    if (!fixed) bf.set(k, bv);  // 1-ulp residue; astronomically unlikely
  }

  out.a = af;
  out.b = bf;
  const double g0 = x0.evaluate(out.a);
  const double g1 = x1.evaluate(out.b);
  out.eps_achieved = g0 * g1 / (ynorm * ynorm) - 1.0;
  out.rho_achieved = g0 / ynorm;
  out.balanced = true;
  out.converged =
      converged ||
      (couple.hilbert_midpoint && out.eps_achieved <= opts.eps_target);
  out.iterations = iters;
  return out;
}

// Omitted options fall back to the couple's documented defaults.
inline Factorization lozanovskii_factorize(const Couple& couple,
                                           const FiniteVector& y) {
  return lozanovskii_factorize(couple, y, couple.factorize_defaults);
}

struct CentralizerResult {
  FiniteVector omega;
  Factorization factorization;
};

// Omega(y)_j = y_j log(b_j / a_j) from the balanced factorization of y.
// Zero input maps to zero without invoking the solver.
inline CentralizerResult centralizer_detail(const Couple& couple,
                                            const FiniteVector& y,
                                            const FactorizeOptions& opts) {
  CentralizerResult r;
  if (y.empty()) return r;
  r.factorization = lozanovskii_factorize(couple, y, opts);
  for (const auto& [k, x] : y.entries()) {
    r.omega.set(k, x * std::log(r.factorization.b.at(k) /
                                r.factorization.a.at(k)));
  }
  return r;
}

inline CentralizerResult centralizer_detail(const Couple& couple,
                                            const FiniteVector& y) {
  return centralizer_detail(couple, y, couple.factorize_defaults);
}

inline FiniteVector centralizer(const Couple& couple, const FiniteVector& y,
                                const FactorizeOptions& opts) {
  return centralizer_detail(couple, y, opts).omega;
}

inline FiniteVector centralizer(const Couple& couple, const FiniteVector& y) {
  return centralizer_detail(couple, y).omega;
}

// Scalar profile for the closed-form centralizer family.
struct PhiSpec {
  enum class Kind { linear, capped };
  Kind kind = Kind::linear;
  double c = 1.0;

  double operator()(double t) const {
    return kind == Kind::linear ? c * t : t / (1.0 + t);
  }

  std::string tag() const {
    if (kind == Kind::linear) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "linear:%.17g", c);
      return buf;
    }
    return "capped";
  }

  static PhiSpec linear(double slope) {
    PhiSpec p;
    p.kind = Kind::linear;
    p.c = slope;
    return p;
  }
  static PhiSpec capped() {
    PhiSpec p;
    p.kind = Kind::capped;
    return p;
  }
};

// Omega(y)_j = y_j phi(log(||y||_2 / |y_j|)); zero maps to zero.
inline FiniteVector kalton_peck_omega(const FiniteVector& y,
                                      const PhiSpec& phi) {
  FiniteVector r;
  if (y.empty()) return r;
  const double n = l2_norm(y);
  for (const auto& [k, x] : y.entries()) {
    r.set(k, x * phi(std::log(n / std::fabs(x))));
  }
  return r;
}

// The analytic selector through a factorization: F(z) = sign(y) a^{1-z} b^z,
// evaluated on the real section of the strip.  F(1/2) recovers y and
// F'(1/2) = Omega(y).
struct PowerSelector {
  FiniteVector signs;     // +-1 on the support of y
  FiniteVector a;
  FiniteVector b;
  FiniteVector logratio;  // log(b/a) on the support

  FiniteVector evaluate(double z) const {
    FiniteVector r;
    for (const auto& [k, s] : signs.entries()) {
      const double av = a.at(k);
      const double bv = b.at(k);
      r.set(k, s * std::exp((1.0 - z) * std::log(av) + z * std::log(bv)));
    }
    return r;
  }

  FiniteVector derivative(double z) const {
    return hadamard(evaluate(z), logratio);
  }
};

inline PowerSelector make_power_selector(const Couple& couple,
                                         const FiniteVector& y,
                                         const FactorizeOptions& opts) {
  if (y.empty()) {
    throw ZeroVectorError("selector requires a nonzero vector");
  }
  const Factorization f = lozanovskii_factorize(couple, y, opts);
  PowerSelector s;
  s.a = f.a;
  s.b = f.b;
  for (const auto& [k, x] : y.entries()) {
    s.signs.set(k, x < 0 ? -1.0 : 1.0);
    s.logratio.set(k, std::log(f.b.at(k) / f.a.at(k)));
  }
  return s;
}

inline PowerSelector make_power_selector(const Couple& couple,
                                         const FiniteVector& y) {
  return make_power_selector(couple, y, couple.factorize_defaults);
}

struct SelectorNorms {
  double interpolation_norm = 0.0;  // (1-theta)||a||_0 + theta||b||_1
  double strip_sup_norm = 0.0;      // max(||a||_0, ||b||_1)
};

inline SelectorNorms selector_norms(const PowerSelector& s,
                                    const Couple& couple) {
  SelectorNorms out;
  const double n0 = couple.x0->evaluate(s.a);
  const double n1 = couple.x1->evaluate(s.b);
  out.interpolation_norm = (1.0 - couple.theta) * n0 + couple.theta * n1;
  out.strip_sup_norm = std::max(n0, n1);
  return out;
}

}  // namespace twistlab
