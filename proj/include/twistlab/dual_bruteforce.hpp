#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "twistlab/errors.hpp"
#include "twistlab/finite_vector.hpp"

namespace twistlab {

inline constexpr std::size_t kMaxDualBruteforceSupport = 6;

// All witness functionals living on subsets of the given coordinates.  Each
// nonempty subset is carved into every admissible partition tree: a single
// point is a leaf, a larger list splits into k >= 2 consecutive segments with
// k at most the first coordinate, recursively.  Distinct trees can induce the
// same functional; duplicates are removed.
inline std::vector<FiniteVector> enumerate_witness_functionals(
    const std::vector<int>& coords) {
  std::vector<int> pts(coords);
  std::sort(pts.begin(), pts.end());

  // trees over a consecutive slice of a point list
  auto gen = [](auto&& self, const std::vector<int>& list, std::size_t lo,
                std::size_t hi) -> std::vector<FiniteVector> {
    std::vector<FiniteVector> out;
    const std::size_t len = hi - lo;
    if (len == 1) {
      out.push_back(FiniteVector::unit(list[lo]));
      return out;
    }
    const long kmax = std::min<long>(static_cast<long>(len), list[lo]);
    for (long k = 2; k <= kmax; ++k) {
      // compositions of the slice into k nonempty consecutive segments
      auto split = [&](auto&& sself, std::size_t from, long remaining,
                       const FiniteVector& acc) -> void {
        if (remaining == 1) {
          for (const auto& f : self(self, list, from, hi)) {
            FiniteVector merged = acc;
            for (const auto& [c, v] : f.entries()) merged.set(c, v);
            out.push_back(merged * 0.5);
          }
          return;
        }
        // first segment must leave remaining-1 points behind
        for (std::size_t end = from + 1; end <= hi - (remaining - 1); ++end) {
          for (const auto& f : self(self, list, from, end)) {
            FiniteVector merged = acc;
            for (const auto& [c, v] : f.entries()) merged.set(c, v);
            sself(sself, end, remaining - 1, merged);
          }
        }
      };
      split(split, lo, k, FiniteVector{});
    }
    return out;
  };

  std::map<std::vector<std::pair<int, double>>, bool> seen;
  std::vector<FiniteVector> result;
  const std::size_t n = pts.size();
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> sub;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) sub.push_back(pts[i]);
    }
    for (const auto& f : gen(gen, sub, 0, sub.size())) {
      std::vector<std::pair<int, double>> key(f.entries().begin(),
                                              f.entries().end());
      if (!seen.emplace(std::move(key), true).second) continue;
      result.push_back(f);
    }
  }
  return result;
}

// Exhaustive reference for the 2-convexified dual norm: materialize the full
// functional family D, then minimize sum y_j^2 / w_j over the simplex on D by
// pairwise weight exchange with exact one-dimensional line search.  Entirely
// disjoint machinery from the Frank-Wolfe path.
inline double dual_norm_bruteforce(const FiniteVector& y) {
  if (y.empty()) return 0.0;
  const std::vector<int> supp = y.support();
  const std::size_t m = supp.size();
  if (m > kMaxDualBruteforceSupport) {
    throw SupportTooLargeError("bruteforce dual limited to " +
                               std::to_string(kMaxDualBruteforceSupport) +
                               " support points, got " + std::to_string(m));
  }
  std::vector<double> y2(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double v = y.at(supp[i]);
    y2[i] = v * v;
  }

  const std::vector<FiniteVector> family = enumerate_witness_functionals(supp);
  const std::size_t R = family.size();
  std::vector<std::vector<double>> F(R, std::vector<double>(m, 0.0));
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t i = 0; i < m; ++i) F[r][i] = family[r].at(supp[i]);
  }

  std::vector<double> lam(R, 1.0 / static_cast<double>(R));
  std::vector<double> w(m), q(m), grad(R);

  double psi = 0.0;
  for (long it = 0; it < 200000; ++it) {
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t r = 0; r < R; ++r) {
      if (lam[r] == 0.0) continue;
      for (std::size_t i = 0; i < m; ++i) w[i] += lam[r] * F[r][i];
    }
    psi = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      q[i] = y2[i] / (w[i] * w[i]);
      psi += y2[i] / w[i];
    }
    std::size_t ibest = 0, jworst = 0;
    bool have_active = false;
    for (std::size_t r = 0; r < R; ++r) {
      double g = 0.0;
      for (std::size_t i = 0; i < m; ++i) g -= q[i] * F[r][i];
      grad[r] = g;
      if (g < grad[ibest]) ibest = r;
      if (lam[r] > 0.0 && (!have_active || g > grad[jworst])) {
        jworst = r;
        have_active = true;
      }
    }
    const double fwgap = -grad[ibest] - psi;
    if (fwgap <= 1e-12 * std::max(psi, 1.0)) break;
    if (ibest == jworst) break;

    // exact line search for the transfer lam[jworst] -> lam[ibest]
    const double tmax = lam[jworst];
    auto dpsi = [&](double t) {
      double d = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double di = F[ibest][i] - F[jworst][i];
        if (di == 0.0) continue;
        const double wi = w[i] + t * di;
        d -= y2[i] * di / (wi * wi);
      }
      return d;
    };
    double t = tmax;
    if (dpsi(tmax) > 0.0) {
      double lo = 0.0, hi = tmax;
      for (int b = 0; b < 80; ++b) {
        const double mid = 0.5 * (lo + hi);
        if (dpsi(mid) < 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      t = 0.5 * (lo + hi);
    }
    if (t <= 0.0) break;
    lam[ibest] += t;
    lam[jworst] -= t;
    if (lam[jworst] < 1e-18) lam[jworst] = 0.0;
  }
  return std::sqrt(psi);
}

}  // namespace twistlab
