#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "twistlab/errors.hpp"
#include "twistlab/finite_vector.hpp"

namespace twistlab {

inline constexpr std::size_t kMaxBruteforceSupport = 8;

// Exhaustive reference for the recursive norm, structured nothing like the
// interval engine: it works on arbitrary subsets of the support (bitmasks),
// enumerates every admissible family of arbitrary finite sets, and iterates
// the defining recursion to its fixed point.  Cost is O(rounds * 4^N), fine
// for N <= 8.
inline double tsirelson_norm_bruteforce(const FiniteVector& v) {
  std::vector<long> s;
  std::vector<double> a;
  for (const auto& [k, x] : v.entries()) {
    s.push_back(k);
    a.push_back(std::fabs(x));
  }
  const std::size_t n = s.size();
  if (n == 0) return 0.0;
  if (n > kMaxBruteforceSupport) {
    throw SupportTooLargeError("bruteforce norm limited to " +
                               std::to_string(kMaxBruteforceSupport) +
                               " support points, got " + std::to_string(n));
  }

  const std::uint32_t full = (1u << n) - 1u;
  std::vector<double> val(full + 1, 0.0);
  for (std::uint32_t m = 1; m <= full; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      if (m & (1u << i)) val[m] = std::max(val[m], a[i]);
    }
  }

  // Best family value over subsets of mask, reading set values from prev.
  // Points are scanned in increasing order; each one either joins the open
  // set, closes it and opens the next, or is skipped.  That generates every
  // family A_1 < A_2 < ... (pointwise ordered sets) exactly once.  The count
  // constraint k <= min A_1 prunes as soon as it is violated.
  auto best_family = [&](std::uint32_t mask,
                         const std::vector<double>& prev) -> double {
    std::vector<std::size_t> pts;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) pts.push_back(i);
    }
    double best = 0.0;
    auto rec = [&](auto&& self, std::size_t pos, std::uint32_t open,
                   double sum, long count, long limit) -> void {
      if (pos == pts.size()) {
        if (open != 0) {
          sum += prev[open];
          ++count;
        }
        if (count >= 1 && count <= limit) best = std::max(best, sum);
        return;
      }
      const std::uint32_t bit = 1u << pts[pos];
      self(self, pos + 1, open, sum, count, limit);  // skip this point
      if (open == 0) {
        // first point of the first set fixes the count limit
        const long lim = (limit == 0) ? s[pts[pos]] : limit;
        self(self, pos + 1, bit, sum, count, lim);
      } else {
        self(self, pos + 1, open | bit, sum, count, limit);  // join open set
        if (count + 1 < limit) {  // close open set, start a new one
          self(self, pos + 1, bit, sum + prev[open], count + 1, limit);
        }
      }
    };
    rec(rec, 0, 0u, 0.0, 0, 0);
    return best;
  };

  for (int round = 0; round < 200; ++round) {
    const std::vector<double> prev = val;
    bool changed = false;
    for (std::uint32_t m = 1; m <= full; ++m) {
      const double cand = 0.5 * best_family(m, prev);
      if (cand > val[m]) {
        val[m] = cand;
        changed = true;
      }
    }
    if (!changed) return val[full];
  }
  throw Error("bruteforce norm recursion did not stabilize");
}

}  // namespace twistlab
