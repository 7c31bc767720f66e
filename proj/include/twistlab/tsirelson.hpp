#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "twistlab/errors.hpp"
#include "twistlab/finite_vector.hpp"

namespace twistlab {

// Supports larger than this would make the O(N^4) interval program and its
// reconstruction tables unreasonable; kMaxIndex still caps where the support
// may sit, this caps how many points it may contain.
inline constexpr std::size_t kMaxNormSupport = 128;

// Certificate tree for the recursive norm.  A leaf names one coordinate.  A
// node is an admissible family of blocks: children cover strictly increasing
// index ranges and there are at most span_min(first child) of them.
struct WitnessTree {
  int index = 0;                      // leaf coordinate, 0 for nodes
  std::vector<WitnessTree> children;  // empty exactly for leaves

  bool is_leaf() const { return children.empty(); }

  static WitnessTree leaf(int index) {
    WitnessTree t;
    t.index = index;
    return t;
  }

  static WitnessTree node(std::vector<WitnessTree> children) {
    WitnessTree t;
    t.children = std::move(children);
    return t;
  }

  int span_min() const {
    return is_leaf() ? index : children.front().span_min();
  }
  int span_max() const {
    return is_leaf() ? index : children.back().span_max();
  }
};

// Throws InadmissibleTreeError unless every node satisfies the block
// constraints.  Leaf indices must be valid coordinates.
inline void validate_witness(const WitnessTree& t) {
  if (t.is_leaf()) {
    if (t.index < 1 || t.index > kMaxIndex) {
      throw InadmissibleTreeError("leaf index " + std::to_string(t.index) +
                                  " outside [1, " + std::to_string(kMaxIndex) +
                                  "]");
    }
    return;
  }
  if (t.index != 0) {
    throw InadmissibleTreeError("node carries a leaf index");
  }
  for (const auto& c : t.children) validate_witness(c);
  for (std::size_t i = 0; i + 1 < t.children.size(); ++i) {
    if (t.children[i].span_max() >= t.children[i + 1].span_min()) {
      throw InadmissibleTreeError("child blocks not strictly increasing");
    }
  }
  if (static_cast<int>(t.children.size()) > t.children.front().span_min()) {
    throw InadmissibleTreeError(
        "family of " + std::to_string(t.children.size()) +
        " blocks starts at index " +
        std::to_string(t.children.front().span_min()));
  }
}

// Dual functional of a witness: each leaf contributes 2^-depth on its
// coordinate.  Always feasible for the norm: <f, |z|> <= ||z|| for every z.
inline FiniteVector witness_functional(const WitnessTree& t) {
  validate_witness(t);
  FiniteVector f;
  auto walk = [&](auto&& self, const WitnessTree& node, double weight) -> void {
    if (node.is_leaf()) {
      f.set(node.index, weight);
      return;
    }
    for (const auto& c : node.children) self(self, c, 0.5 * weight);
  };
  walk(walk, t, 1.0);
  return f;
}

// Value the witness assigns to v.  Children accumulate right to left so the
// floating-point association matches the dynamic program exactly; the
// norm-equals-witness-value identity below is bitwise, not approximate.
inline double witness_value(const WitnessTree& t, const FiniteVector& v) {
  if (t.is_leaf()) return std::fabs(v.at(t.index));
  double acc = 0.0;
  for (auto it = t.children.rbegin(); it != t.children.rend(); ++it) {
    acc = witness_value(*it, v) + acc;
  }
  return 0.5 * acc;
}

struct NormResult {
  double value = 0.0;
  WitnessTree witness;  // witness_value(witness, input) == value
};

namespace detail {

// Interval engine for the recursive norm.
//
// Restricting families to index intervals loses nothing: replacing each block
// by its interval hull preserves the successiveness and counting constraints
// and never decreases any term.  On the support points s[0..N-1] with weights
// a[i] = |v_{s_i}| the program is
//
//   tn(i,j)  = max( max_{i<=r<=j} a[r],  fam(i,j) / 2 )
//   fam(i,j) = best sum tn(p1,q1) + ... + tn(pk,qk) over k >= 2 successive
//              subintervals of [i,j] with p1 >= i and k <= s[p1],
//
// where the k = 1 case of the defining recursion is dropped: a single block
// is dominated by tn of the block itself, and keeping it would make the
// recursion self-referential.
//
// fam is filled by scanning the first block [p1,q1] and closing with
//   E_j(t,p) = best sum of exactly t successive subinterval values inside
//              [p,j], no count constraint,
// maximized over 1 <= t <= min(s[p1], j-p1+1) - 1 (the D table).  E tables
// are kept per right endpoint j for witness reconstruction.
class IntervalEngine {
 public:
  explicit IntervalEngine(const FiniteVector& v) {
    for (const auto& [k, x] : v.entries()) {
      s_.push_back(k);
      a_.push_back(std::fabs(x));
    }
    n_ = s_.size();
    if (n_ > kMaxNormSupport) {
      throw SupportTooLargeError("norm support " + std::to_string(n_) +
                                 " exceeds " +
                                 std::to_string(kMaxNormSupport) + " points");
    }
    run();
  }

  NormResult result() const {
    if (n_ == 0) return NormResult{0.0, WitnessTree::leaf(1)};
    NormResult r;
    r.value = tn_[idx(0, n_ - 1)];
    r.witness = rebuild(0, n_ - 1);
    return r;
  }

 private:
  static constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  std::size_t idx(std::size_t i, std::size_t j) const { return i * n_ + j; }

  // E table for right endpoint j: (j+2) x (j+2), entry [t][p].
  double e_at(std::size_t j, std::size_t t, std::size_t p) const {
    return etab_[j][t * (j + 2) + p];
  }
  double& e_ref(std::size_t j, std::size_t t, std::size_t p) {
    return etab_[j][t * (j + 2) + p];
  }

  void run() {
    if (n_ == 0) return;
    tn_.assign(n_ * n_, 0.0);
    fam_.assign(n_ * n_, kNegInf);
    etab_.assign(n_, {});
    // dplus[t][p]: best E_j(t', p) over 1 <= t' <= t, rebuilt per j.
    std::vector<double> dplus;

    for (std::size_t j = 0; j < n_; ++j) {
      const std::size_t cols = j + 2;
      etab_[j].assign(cols * cols, kNegInf);
      dplus.assign(cols * cols, kNegInf);
      for (std::size_t p = 0; p <= j + 1; ++p) e_ref(j, 0, p) = 0.0;

      double amax = kNegInf;
      for (std::size_t ii = 0; ii <= j; ++ii) {
        const std::size_t i = j - ii;
        amax = (i == j) ? a_[i] : std::max(a_[i], amax);

        // fam(i,j): either first block starts after i, or at i.
        double cand = (i + 1 <= j) ? fam_[idx(i + 1, j)] : kNegInf;
        const long cap = std::min<long>(s_[i], static_cast<long>(j - i + 1));
        if (cap >= 2) {
          const std::size_t tcap = static_cast<std::size_t>(cap - 1);
          for (std::size_t q1 = i; q1 + 1 <= j; ++q1) {
            const double tail = dplus[std::min(tcap, j - q1) * cols + (q1 + 1)];
            if (tail != kNegInf) {
              cand = std::max(cand, tn_[idx(i, q1)] + tail);
            }
          }
        }
        fam_[idx(i, j)] = cand;
        double t = amax;
        if (cand != kNegInf) t = std::max(t, 0.5 * cand);
        tn_[idx(i, j)] = t;

        // E_j(t, i) and the running-max D table at column i.
        const std::size_t tmax = j - i + 1;
        for (std::size_t tt = 1; tt <= tmax; ++tt) {
          double best = e_at(j, tt, i + 1);
          for (std::size_t q = i; q <= j; ++q) {
            const double rest = e_at(j, tt - 1, q + 1);
            if (rest != kNegInf) {
              best = std::max(best, tn_[idx(i, q)] + rest);
            }
          }
          e_ref(j, tt, i) = best;
        }
        for (std::size_t tt = 1; tt <= j + 1; ++tt) {
          dplus[tt * cols + i] =
              std::max(dplus[(tt - 1) * cols + i], e_at(j, tt, i));
        }
      }
    }
  }

  // Smallest support position in [i, j] attaining the running max.
  std::size_t argmax_abs(std::size_t i, std::size_t j) const {
    std::size_t best = i;
    for (std::size_t r = i; r <= j; ++r) {
      if (a_[r] > a_[best]) best = r;
    }
    return best;
  }

  double max_abs(std::size_t i, std::size_t j) const {
    return a_[argmax_abs(i, j)];
  }

  // Extracts t successive blocks inside [p, j] whose values sum (right to
  // left) to E_j(t, p) exactly.  Equality tests are safe: every compared
  // value was produced by the identical expression during the forward pass.
  std::vector<std::pair<std::size_t, std::size_t>> extract(std::size_t j,
                                                           std::size_t t,
                                                           std::size_t p) const {
    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    double needed = e_at(j, t, p);
    while (t > 0) {
      bool found = false;
      for (std::size_t q = p; q <= j && !found; ++q) {
        const double rest = e_at(j, t - 1, q + 1);
        if (rest != kNegInf && tn_[idx(p, q)] + rest == needed) {
          blocks.emplace_back(p, q);
          needed = rest;
          p = q + 1;
          --t;
          found = true;
        }
      }
      if (!found) ++p;  // the skip branch achieved the max
    }
    return blocks;
  }

  WitnessTree rebuild(std::size_t i, std::size_t j) const {
    const double t = tn_[idx(i, j)];
    if (t == max_abs(i, j)) {
      return WitnessTree::leaf(s_[argmax_abs(i, j)]);
    }
    const double target = fam_[idx(i, j)];
    for (std::size_t k = 2; k <= j - i + 1; ++k) {
      for (std::size_t p1 = i; p1 + 1 <= j; ++p1) {
        if (static_cast<long>(k) > s_[p1]) continue;
        for (std::size_t q1 = p1; q1 + 1 <= j; ++q1) {
          const double rest = e_at(j, k - 1, q1 + 1);
          if (rest == kNegInf) continue;
          if (tn_[idx(p1, q1)] + rest != target) continue;
          std::vector<WitnessTree> children;
          children.push_back(rebuild(p1, q1));
          for (const auto& [p, q] : extract(j, k - 1, q1 + 1)) {
            children.push_back(rebuild(p, q));
          }
          return WitnessTree::node(std::move(children));
        }
      }
    }
    // Unreachable: fam was computed as a max over exactly these candidates.
    return WitnessTree::leaf(s_[argmax_abs(i, j)]);
  }

  std::size_t n_ = 0;
  std::vector<long> s_;
  std::vector<double> a_;
  std::vector<double> tn_;
  std::vector<double> fam_;
  std::vector<std::vector<double>> etab_;
};

}  // namespace detail

// Recursive norm with certificate.  The returned witness reproduces the value
// bitwise through witness_value.  Zero vector: value 0 with a trivial leaf.
inline NormResult tsirelson_norm(const FiniteVector& v) {
  detail::IntervalEngine engine(v);
  return engine.result();
}

// 2-convexified variant: sqrt of the norm of the squared vector.  The
// witness certifies the squared vector, so witness_value(witness, squared(v))
// equals value^2 up to the final sqrt rounding.
inline NormResult tsirelson2_norm(const FiniteVector& v) {
  NormResult r = tsirelson_norm(squared(v));
  r.value = std::sqrt(r.value);
  return r;
}

}  // namespace twistlab
