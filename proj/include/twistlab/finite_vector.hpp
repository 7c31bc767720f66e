#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "twistlab/errors.hpp"

namespace twistlab {

// Largest coordinate index a vector may touch.  The admissibility constraints
// downstream depend on absolute positions, so indices are 1-based and capped
// rather than relabelled.
inline constexpr int kMaxIndex = 4096;

// A finitely supported real sequence indexed by 1, 2, 3, ...
// Invariant: the map never stores an explicit zero, so support_size() and
// iteration over entries() always describe the true support.
class FiniteVector {
 public:
  using Map = std::map<int, double>;

  FiniteVector() = default;

  FiniteVector(std::initializer_list<std::pair<const int, double>> init) {
    for (const auto& [k, v] : init) set(k, v);
  }

  static FiniteVector unit(int index) {
    FiniteVector v;
    v.set(index, 1.0);
    return v;
  }

  // Indicator of the index interval [lo, hi], both ends included.
  static FiniteVector indicator(int lo, int hi) {
    if (lo > hi) throw InvalidRangeError("indicator: empty range");
    FiniteVector v;
    for (int j = lo; j <= hi; ++j) v.set(j, 1.0);
    return v;
  }

  void set(int index, double value) {
    if (index < 1 || index > kMaxIndex) {
      throw SupportTooLargeError("coordinate index " + std::to_string(index) +
                                 " outside [1, " + std::to_string(kMaxIndex) +
                                 "]");
    }
    if (value == 0.0) {
      entries_.erase(index);
    } else {
      entries_[index] = value;
    }
  }

  double at(int index) const {
    auto it = entries_.find(index);
    return it == entries_.end() ? 0.0 : it->second;
  }

  bool empty() const { return entries_.empty(); }
  std::size_t support_size() const { return entries_.size(); }

  // 0 when the vector is zero; callers that need a support must check.
  int min_index() const { return entries_.empty() ? 0 : entries_.begin()->first; }
  int max_index() const { return entries_.empty() ? 0 : entries_.rbegin()->first; }

  const Map& entries() const { return entries_; }

  std::vector<int> support() const {
    std::vector<int> s;
    s.reserve(entries_.size());
    for (const auto& [k, v] : entries_) s.push_back(k);
    return s;
  }

  FiniteVector& operator+=(const FiniteVector& o) {
    for (const auto& [k, v] : o.entries_) set(k, at(k) + v);
    return *this;
  }

  FiniteVector& operator-=(const FiniteVector& o) {
    for (const auto& [k, v] : o.entries_) set(k, at(k) - v);
    return *this;
  }

  FiniteVector& operator*=(double s) {
    if (s == 0.0) {
      entries_.clear();
      return *this;
    }
    for (auto& [k, v] : entries_) v *= s;
    return *this;
  }

  friend FiniteVector operator+(FiniteVector a, const FiniteVector& b) {
    a += b;
    return a;
  }
  friend FiniteVector operator-(FiniteVector a, const FiniteVector& b) {
    a -= b;
    return a;
  }
  friend FiniteVector operator*(double s, FiniteVector v) {
    v *= s;
    return v;
  }
  friend FiniteVector operator*(FiniteVector v, double s) {
    v *= s;
    return v;
  }
  friend FiniteVector operator-(FiniteVector v) {
    v *= -1.0;
    return v;
  }

  bool operator==(const FiniteVector& o) const { return entries_ == o.entries_; }

  FiniteVector abs() const {
    FiniteVector r;
    for (const auto& [k, v] : entries_) r.entries_[k] = std::fabs(v);
    return r;
  }

  // Applies f to every stored entry; a zero image drops the coordinate.
  FiniteVector map(const std::function<double(double)>& f) const {
    FiniteVector r;
    for (const auto& [k, v] : entries_) r.set(k, f(v));
    return r;
  }

 private:
  Map entries_;
};

enum class Lp { l1, l2, linf };

inline double lp_norm(const FiniteVector& v, Lp p) {
  double acc = 0.0;
  switch (p) {
    case Lp::l1:
      for (const auto& [k, x] : v.entries()) acc += std::fabs(x);
      return acc;
    case Lp::l2:
      for (const auto& [k, x] : v.entries()) acc += x * x;
      return std::sqrt(acc);
    case Lp::linf:
      for (const auto& [k, x] : v.entries()) acc = std::max(acc, std::fabs(x));
      return acc;
  }
  return acc;
}

inline double l1_norm(const FiniteVector& v) { return lp_norm(v, Lp::l1); }
inline double l2_norm(const FiniteVector& v) { return lp_norm(v, Lp::l2); }
inline double sup_norm(const FiniteVector& v) { return lp_norm(v, Lp::linf); }

inline double dot(const FiniteVector& a, const FiniteVector& b) {
  // Iterate over the smaller support.
  const FiniteVector& small = a.support_size() <= b.support_size() ? a : b;
  const FiniteVector& big = a.support_size() <= b.support_size() ? b : a;
  double acc = 0.0;
  for (const auto& [k, v] : small.entries()) acc += v * big.at(k);
  return acc;
}

inline FiniteVector hadamard(const FiniteVector& a, const FiniteVector& b) {
  const FiniteVector& small = a.support_size() <= b.support_size() ? a : b;
  const FiniteVector& big = a.support_size() <= b.support_size() ? b : a;
  FiniteVector r;
  for (const auto& [k, v] : small.entries()) r.set(k, v * big.at(k));
  return r;
}

// Coordinate projection onto the index interval [lo, hi].
inline FiniteVector restrict(const FiniteVector& v, int lo, int hi) {
  if (lo > hi || lo < 1) {
    throw InvalidRangeError("restrict: invalid range [" + std::to_string(lo) +
                            ", " + std::to_string(hi) + "]");
  }
  FiniteVector r;
  for (const auto& [k, x] : v.entries()) {
    if (k >= lo && k <= hi) r.set(k, x);
  }
  return r;
}

// Componentwise square; useful enough downstream to deserve a name.
inline FiniteVector squared(const FiniteVector& v) {
  FiniteVector r;
  for (const auto& [k, x] : v.entries()) r.set(k, x * x);
  return r;
}

}  // namespace twistlab
