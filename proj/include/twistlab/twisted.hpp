#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "twistlab/errors.hpp"
#include "twistlab/finite_vector.hpp"
#include "twistlab/interpolation.hpp"
#include "twistlab/random.hpp"

namespace twistlab {

// Element (x, y) of a derived space.  The canonical basis interleaves the two
// slots: v_{2j-1} = (e_j, 0), v_{2j} = (0, e_j).
struct TwistedVector {
  FiniteVector x;
  FiniteVector y;

  TwistedVector& operator+=(const TwistedVector& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  TwistedVector& operator-=(const TwistedVector& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  TwistedVector& operator*=(double c) {
    x *= c;
    y *= c;
    return *this;
  }
  friend TwistedVector operator+(TwistedVector a, const TwistedVector& b) {
    return a += b;
  }
  friend TwistedVector operator-(TwistedVector a, const TwistedVector& b) {
    return a -= b;
  }
  friend TwistedVector operator*(TwistedVector a, double c) { return a *= c; }
  friend TwistedVector operator*(double c, TwistedVector a) { return a *= c; }
  friend TwistedVector operator-(TwistedVector a) { return a *= -1.0; }
  friend bool operator==(const TwistedVector& a, const TwistedVector& b) {
    return a.x == b.x && a.y == b.y;
  }

  bool empty() const { return x.empty() && y.empty(); }

  static TwistedVector first_slot(int j) {
    return TwistedVector{FiniteVector::unit(j), FiniteVector{}};
  }
  static TwistedVector second_slot(int j) {
    return TwistedVector{FiniteVector{}, FiniteVector::unit(j)};
  }
};

// <(x,y),(u,v)> = <x,v> + <y,u>: the cross pairing under which the derived
// spaces studied here are isomorphic to their duals.
inline double pairing(const TwistedVector& u, const TwistedVector& v) {
  return dot(u.x, v.y) + dot(u.y, v.x);
}

// Which centralizer twists the l2 sum.  kalton_peck uses the closed-form
// logarithmic map with a scalar profile; interp runs the factorization solver
// on the convexified couple and restricts inputs to the tail section
// [min_support, infinity).
struct SpaceSpec {
  enum class Kind { kalton_peck, interp };
  Kind kind = Kind::kalton_peck;
  PhiSpec phi;
  int min_support = 1;
  std::optional<FactorizeOptions> factorize;  // interp: overrides couple default

  std::string tag() const {
    if (kind == Kind::kalton_peck) return "z2:" + phi.tag();
    return "zt2:tail=" + std::to_string(min_support);
  }

  static SpaceSpec kalton_peck_space(PhiSpec profile) {
    SpaceSpec s;
    s.kind = Kind::kalton_peck;
    s.phi = profile;
    return s;
  }
  static SpaceSpec derived_t2(int tail = 1) {
    if (tail < 1) throw InvalidRangeError("tail section must start at 1 or later");
    SpaceSpec s;
    s.kind = Kind::interp;
    s.min_support = tail;
    return s;
  }
};

// Evaluator for quasi_norm(x, y) = ||x - Omega(y)||_2 + ||y||_2.
//
// Factorizations are priced in dual-norm oracle calls, so interp spaces keep a
// per-space cache of log(b/a) keyed by the sign- and scale-canonical form
// |y| / ||y||_2; the solver itself only consumes that form, which is what
// makes the key safe.  rho_bound() reports the largest selector bound seen
// (every balanced factorization has rho >= 1 by the Hoelder inequality, and
// the closed-form map is the derivative of a 1-bounded family).
class TwistedSpace {
 public:
  explicit TwistedSpace(SpaceSpec spec) : spec_(std::move(spec)) {
    if (spec_.kind == SpaceSpec::Kind::interp) {
      couple_ = Couple::t2_pair();
      if (spec_.factorize) couple_->factorize_defaults = *spec_.factorize;
    }
  }

  const SpaceSpec& spec() const { return spec_; }
  std::string tag() const { return spec_.tag(); }

  FiniteVector omega(const FiniteVector& y) const {
    if (y.empty()) return FiniteVector{};
    if (spec_.kind == SpaceSpec::Kind::kalton_peck) {
      return kalton_peck_omega(y, spec_.phi);
    }
    check_support(y);
    const std::vector<std::pair<int, double>> key = canonical_key(y);
    CacheEntry entry;
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) entry = it->second;
    }
    if (entry.logratio.empty()) {
      FiniteVector canon;
      for (const auto& [k, v] : key) canon.set(k, v);
      const CentralizerResult r = centralizer_detail(*couple_, canon);
      for (const auto& [k, unused] : canon.entries()) {
        entry.logratio.emplace(
            k, std::log(r.factorization.b.at(k) / r.factorization.a.at(k)));
      }
      entry.rho = r.factorization.rho_achieved;
      std::lock_guard<std::mutex> lock(mu_);
      cache_.emplace(key, entry);
      if (entry.rho > max_rho_) max_rho_ = entry.rho;
    }
    FiniteVector om;
    for (const auto& [k, v] : y.entries()) om.set(k, v * entry.logratio.at(k));
    return om;
  }

  double quasi_norm(const TwistedVector& v) const {
    if (spec_.kind == SpaceSpec::Kind::interp) {
      check_support(v.x);
      check_support(v.y);
    }
    return l2_norm(v.x - omega(v.y)) + l2_norm(v.y);
  }

  double rho_bound() const {
    if (spec_.kind == SpaceSpec::Kind::kalton_peck) return 1.0;
    std::lock_guard<std::mutex> lock(mu_);
    return std::max(1.0, max_rho_);
  }

  std::size_t cache_size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.size();
  }

 private:
  struct CacheEntry {
    std::map<int, double> logratio;
    double rho = 0.0;
  };

  void check_support(const FiniteVector& v) const {
    if (!v.empty() && v.min_index() < spec_.min_support) {
      throw SupportViolationError(
          "vector enters the space below its tail index " +
          std::to_string(spec_.min_support));
    }
  }

  std::vector<std::pair<int, double>> canonical_key(
      const FiniteVector& y) const {
    const double n = l2_norm(y);
    std::vector<std::pair<int, double>> key;
    key.reserve(y.support_size());
    for (const auto& [k, v] : y.entries()) {
      key.emplace_back(k, std::fabs(v) / n);
    }
    return key;
  }

  SpaceSpec spec_;
  std::optional<Couple> couple_;
  mutable std::mutex mu_;
  mutable std::map<std::vector<std::pair<int, double>>, CacheEntry> cache_;
  mutable double max_rho_ = 0.0;
};

inline double quasi_norm(const TwistedSpace& space, const TwistedVector& v) {
  return space.quasi_norm(v);
}

constexpr int kMaxExactRademacher = 20;

struct RademacherResult {
  double mean = 0.0;
  double quadratic_mean = 0.0;  // (E ||.||^2)^{1/2}
  double stddev = 0.0;          // spread of the norm across sign patterns
  double stderr_of_mean = 0.0;
  long samples = 0;
  bool exact = false;
};

namespace detail {

class KahanSum {
 public:
  void add(double v) {
    const double t = s_ + v;
    if (std::fabs(s_) >= std::fabs(v)) {
      c_ += (s_ - t) + v;
    } else {
      c_ += (v - t) + s_;
    }
    s_ = t;
  }
  double value() const { return s_ + c_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

template <typename Norm, typename Vec>
RademacherResult rademacher_stats_exact(const Norm& norm,
                                        const std::vector<Vec>& vectors) {
  const std::size_t n = vectors.size();
  if (n > static_cast<std::size_t>(kMaxExactRademacher)) {
    throw TooManyVectorsError("exact sign enumeration is capped at " +
                              std::to_string(kMaxExactRademacher) +
                              " vectors");
  }
  const std::uint64_t patterns = std::uint64_t{1} << n;
  KahanSum sum, sumsq;
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    Vec acc{};
    for (std::size_t j = 0; j < n; ++j) {
      if (mask & (std::uint64_t{1} << j)) {
        acc -= vectors[j];
      } else {
        acc += vectors[j];
      }
    }
    const double v = norm(acc);
    sum.add(v);
    sumsq.add(v * v);
  }
  RademacherResult r;
  r.exact = true;
  r.samples = static_cast<long>(patterns);
  r.mean = sum.value() / static_cast<double>(patterns);
  const double mean2 = sumsq.value() / static_cast<double>(patterns);
  r.quadratic_mean = mean2 > 0.0 ? std::sqrt(mean2) : 0.0;
  const double var = mean2 - r.mean * r.mean;
  r.stddev = var > 0.0 ? std::sqrt(var) : 0.0;
  r.stderr_of_mean = 0.0;
  return r;
}

template <typename Norm, typename Vec>
RademacherResult rademacher_stats_montecarlo(const Norm& norm,
                                             const std::vector<Vec>& vectors,
                                             long samples,
                                             std::uint64_t seed) {
  if (samples < 1) throw InvalidRangeError("sample count must be positive");
  auto rng = make_rng(seed);
  KahanSum sum, sumsq;
  for (long s = 0; s < samples; ++s) {
    Vec acc{};
    for (const Vec& v : vectors) {
      if (uniform01(rng) < 0.5) {
        acc -= v;
      } else {
        acc += v;
      }
    }
    const double v = norm(acc);
    sum.add(v);
    sumsq.add(v * v);
  }
  RademacherResult r;
  r.exact = false;
  r.samples = samples;
  r.mean = sum.value() / static_cast<double>(samples);
  const double mean2 = sumsq.value() / static_cast<double>(samples);
  r.quadratic_mean = mean2 > 0.0 ? std::sqrt(mean2) : 0.0;
  double var = 0.0;
  if (samples > 1) {
    var = (sumsq.value() - static_cast<double>(samples) * r.mean * r.mean) /
          static_cast<double>(samples - 1);
  }
  r.stddev = var > 0.0 ? std::sqrt(var) : 0.0;
  r.stderr_of_mean = r.stddev / std::sqrt(static_cast<double>(samples));
  return r;
}

}  // namespace detail

enum class AverageMode { exact, montecarlo };

// E ||sum_j eps_j v_j|| over independent signs; exact enumeration of all 2^n
// patterns (n <= 20) or seeded sampling with a standard-error estimate.
inline RademacherResult rademacher_average(const TwistedSpace& space,
                                           const std::vector<TwistedVector>& vs,
                                           AverageMode mode = AverageMode::exact,
                                           long samples = 4096,
                                           std::uint64_t seed = 0) {
  auto norm = [&](const TwistedVector& v) { return space.quasi_norm(v); };
  if (mode == AverageMode::exact) {
    return detail::rademacher_stats_exact(norm, vs);
  }
  return detail::rademacher_stats_montecarlo(norm, vs, samples, seed);
}

}  // namespace twistlab
