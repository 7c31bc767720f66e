#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "twistlab/errors.hpp"
#include "twistlab/finite_vector.hpp"
#include "twistlab/interpolation.hpp"
#include "twistlab/norm_oracle.hpp"
#include "twistlab/random.hpp"
#include "twistlab/twisted.hpp"

namespace twistlab {

// Spaces in which sign-average functionals are evaluated: plain sequence
// spaces behind a norm oracle, or derived spaces behind a quasi-norm.  Both
// expose the same surface to the tuple search below.
struct SequenceSpaceModel {
  using Vector = FiniteVector;
  static constexpr int kSlots = 1;

  std::shared_ptr<const NormOracle> oracle;
  std::string tag;
  int first_coord = 1;

  double norm(const Vector& v) const { return oracle->evaluate(v); }

  static SequenceSpaceModel l2() {
    return {std::make_shared<L2Oracle>(), "l2", 1};
  }
  static SequenceSpaceModel l1() {
    return {std::make_shared<L1Oracle>(), "l1", 1};
  }
  static SequenceSpaceModel linf() {
    return {std::make_shared<SupOracle>(), "linf", 1};
  }
  static SequenceSpaceModel tsirelson() {
    return {std::make_shared<TsirelsonOracle>(), "T", 1};
  }
  static SequenceSpaceModel tsirelson2() {
    return {std::make_shared<Tsirelson2Oracle>(), "T2", 1};
  }
};

struct TwistedSpaceModel {
  using Vector = TwistedVector;
  static constexpr int kSlots = 2;

  std::shared_ptr<TwistedSpace> space;
  std::string tag;
  int first_coord = 1;

  double norm(const Vector& v) const { return space->quasi_norm(v); }

  static TwistedSpaceModel make(const SpaceSpec& spec) {
    TwistedSpaceModel m;
    m.space = std::make_shared<TwistedSpace>(spec);
    m.tag = spec.tag();
    m.first_coord = spec.min_support;
    return m;
  }
};

enum class ConstantKind { type2, cotype2 };

// A certified lower bound for the n-vector type-2 or cotype-2 constant: the
// value is the ratio achieved by the stored witnesses and can be recomputed
// from them.
template <typename Vec>
struct ConstantEstimate {
  ConstantKind kind = ConstantKind::type2;
  int n = 0;
  double value = 0.0;
  std::vector<Vec> witnesses;
  std::string method = "exact-enum";
  std::string space;
  std::uint64_t seed = 0;
  int restarts = 0;
};

struct SearchOptions {
  int restarts = 8;
  std::uint64_t seed = 0;
  int climb_passes = 3;
  int random_kicks = 8;  // per pass, on top of the dyadic coordinate sweep
};

namespace detail {

inline void bump_coord(FiniteVector& v, int /*slot*/, int k, double d) {
  v.set(k, v.at(k) + d);
}
inline void bump_coord(TwistedVector& v, int slot, int k, double d) {
  FiniteVector& side = slot == 0 ? v.x : v.y;
  side.set(k, side.at(k) + d);
}

// Deterministic Box-Muller; std::normal_distribution is not portable
// bit-for-bit across standard libraries.
inline double gaussian(std::mt19937_64& rng) {
  const double u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log1p(-u1)) *
         std::cos(6.283185307179586476925286766559 * u2);
}

// Type/cotype functionals use the quadratic sign-average (E ||.||^2)^{1/2}:
// that is the convention under which the parallelogram identity makes both
// Euclidean constants exactly one for every tuple.  The first-moment average
// (used by distance_lower) would already give sqrt(2) on l2 via two copies of
// the same vector.
template <typename Model>
double sign_average_ratio(const Model& model,
                          const std::vector<typename Model::Vector>& tuple,
                          bool invert, bool quadratic = true) {
  double denom2 = 0.0;
  for (const auto& b : tuple) {
    const double nb = model.norm(b);
    denom2 += nb * nb;
  }
  auto norm = [&](const typename Model::Vector& v) { return model.norm(v); };
  const RademacherResult stats = rademacher_stats_exact(norm, tuple);
  const double avg = quadratic ? stats.quadratic_mean : stats.mean;
  if (!invert) {
    return denom2 > 0.0 ? avg / std::sqrt(denom2) : 0.0;
  }
  return avg > 0.0 ? std::sqrt(denom2) / avg : 0.0;
}

inline std::vector<std::vector<FiniteVector>> special_starts(
    const SequenceSpaceModel& model, int n) {
  const int base = model.first_coord;
  std::vector<std::vector<FiniteVector>> starts;
  std::vector<FiniteVector> disjoint, shifted, repeated;
  const int shift_base = std::max(base, n);
  for (int j = 0; j < n; ++j) {
    disjoint.push_back(FiniteVector::unit(base + j));
    shifted.push_back(FiniteVector::unit(shift_base + j));
    repeated.push_back(FiniteVector::unit(base));
  }
  starts.push_back(disjoint);
  starts.push_back(shifted);
  starts.push_back(repeated);
  if (n > 0 && (n & (n - 1)) == 0) {
    // Sylvester-Hadamard rows: the aligned sign pattern concentrates mass on
    // one coordinate, the classic sup-norm cotype witness.
    std::vector<FiniteVector> had;
    for (int j = 0; j < n; ++j) {
      FiniteVector row;
      for (int k = 0; k < n; ++k) {
        row.set(base + k, __builtin_popcount(j & k) % 2 == 0 ? 1.0 : -1.0);
      }
      had.push_back(row);
    }
    starts.push_back(had);
  }
  return starts;
}

inline std::vector<std::vector<TwistedVector>> special_starts(
    const TwistedSpaceModel& model, int n) {
  const int base = model.first_coord;
  std::vector<std::vector<TwistedVector>> starts;
  const auto lift = [&](const std::vector<FiniteVector>& seq, int slot) {
    std::vector<TwistedVector> out;
    for (const auto& v : seq) {
      TwistedVector t;
      (slot == 0 ? t.x : t.y) = v;
      out.push_back(t);
    }
    return out;
  };
  SequenceSpaceModel proxy;
  proxy.first_coord = base;
  for (const auto& seq : special_starts(proxy, n)) {
    starts.push_back(lift(seq, 0));
    starts.push_back(lift(seq, 1));
  }
  return starts;
}

inline FiniteVector random_sparse(std::mt19937_64& rng, int base, int cmax,
                                  int max_pts) {
  FiniteVector v;
  const long pts = uniform_int(rng, 1, max_pts);
  for (long c = 0; c < pts; ++c) {
    v.set(static_cast<int>(uniform_int(rng, base, cmax)),
          dyadic_value(rng, 16, 3));
  }
  return v;
}

inline std::vector<FiniteVector> random_start(const SequenceSpaceModel& model,
                                              int n, int cmax,
                                              std::mt19937_64& rng) {
  std::vector<FiniteVector> tuple;
  for (int j = 0; j < n; ++j) {
    tuple.push_back(random_sparse(rng, model.first_coord, cmax, 3));
  }
  return tuple;
}

inline std::vector<TwistedVector> random_start(const TwistedSpaceModel& model,
                                               int n, int cmax,
                                               std::mt19937_64& rng) {
  std::vector<TwistedVector> tuple;
  for (int j = 0; j < n; ++j) {
    TwistedVector t;
    if (uniform01(rng) < 0.75) {
      t.x = random_sparse(rng, model.first_coord, cmax, 2);
    }
    if (uniform01(rng) < 0.75) {
      t.y = random_sparse(rng, model.first_coord, cmax, 2);
    }
    if (t.empty()) t.y = FiniteVector::unit(model.first_coord);
    tuple.push_back(t);
  }
  return tuple;
}

template <typename Model>
double hill_climb(const Model& model,
                  std::vector<typename Model::Vector>& tuple, bool invert,
                  int cmax, const SearchOptions& opts, std::mt19937_64& rng) {
  static const double kDeltas[] = {1.0, 0.5, 0.25, 0.125, 0.0625};
  double best = sign_average_ratio(model, tuple, invert);
  for (int pass = 0; pass < opts.climb_passes; ++pass) {
    bool improved = false;
    for (std::size_t j = 0; j < tuple.size(); ++j) {
      for (int slot = 0; slot < Model::kSlots; ++slot) {
        for (int k = model.first_coord; k <= cmax; ++k) {
          for (double delta : kDeltas) {
            for (double sign : {1.0, -1.0}) {
              auto cand = tuple;
              bump_coord(cand[j], slot, k, sign * delta);
              const double r = sign_average_ratio(model, cand, invert);
              if (r > best * (1.0 + 1e-12)) {
                best = r;
                tuple = std::move(cand);
                improved = true;
              }
            }
          }
        }
      }
    }
    for (int kick = 0; kick < opts.random_kicks; ++kick) {
      auto cand = tuple;
      const auto j =
          static_cast<std::size_t>(uniform_int(rng, 0, tuple.size() - 1));
      const int slot =
          Model::kSlots == 1 ? 0 : static_cast<int>(uniform_int(rng, 0, 1));
      const int k = static_cast<int>(uniform_int(rng, model.first_coord, cmax));
      bump_coord(cand[j], slot, k, 0.25 * gaussian(rng));
      const double r = sign_average_ratio(model, cand, invert);
      if (r > best * (1.0 + 1e-12)) {
        best = r;
        tuple = std::move(cand);
        improved = true;
      }
    }
    if (!improved) break;
  }
  return best;
}

template <typename Model>
ConstantEstimate<typename Model::Vector> constant_search(
    const Model& model, ConstantKind kind, int n, const SearchOptions& opts) {
  if (n < 1 || n > kMaxExactRademacher) {
    throw TooManyVectorsError("tuple size must lie in [1, " +
                              std::to_string(kMaxExactRademacher) + "]");
  }
  const bool invert = kind == ConstantKind::cotype2;
  const int cmax = model.first_coord + 2 * n;

  ConstantEstimate<typename Model::Vector> est;
  est.kind = kind;
  est.n = n;
  est.space = model.tag;
  est.seed = opts.seed;
  est.restarts = opts.restarts;

  // Deterministic starts first, then seeded restarts; each restart draws from
  // its own derived stream so the outcome is independent of evaluation order.
  int restart_index = 0;
  auto consider = [&](std::vector<typename Model::Vector> tuple) {
    auto rng = make_rng(opts.seed, static_cast<std::uint64_t>(restart_index));
    ++restart_index;
    const double r = hill_climb(model, tuple, invert, cmax, opts, rng);
    if (r > est.value) {
      est.value = r;
      est.witnesses = std::move(tuple);
    }
  };
  for (auto& start : special_starts(model, n)) consider(std::move(start));
  for (int r = 0; r < opts.restarts; ++r) {
    auto rng = make_rng(opts.seed, 1000 + static_cast<std::uint64_t>(r));
    consider(random_start(model, n, cmax, rng));
  }
  return est;
}

}  // namespace detail

// Exact ratio (E ||sum eps_j b_j||^2)^{1/2} / (sum ||b_j||^2)^{1/2} of a
// fixed tuple: the quantity maximized by the type-2 search, recomputable from
// stored witnesses.
template <typename Model>
double type_ratio(const Model& model,
                  const std::vector<typename Model::Vector>& tuple) {
  if (tuple.empty()) throw InvalidRangeError("tuple must be nonempty");
  return detail::sign_average_ratio(model, tuple, false);
}

template <typename Model>
double cotype_ratio(const Model& model,
                    const std::vector<typename Model::Vector>& tuple) {
  if (tuple.empty()) throw InvalidRangeError("tuple must be nonempty");
  return detail::sign_average_ratio(model, tuple, true);
}

template <typename Model>
ConstantEstimate<typename Model::Vector> type2_lower(
    const Model& model, int n, const SearchOptions& opts = {}) {
  return detail::constant_search(model, ConstantKind::type2, n, opts);
}

template <typename Model>
ConstantEstimate<typename Model::Vector> cotype2_lower(
    const Model& model, int n, const SearchOptions& opts = {}) {
  return detail::constant_search(model, ConstantKind::cotype2, n, opts);
}

// Lower bound for the Banach-Mazur distance of span(tuple) to a Euclidean
// space: the first-moment sign-average E ||sum eps_j x_j|| over the l2 sum of
// the norms.
template <typename Model>
double distance_lower(const Model& model,
                      const std::vector<typename Model::Vector>& tuple) {
  if (tuple.empty()) throw InvalidRangeError("tuple must be nonempty");
  return detail::sign_average_ratio(model, tuple, false, /*quadratic=*/false);
}

struct DistanceBounds {
  double lower = 1.0;
  double upper_indicative = 0.0;
  int n = 0;
  std::string notes;
};

// d <= 2 sqrt(2 pi) a c from the type/cotype product.  The inputs are search
// lower bounds of the true constants, so the upper bound is indicative only;
// the honest lower bound is the ratio realized by the type-2 witnesses.
template <typename Vec>
DistanceBounds kwapien_combination(const ConstantEstimate<Vec>& a_est,
                                   const ConstantEstimate<Vec>& c_est) {
  if (a_est.kind != ConstantKind::type2 ||
      c_est.kind != ConstantKind::cotype2) {
    throw MismatchedInputsError("expected a type2 and a cotype2 estimate");
  }
  if (a_est.space != c_est.space || a_est.n != c_est.n) {
    throw MismatchedInputsError(
        "estimates must target the same space and tuple size");
  }
  DistanceBounds d;
  d.n = a_est.n;
  d.upper_indicative =
      2.0 * std::sqrt(2.0 * 3.1415926535897932384626433832795) * a_est.value *
      c_est.value;
  d.lower = a_est.value;
  d.notes =
      "upper combines search lower bounds of the constants (indicative); "
      "lower is realized by the stored type-2 witnesses";
  return d;
}

// Sign-average commutator test for a centralizer: how far Omega is from
// commuting with signed sums, against the selector-bound prediction.
//
//   lhs = E || Omega(sum eps b) - sum eps Omega(b) - log(a0/a1) sum eps b ||_2
//   rhs = gamma (sum ||b||_2^2)^{1/2},  gamma = theta_tilde rho sqrt(a0 a1)
//
// a0, a1 are caller-supplied type-2 constants of the endpoint spaces (with
// provenance documented by the caller); rho is the largest selector bound among
// the factorizations actually used.
struct CommutatorReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double gamma = 0.0;
  double rho = 1.0;
  double theta_tilde = 2.0;
  double a0 = 0.0;
  double a1 = 0.0;
  double ratio = 0.0;
  int n = 0;
  std::string couple_tag;
};

inline CommutatorReport centralizer_commutator_check(
    const Couple& couple, const std::vector<FiniteVector>& tuple, double a0,
    double a1) {
  if (std::fabs(couple.theta - 0.5) > 1e-15) {
    throw Error("commutator check is defined at theta = 1/2");
  }
  if (tuple.empty()) throw InvalidRangeError("tuple must be nonempty");
  if (tuple.size() > 12) {
    throw TooManyVectorsError("commutator enumeration is capped at 12 vectors");
  }
  if (a0 <= 0.0 || a1 <= 0.0) {
    throw DomainError("type constants must be positive");
  }

  CommutatorReport rep;
  rep.n = static_cast<int>(tuple.size());
  rep.couple_tag = couple.tag;
  rep.a0 = a0;
  rep.a1 = a1;
  rep.theta_tilde = couple.theta_tilde();

  // Balanced factorizations have rho >= 1; track the worst one used.  The
  // canonical-form cache mirrors the derived-space evaluator so sign flips of
  // the same profile cost one solve.
  double rho = 1.0;
  std::map<std::vector<std::pair<int, double>>, std::map<int, double>> cache;
  auto omega_of = [&](const FiniteVector& y) {
    if (y.empty()) return FiniteVector{};
    const double n2 = l2_norm(y);
    std::vector<std::pair<int, double>> key;
    for (const auto& [k, v] : y.entries()) {
      key.emplace_back(k, std::fabs(v) / n2);
    }
    auto it = cache.find(key);
    if (it == cache.end()) {
      FiniteVector canon;
      for (const auto& [k, v] : key) canon.set(k, v);
      const CentralizerResult r = centralizer_detail(couple, canon);
      std::map<int, double> logratio;
      for (const auto& [k, unused] : canon.entries()) {
        logratio.emplace(k, std::log(r.factorization.b.at(k) /
                                     r.factorization.a.at(k)));
      }
      rho = std::max(rho, r.factorization.rho_achieved);
      it = cache.emplace(key, std::move(logratio)).first;
    }
    FiniteVector om;
    for (const auto& [k, v] : y.entries()) om.set(k, v * it->second.at(k));
    return om;
  };

  std::vector<FiniteVector> omegas;
  double sumsq = 0.0;
  for (const auto& b : tuple) {
    omegas.push_back(omega_of(b));
    const double nb = l2_norm(b);
    sumsq += nb * nb;
  }

  const double logterm = std::log(a0 / a1);
  detail::KahanSum lhs_sum;
  const std::uint64_t patterns = std::uint64_t{1} << tuple.size();
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    FiniteVector s, om_lin;
    for (std::size_t j = 0; j < tuple.size(); ++j) {
      if (mask & (std::uint64_t{1} << j)) {
        s -= tuple[j];
        om_lin -= omegas[j];
      } else {
        s += tuple[j];
        om_lin += omegas[j];
      }
    }
    const FiniteVector dev = omega_of(s) - om_lin - s * logterm;
    lhs_sum.add(l2_norm(dev));
  }
  rep.lhs = lhs_sum.value() / static_cast<double>(patterns);
  rep.rho = rho;
  rep.gamma = rep.theta_tilde * rho * std::sqrt(a0) * std::sqrt(a1);
  rep.rhs = rep.gamma * std::sqrt(sumsq);
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
  return rep;
}

// Type-2 diagnostic for a derived space: the tuple's sign-average ratio
// against theta_tilde rho a_theta (sqrt(a0 a1) + |log(a0/a1)|).
struct DerivedTypeReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double rho = 1.0;
  double theta_tilde = 2.0;
  double a0 = 0.0;
  double a1 = 0.0;
  double a_theta = 0.0;
  double ratio = 0.0;
  int n = 0;
  std::string space_tag;
};

inline DerivedTypeReport derived_type_bound_check(
    const TwistedSpace& space, const std::vector<TwistedVector>& tuple,
    double a0, double a1, double a_theta) {
  if (tuple.empty()) throw InvalidRangeError("tuple must be nonempty");
  if (a0 <= 0.0 || a1 <= 0.0 || a_theta <= 0.0) {
    throw DomainError("type constants must be positive");
  }
  DerivedTypeReport rep;
  rep.n = static_cast<int>(tuple.size());
  rep.space_tag = space.tag();
  rep.a0 = a0;
  rep.a1 = a1;
  rep.a_theta = a_theta;

  double sumsq = 0.0;
  for (const auto& v : tuple) {
    const double q = space.quasi_norm(v);
    sumsq += q * q;
  }
  auto norm = [&](const TwistedVector& v) { return space.quasi_norm(v); };
  const double mean = detail::rademacher_stats_exact(norm, tuple).mean;
  rep.lhs = sumsq > 0.0 ? mean / std::sqrt(sumsq) : 0.0;
  rep.rho = space.rho_bound();
  rep.rhs = rep.theta_tilde * rep.rho * a_theta *
            (std::sqrt(a0 * a1) + std::fabs(std::log(a0 / a1)));
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
  return rep;
}

// log applied m times; defined only where the result stays at or above 1.
inline double iterated_log(int m, double x) {
  if (m < 1) throw InvalidRangeError("iteration count must be at least 1");
  double r = x;
  for (int i = 0; i < m; ++i) {
    if (r <= 0.0) {
      throw DomainError("iterated log undefined: intermediate value is not positive");
    }
    r = std::log(r);
  }
  if (r < 1.0 - 1e-12) {
    throw DomainError("iterated log left the hierarchy's domain (result below 1)");
  }
  return r;
}

}  // namespace twistlab
