#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <string>

#include "twistlab/finite_vector.hpp"
#include "twistlab/tsirelson.hpp"

namespace twistlab {

// A lattice norm on finitely supported sequences, plus enough structure for
// the solvers: a subgradient of v -> ||v||, optionally a closed-form dual
// norm, and whether ||.|| dominates the sup norm (which yields the cheap
// coordinate upper bound ||y||_* <= sum |y_j| for dual estimation).
class NormOracle {
 public:
  virtual ~NormOracle() = default;
  virtual std::string name() const = 0;
  virtual double evaluate(const FiniteVector& v) const = 0;
  virtual FiniteVector subgradient(const FiniteVector& v) const = 0;
  virtual std::optional<double> exact_dual_norm(const FiniteVector&) const {
    return std::nullopt;
  }
  virtual bool dominates_sup_norm() const { return false; }
};

class L1Oracle final : public NormOracle {
 public:
  std::string name() const override { return "l1"; }
  double evaluate(const FiniteVector& v) const override { return l1_norm(v); }
  FiniteVector subgradient(const FiniteVector& v) const override {
    FiniteVector g;
    for (const auto& [k, x] : v.entries()) g.set(k, x < 0 ? -1.0 : 1.0);
    return g;
  }
  std::optional<double> exact_dual_norm(const FiniteVector& y) const override {
    return sup_norm(y);
  }
  bool dominates_sup_norm() const override { return true; }
};

class SupOracle final : public NormOracle {
 public:
  std::string name() const override { return "linf"; }
  double evaluate(const FiniteVector& v) const override { return sup_norm(v); }
  // Averaged over all coordinates within relative 1e-12 of the max, so that
  // symmetric inputs get symmetric subgradients and the descent methods do
  // not ping-pong between tied coordinates.
  FiniteVector subgradient(const FiniteVector& v) const override {
    const double m = sup_norm(v);
    FiniteVector g;
    if (m == 0.0) return g;
    const double cut = m * (1.0 - 1e-12);
    int ties = 0;
    for (const auto& [k, x] : v.entries()) {
      if (std::fabs(x) >= cut) ++ties;
    }
    for (const auto& [k, x] : v.entries()) {
      if (std::fabs(x) >= cut) g.set(k, (x < 0 ? -1.0 : 1.0) / ties);
    }
    return g;
  }
  std::optional<double> exact_dual_norm(const FiniteVector& y) const override {
    return l1_norm(y);
  }
  bool dominates_sup_norm() const override { return true; }
};

class L2Oracle final : public NormOracle {
 public:
  std::string name() const override { return "l2"; }
  double evaluate(const FiniteVector& v) const override { return l2_norm(v); }
  FiniteVector subgradient(const FiniteVector& v) const override {
    const double n = l2_norm(v);
    if (n == 0.0) return {};
    return v * (1.0 / n);
  }
  std::optional<double> exact_dual_norm(const FiniteVector& y) const override {
    return l2_norm(y);
  }
  bool dominates_sup_norm() const override { return true; }
};

class TsirelsonOracle final : public NormOracle {
 public:
  std::string name() const override { return "T"; }
  double evaluate(const FiniteVector& v) const override {
    return tsirelson_norm(v).value;
  }
  // The witness functional f is feasible with <f, |v|> = ||v||, so the
  // sign-aligned functional is a subgradient.
  FiniteVector subgradient(const FiniteVector& v) const override {
    NormResult r = tsirelson_norm(v);
    FiniteVector f = witness_functional(r.witness);
    FiniteVector g;
    for (const auto& [k, w] : f.entries()) {
      g.set(k, v.at(k) < 0 ? -w : w);
    }
    return g;
  }
  bool dominates_sup_norm() const override { return true; }
};

class Tsirelson2Oracle final : public NormOracle {
 public:
  std::string name() const override { return "T2"; }
  double evaluate(const FiniteVector& v) const override {
    return tsirelson2_norm(v).value;
  }
  // With f the witness functional of v^2 and n = ||v||, the functional
  // g_j = f_j v_j / n satisfies <g, v> = n and <g, z> <= ||z|| for every z
  // (Cauchy-Schwarz with weights f), hence is a subgradient.
  FiniteVector subgradient(const FiniteVector& v) const override {
    NormResult r = tsirelson2_norm(v);
    if (r.value == 0.0) return {};
    FiniteVector f = witness_functional(r.witness);
    FiniteVector g;
    for (const auto& [k, w] : f.entries()) {
      g.set(k, w * v.at(k) / r.value);
    }
    return g;
  }
  bool dominates_sup_norm() const override { return true; }
};

}  // namespace twistlab
