#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cidlab/processes.hpp"

namespace cidlab {

using Rational = boost::multiprecision::cpp_rational;

/// Exact law of (X_1, ..., X_n) on {0, 1}^n. Atom index bit i holds X_{i+1}.
struct ExactJointLaw {
  int n = 0;
  std::vector<Rational> pmf;

  static std::uint32_t index_of(std::span<const int> atom);
  std::vector<int> atom_of(std::uint32_t index) const;
  const Rational& probability(std::span<const int> atom) const {
    return pmf[index_of(atom)];
  }
  Rational total() const;
};

inline constexpr int kMaxEnumerationDepth = 12;

/// Builds the joint law by multiplying P(X_{k+1} = 1 | prefix) along every
/// binary path.
using PredictiveRule = std::function<Rational(std::span<const int> prefix)>;
ExactJointLaw enumerate_from_predictive(int depth, const PredictiveRule& p_one);

/// Exact joint law of a modified urn. Deterministic and prefix-rule
/// reinforcement are enumerated directly; i.i.d. reinforcement with finite
/// support is mixed exactly.
ExactJointLaw enumerate_polya_joint(const PolyaUrnSpec& spec, int depth);

/// Law of (X_{i_1}, ..., X_{i_k}) for 1-based distinct indices.
ExactJointLaw marginal_law(const ExactJointLaw& joint,
                           std::span<const int> indices);

struct Certificate {
  bool violated = false;
  int n = 0;
  std::vector<int> atom;
  Rational lhs = 0;
  Rational rhs = 0;
  std::vector<int> permutation;  // exchangeability witness, 1-based
};

struct CheckResult {
  bool holds = true;
  Certificate certificate;
};

/// [X_1..X_n, X_{n+2}] ~ [X_1..X_n, X_{n+1}] for every n < n_max, exactly.
CheckResult check_cid_eq5(const ExactJointLaw& joint, int n_max);
CheckResult check_cid_eq5(const PolyaUrnSpec& spec, int n_max);

/// Invariance of the pmf under every coordinate permutation. Binary atoms are
/// pruned to orbits, which are the classes of equal popcount.
CheckResult check_exchangeable(const ExactJointLaw& joint);

/// Applies the finite permutation tau (1-based, length depth, fixing every
/// index beyond depth - 2) and certifies the permuted sequence is c.i.d.
CheckResult check_permuted_cid(const ExactJointLaw& joint, std::span<const int> tau);
CheckResult check_permuted_cid(const PolyaUrnSpec& spec, std::span<const int> tau,
                               int depth);

/// P(X_{m+1..m+3} = (1,0,0)) - P(X_{m+1..m+3} = (0,1,0)). The two-coordinate
/// version vanishes for every c.i.d. binary sequence, so a third coordinate
/// is kept.
Rational swap_asymmetry(const ExactJointLaw& joint, int m);

}  // namespace cidlab
