#include "cidlab/oracle.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <string>
#include <utility>

#include "cidlab/error.hpp"

namespace cidlab {

namespace {

void require_depth(int depth) {
  if (depth < 1 || depth > kMaxEnumerationDepth)
    throw SizeError("enumeration depth must lie in [1, " +
                    std::to_string(kMaxEnumerationDepth) + "]");
}

std::vector<int> prefix_bits(std::uint32_t index, int length) {
  std::vector<int> bits(static_cast<std::size_t>(length));
  for (int i = 0; i < length; ++i) bits[static_cast<std::size_t>(i)] = (index >> i) & 1u;
  return bits;
}

// Urn composition (white, total) reached along a prefix, with its mass.
using UrnStates = std::map<std::pair<std::int64_t, std::int64_t>, Rational>;

}  // namespace

std::uint32_t ExactJointLaw::index_of(std::span<const int> atom) {
  std::uint32_t index = 0;
  for (std::size_t i = 0; i < atom.size(); ++i)
    if (atom[i]) index |= 1u << i;
  return index;
}

std::vector<int> ExactJointLaw::atom_of(std::uint32_t index) const {
  return prefix_bits(index, n);
}

Rational ExactJointLaw::total() const {
  Rational sum = 0;
  for (const auto& p : pmf) sum += p;
  return sum;
}

ExactJointLaw enumerate_from_predictive(int depth, const PredictiveRule& p_one) {
  require_depth(depth);
  std::vector<Rational> level{Rational(1)};
  for (int k = 0; k < depth; ++k) {
    std::vector<Rational> next(level.size() * 2);
    for (std::uint32_t idx = 0; idx < level.size(); ++idx) {
      if (level[idx] == 0) continue;
      const auto prefix = prefix_bits(idx, k);
      const Rational p = p_one(prefix);
      if (p < 0 || p > 1) throw ParameterError("predictive probability outside [0, 1]");
      next[idx] = level[idx] * (1 - p);
      next[idx | (1u << k)] = level[idx] * p;
    }
    level = std::move(next);
  }
  return {depth, std::move(level)};
}

ExactJointLaw enumerate_polya_joint(const PolyaUrnSpec& spec, int depth) {
  require_depth(depth);
  spec.validate();

  // Reinforcement law of d_k given the prefix x_1..x_{k-1}.
  std::vector<std::pair<std::int64_t, Rational>> iid_support;
  if (const auto* iid = std::get_if<reinforcement::Iid>(&spec.reinforcement)) {
    const auto& weights = std::get<dist::Discrete>(iid->law).weights;
    Rational total = 0;
    for (double w : weights) total += Rational(w);
    for (std::size_t v = 1; v < weights.size(); ++v)
      if (weights[v] > 0.0)
        iid_support.emplace_back(static_cast<std::int64_t>(v), Rational(weights[v]) / total);
  }
  auto reinforcement_law = [&](int k, std::span<const int> prefix)
      -> std::vector<std::pair<std::int64_t, Rational>> {
    if (const auto* det = std::get_if<reinforcement::Deterministic>(&spec.reinforcement)) {
      return {{static_cast<std::int64_t>(det->at(static_cast<std::size_t>(k))), Rational(1)}};
    }
    if (const auto* rule = std::get_if<reinforcement::PrefixRule>(&spec.reinforcement)) {
      const std::uint64_t d = k == 1 ? rule->first : rule->rule(prefix);
      if (d < 1) throw ParameterError("urn: prefix rule returned d < 1");
      return {{static_cast<std::int64_t>(d), Rational(1)}};
    }
    return iid_support;
  };

  const auto w = static_cast<std::int64_t>(spec.w);
  const auto total0 = static_cast<std::int64_t>(spec.w + spec.r);
  std::vector<UrnStates> level(1);
  level[0][{w, total0}] = 1;
  for (int k = 1; k <= depth; ++k) {
    std::vector<UrnStates> next(level.size() * 2);
    for (std::uint32_t idx = 0; idx < level.size(); ++idx) {
      const auto prefix = prefix_bits(idx, k - 1);
      for (const auto& [state, mass] : level[idx]) {
        const auto [white, total] = state;
        const Rational p_white(white, total);
        for (int x = 0; x <= 1; ++x) {
          const Rational px = x ? p_white : 1 - p_white;
          if (px == 0) continue;
          const std::uint32_t child = idx | (x ? (1u << (k - 1)) : 0u);
          // d_k depends only on x_1..x_{k-1}.
          for (const auto& [d, pd] : reinforcement_law(k, prefix)) {
            next[child][{white + (x ? d : 0), total + d}] += mass * px * pd;
          }
        }
      }
    }
    level = std::move(next);
  }
  ExactJointLaw joint{depth, std::vector<Rational>(level.size())};
  for (std::size_t idx = 0; idx < level.size(); ++idx)
    for (const auto& [state, mass] : level[idx]) joint.pmf[idx] += mass;
  return joint;
}

ExactJointLaw marginal_law(const ExactJointLaw& joint, std::span<const int> indices) {
  std::vector<bool> seen(static_cast<std::size_t>(joint.n) + 1, false);
  for (int i : indices) {
    if (i < 1 || i > joint.n) throw IndexError("marginal_law: index out of range");
    if (seen[static_cast<std::size_t>(i)]) throw IndexError("marginal_law: repeated index");
    seen[static_cast<std::size_t>(i)] = true;
  }
  const int k = static_cast<int>(indices.size());
  ExactJointLaw out{k, std::vector<Rational>(std::size_t{1} << k)};
  for (std::uint32_t idx = 0; idx < joint.pmf.size(); ++idx) {
    if (joint.pmf[idx] == 0) continue;
    std::uint32_t target = 0;
    for (int j = 0; j < k; ++j)
      if ((idx >> (indices[static_cast<std::size_t>(j)] - 1)) & 1u) target |= 1u << j;
    out.pmf[target] += joint.pmf[idx];
  }
  return out;
}

CheckResult check_cid_eq5(const ExactJointLaw& joint, int n_max) {
  if (n_max < 1 || n_max + 1 > joint.n)
    throw SizeError("check_cid_eq5: joint law too shallow for n_max");
  for (int n = 0; n < n_max; ++n) {
    std::vector<int> head(static_cast<std::size_t>(n));
    std::iota(head.begin(), head.end(), 1);
    auto skip = head;
    skip.push_back(n + 2);
    auto next = head;
    next.push_back(n + 1);
    const auto lhs = marginal_law(joint, skip);
    const auto rhs = marginal_law(joint, next);
    for (std::uint32_t idx = 0; idx < lhs.pmf.size(); ++idx) {
      if (lhs.pmf[idx] != rhs.pmf[idx]) {
        CheckResult result{false, {}};
        result.certificate = {true, n, lhs.atom_of(idx), lhs.pmf[idx], rhs.pmf[idx], {}};
        return result;
      }
    }
  }
  return {};
}

CheckResult check_cid_eq5(const PolyaUrnSpec& spec, int n_max) {
  if (n_max < 1 || n_max + 2 > kMaxEnumerationDepth)
    throw SizeError("check_cid_eq5: n_max + 2 must not exceed 12");
  return check_cid_eq5(enumerate_polya_joint(spec, n_max + 1), n_max);
}

CheckResult check_exchangeable(const ExactJointLaw& joint) {
  // The first atom (lowest index) of each popcount class is its reference.
  std::vector<std::int64_t> reference(static_cast<std::size_t>(joint.n) + 1, -1);
  for (std::uint32_t idx = 0; idx < joint.pmf.size(); ++idx) {
    const auto ones = static_cast<std::size_t>(std::popcount(idx));
    if (reference[ones] < 0) {
      reference[ones] = idx;
      continue;
    }
    const auto ref = static_cast<std::uint32_t>(reference[ones]);
    if (joint.pmf[idx] == joint.pmf[ref]) continue;
    // Permutation sending the reference atom onto this one.
    const auto a = joint.atom_of(ref);
    const auto b = joint.atom_of(idx);
    std::vector<int> ones_a, zeros_a, ones_b, zeros_b;
    for (int i = 0; i < joint.n; ++i) {
      (a[static_cast<std::size_t>(i)] ? ones_a : zeros_a).push_back(i + 1);
      (b[static_cast<std::size_t>(i)] ? ones_b : zeros_b).push_back(i + 1);
    }
    std::vector<int> perm(static_cast<std::size_t>(joint.n));
    for (std::size_t j = 0; j < ones_a.size(); ++j)
      perm[static_cast<std::size_t>(ones_a[j] - 1)] = ones_b[j];
    for (std::size_t j = 0; j < zeros_a.size(); ++j)
      perm[static_cast<std::size_t>(zeros_a[j] - 1)] = zeros_b[j];
    CheckResult result{false, {}};
    result.certificate = {true, joint.n, b, joint.pmf[idx], joint.pmf[ref], perm};
    return result;
  }
  return {};
}

CheckResult check_permuted_cid(const ExactJointLaw& joint, std::span<const int> tau) {
  const int depth = joint.n;
  if (static_cast<int>(tau.size()) != depth)
    throw SizeError("check_permuted_cid: tau must have length depth");
  std::vector<int> sorted(tau.begin(), tau.end());
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < depth; ++i)
    if (sorted[static_cast<std::size_t>(i)] != i + 1)
      throw ParameterError("check_permuted_cid: tau is not a permutation");
  for (int i = std::max(depth - 2, 0); i < depth; ++i)
    if (tau[static_cast<std::size_t>(i)] != i + 1)
      throw ParameterError("check_permuted_cid: tau must fix indices beyond depth - 2");
  return check_cid_eq5(marginal_law(joint, tau), depth - 1);
}

CheckResult check_permuted_cid(const PolyaUrnSpec& spec, std::span<const int> tau,
                               int depth) {
  if (depth < 3 || depth > 10) throw SizeError("check_permuted_cid: depth must lie in [3, 10]");
  return check_permuted_cid(enumerate_polya_joint(spec, depth), tau);
}

Rational swap_asymmetry(const ExactJointLaw& joint, int m) {
  const std::vector<int> window{m + 1, m + 2, m + 3};
  const auto law = marginal_law(joint, window);
  // Bit 0 is X_{m+1}.
  return law.pmf[0b001] - law.pmf[0b010];
}

}  // namespace cidlab
