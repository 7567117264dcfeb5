#include <doctest.h>

#include <algorithm>
#include <vector>

#include "cidlab/error.hpp"
#include "cidlab/oracle.hpp"

using namespace cidlab;

namespace {

PolyaUrnSpec urn(std::vector<std::uint64_t> d) {
  PolyaUrnSpec s;
  s.reinforcement = reinforcement::Deterministic{std::move(d)};
  return s;
}

Rational atom(const ExactJointLaw& j, std::vector<int> bits) { return j.probability(bits); }

}  // namespace

TEST_CASE("standard urn at depth 2") {
  const auto j = enumerate_polya_joint(urn({1, 1}), 2);
  CHECK(atom(j, {1, 1}) == Rational(1, 3));
  CHECK(atom(j, {1, 0}) == Rational(1, 6));
  CHECK(atom(j, {0, 1}) == Rational(1, 6));
  CHECK(atom(j, {0, 0}) == Rational(1, 3));
}

TEST_CASE("d = (1, 2) at depth 3") {
  const auto j = enumerate_polya_joint(urn({1, 2}), 3);
  CHECK(atom(j, {1, 0, 0}) == Rational(1, 10));
  CHECK(atom(j, {0, 1, 0}) == Rational(1, 15));
}

TEST_CASE("pmf sums to exactly one") {
  PolyaUrnSpec iid;
  iid.reinforcement = reinforcement::Iid{dist::Discrete{{0.0, 1.0, 3.0}}};
  PolyaUrnSpec rule;
  rule.reinforcement = reinforcement::PrefixRule{
      2, [](std::span<const int> p) { return static_cast<std::uint64_t>(1 + std::count(p.begin(), p.end(), 1)); }};
  for (const auto& spec : {urn({1}), urn({1, 2, 3}), iid, rule})
    for (int n : {1, 5, 12}) {
      const auto j = enumerate_polya_joint(spec, n);
      CHECK(j.total() == 1);
      for (const auto& p : j.pmf) CHECK(p >= 0);
    }
  CHECK_THROWS_AS(enumerate_polya_joint(urn({1}), 13), SizeError);
}

TEST_CASE("i.i.d. reinforcement is mixed exactly") {
  // d in {1, 2} with equal mass: P(X_1 = 1, X_2 = 1) = 1/2 (1/2 * 2/3 + 1/2 * 3/4).
  PolyaUrnSpec iid;
  iid.reinforcement = reinforcement::Iid{dist::Discrete{{0.0, 1.0, 1.0}}};
  const auto j = enumerate_polya_joint(iid, 2);
  CHECK(atom(j, {1, 1}) == Rational(1, 2) * (Rational(1, 2) * Rational(2, 3) + Rational(1, 2) * Rational(3, 4)));
  CHECK(check_cid_eq5(iid, 4).holds);
}

TEST_CASE("marginal laws") {
  const auto j2 = enumerate_polya_joint(urn({1, 1}), 2);
  const std::vector<int> all{1, 2};
  CHECK(marginal_law(j2, all).pmf == j2.pmf);
  const std::vector<int> first{1};
  const auto m = marginal_law(j2, first);
  CHECK(m.pmf[0] == Rational(1, 2));
  CHECK(m.pmf[1] == Rational(1, 2));

  const auto j3 = enumerate_polya_joint(urn({1, 2}), 3);
  const std::vector<int> skip{1, 3};
  const std::vector<int> head{1, 2};
  CHECK(atom(marginal_law(j3, skip), {1, 1}) == Rational(1, 3));
  CHECK(atom(marginal_law(j3, head), {1, 1}) == Rational(1, 3));

  const std::vector<int> out_of_range{0};
  const std::vector<int> repeated{1, 1};
  const std::vector<int> too_big{4};
  CHECK_THROWS_AS(marginal_law(j3, out_of_range), IndexError);
  CHECK_THROWS_AS(marginal_law(j3, repeated), IndexError);
  CHECK_THROWS_AS(marginal_law(j3, too_big), IndexError);
}

TEST_CASE("c.i.d. check on urns") {
  CHECK(check_cid_eq5(urn({1, 2, 2}), 2).holds);
  CHECK(check_cid_eq5(urn({1, 2, 2}), 4).holds);
  CHECK(check_cid_eq5(urn({1}), 10).holds);
  CHECK(check_cid_eq5(urn({3, 1, 4, 1, 5}), 6).holds);
  CHECK_THROWS_AS(check_cid_eq5(urn({1}), 11), SizeError);
}

TEST_CASE("c.i.d. check on a fair coin and a corrupted law") {
  const auto coin = enumerate_from_predictive(5, [](std::span<const int>) { return Rational(1, 2); });
  CHECK(check_cid_eq5(coin, 4).holds);
  CHECK(check_exchangeable(coin).holds);

  // P(X_1 = 1) = 1/2 but P(X_2 = 1) = 3/4.
  const auto bad = enumerate_from_predictive(
      3, [](std::span<const int> p) { return p.size() == 1 ? Rational(3, 4) : Rational(1, 2); });
  const auto res = check_cid_eq5(bad, 2);
  CHECK_FALSE(res.holds);
  CHECK(res.certificate.violated);
  CHECK(res.certificate.n == 0);
  CHECK(res.certificate.atom == std::vector<int>{0});
  CHECK(res.certificate.lhs != res.certificate.rhs);
}

TEST_CASE("exchangeability") {
  CHECK(check_exchangeable(enumerate_polya_joint(urn({1, 1, 1}), 3)).holds);
  for (int n = 1; n <= 6; ++n) CHECK(check_exchangeable(enumerate_polya_joint(urn({1}), n)).holds);
  const auto res = check_exchangeable(enumerate_polya_joint(urn({1, 2}), 3));
  CHECK_FALSE(res.holds);
  CHECK(res.certificate.atom == std::vector<int>{0, 1, 0});
  CHECK(res.certificate.lhs == Rational(1, 15));
  CHECK(res.certificate.rhs == Rational(1, 10));
  CHECK(res.certificate.permutation == std::vector<int>{2, 1, 3});
  // Product law with unequal coordinates is not exchangeable; with equal it is.
  const auto product = enumerate_from_predictive(4, [](std::span<const int>) { return Rational(1, 3); });
  CHECK(check_exchangeable(product).holds);
}

TEST_CASE("results do not depend on iteration order") {
  const auto a = enumerate_polya_joint(urn({1, 2, 2}), 6);
  // Reverse the coordinates twice through marginal_law.
  const std::vector<int> rev{6, 5, 4, 3, 2, 1};
  const auto b = marginal_law(marginal_law(a, rev), rev);
  CHECK(a.pmf == b.pmf);
}

TEST_CASE("permuted c.i.d.") {
  const std::vector<int> id4{1, 2, 3, 4};
  CHECK(check_permuted_cid(urn({1, 2, 2}), id4, 4).holds);

  std::vector<int> head{1, 2, 3};
  do {
    std::vector<int> tau = head;
    tau.push_back(4);
    tau.push_back(5);
    CHECK(check_permuted_cid(urn({1}), tau, 5).holds);
  } while (std::next_permutation(head.begin(), head.end()));

  const std::vector<int> swap{2, 1, 3, 4};
  CHECK_FALSE(check_permuted_cid(urn({1, 2}), swap, 4).holds);

  const std::vector<int> moves_tail{1, 2, 4, 3};
  CHECK_THROWS_AS(check_permuted_cid(urn({1}), moves_tail, 4), ParameterError);
  const std::vector<int> not_perm{1, 1, 3, 4};
  CHECK_THROWS_AS(check_permuted_cid(urn({1}), not_perm, 4), ParameterError);
  CHECK_THROWS_AS(check_permuted_cid(urn({1}), id4, 11), SizeError);
}

TEST_CASE("swap asymmetry") {
  // The first-window gap of d = (1, 2) is 1/10 - 1/15 = 1/30.
  const auto j = enumerate_polya_joint(urn({1, 2}), 5);
  CHECK(swap_asymmetry(j, 0) == Rational(1, 30));
  // After the first step the urn is a standard urn: the gap vanishes.
  CHECK(swap_asymmetry(j, 1) == 0);
  CHECK(swap_asymmetry(enumerate_polya_joint(urn({1}), 5), 2) == 0);
}
