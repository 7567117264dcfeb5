#include <doctest.h>

#include <cmath>
#include <vector>

#include "cidlab/error.hpp"
#include "cidlab/functions.hpp"
#include "cidlab/processes.hpp"
#include "cidlab/sampling.hpp"

using namespace cidlab;

namespace {

Eigen::MatrixXd sample_covariance(const std::vector<Eigen::VectorXd>& draws) {
  const auto d = draws.front().size();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (const auto& v : draws) mean += v;
  mean /= static_cast<double>(draws.size());
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  for (const auto& v : draws) cov += (v - mean) * (v - mean).transpose();
  return cov / static_cast<double>(draws.size() - 1);
}

}  // namespace

TEST_CASE("philox matches the published known-answer vector") {
  // Counter 0, key 0: first output block of Philox4x32-10 is
  // 6627e8d5 e169c58d bc57ac4c 9b00dbd8; words are paired high then low.
  Stream s = open_stream({0, 0, 0});
  CHECK(s.next_u64() == 0x6627e8d5e169c58dull);
  CHECK(s.next_u64() == 0xbc57ac4c9b00dbd8ull);
}

TEST_CASE("same key gives the same sequence") {
  Stream a = open_stream({42, 7, 3});
  Stream b = open_stream({42, 7, 3});
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("keys differing in replica differ") {
  Stream a = open_stream({42, 0, 0});
  Stream b = open_stream({42, 1, 0});
  int differ = 0;
  for (int i = 0; i < 1000; ++i) differ += a.next_u64() != b.next_u64();
  CHECK(differ > 0);
}

TEST_CASE("lanes are uncorrelated") {
  Stream a = open_stream({9, 4, 0});
  Stream b = open_stream({9, 4, 1});
  const int n = 100000;
  double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
  for (int i = 0; i < n; ++i) {
    const double x = a.uniform(), y = b.uniform();
    sa += x;
    sb += y;
    sab += x * y;
    saa += x * x;
    sbb += y * y;
  }
  const double cov = sab / n - (sa / n) * (sb / n);
  const double corr = cov / std::sqrt((saa / n - sa * sa / n / n) * (sbb / n - sb * sb / n / n));
  CHECK(std::abs(corr) < 0.01);
}

TEST_CASE("uniform stays inside the open unit interval") {
  Stream s = open_stream({1, 2, 3});
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("degenerate draws are exact") {
  Stream s = open_stream({3, 0, 0});
  CHECK(draw(s, dist::Normal{0.0, 0.0}) == 0.0);
  CHECK(draw(s, dist::Normal{2.5, 0.0}) == 2.5);
  CHECK(draw(s, dist::Bernoulli{1.0}) == 1.0);
  CHECK(draw(s, dist::Bernoulli{0.0}) == 0.0);
}

TEST_CASE("invalid distributions are rejected") {
  Stream s = open_stream({3, 0, 0});
  CHECK_THROWS_AS(draw(s, dist::Normal{0.0, -1.0}), ParameterError);
  CHECK_THROWS_AS(draw(s, dist::Bernoulli{1.5}), ParameterError);
  CHECK_THROWS_AS(draw(s, dist::Beta{0.0, 1.0}), ParameterError);
  CHECK_THROWS_AS(draw(s, dist::Uniform{1.0, 1.0}), ParameterError);
  CHECK_THROWS_AS(draw(s, dist::Discrete{{0.0, 0.0}}), ParameterError);
  CHECK_THROWS_AS(draw(s, dist::Discrete{{1.0, -1.0}}), ParameterError);
}

TEST_CASE("draw matches the first two moments within 5 standard errors") {
  const std::vector<ScalarDist> laws{dist::Normal{1.0, 4.0}, dist::Bernoulli{0.3}, dist::Beta{1.0, 1.0},
                                     dist::Beta{2.0, 5.0},   dist::Beta{0.5, 0.5}, dist::Uniform{-1.0, 3.0},
                                     dist::Discrete{{0.0, 1.0, 1.0}}};
  const int n = 100000;
  std::uint64_t replica = 0;
  for (const auto& law : laws) {
    Stream s = open_stream({11, replica++, 0});
    double sum = 0, sum_sq = 0;
    std::vector<double> xs(n);
    for (auto& x : xs) {
      x = draw(s, law);
      sum += x;
      sum_sq += x * x;
    }
    const double m = sum / n;
    const double v = sum_sq / n - m * m;
    const double sd = std::sqrt(variance(law));
    CHECK(std::abs(m - mean(law)) < 5.0 * sd / std::sqrt(n));
    double m4 = 0;
    for (double x : xs) m4 += std::pow(x - mean(law), 4);
    m4 /= n;
    const double se_var = std::sqrt((m4 - variance(law) * variance(law)) / n);
    // The second term covers estimating the mean.
    CHECK(std::abs(v - variance(law)) < 5.0 * se_var + 5.0 * variance(law) / n);
  }
}

TEST_CASE("Beta(1,1) mean") {
  Stream s = open_stream({5, 0, 0});
  double sum = 0;
  for (int i = 0; i < 100000; ++i) sum += draw(s, dist::Beta{1.0, 1.0});
  CHECK(std::abs(sum / 100000 - 0.5) < 0.01);
}

TEST_CASE("normal cdf and quantile") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(normal_cdf(1.959963985) == doctest::Approx(0.975).epsilon(1e-9));
  for (double p : {1e-10, 0.001, 0.2, 0.5, 0.9, 0.999999})
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-10));
}

TEST_CASE("cdf of each law") {
  CHECK(cdf(dist::Normal{1.0, 0.0}, 0.999) == 0.0);
  CHECK(cdf(dist::Normal{1.0, 0.0}, 1.0) == 1.0);
  CHECK(cdf(dist::Bernoulli{0.3}, 0.5) == doctest::Approx(0.7));
  CHECK(cdf(dist::Beta{1.0, 1.0}, 0.25) == doctest::Approx(0.25));
  CHECK(cdf(dist::Uniform{0.0, 2.0}, 1.0) == doctest::Approx(0.5));
  CHECK(cdf(dist::Discrete{{1.0, 1.0, 2.0}}, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("expectations of function descriptors") {
  CHECK(expectation(dist::Normal{0.0, 2.0}, FunctionDescriptor::power(2)) == doctest::Approx(2.0));
  CHECK(expectation(dist::Normal{1.0, 1.0}, FunctionDescriptor::power(4)) == doctest::Approx(10.0));
  CHECK(expectation(dist::Uniform{0.0, 1.0}, FunctionDescriptor::indicator(0.3)) == doctest::Approx(0.3));
  CHECK(expectation(dist::Bernoulli{0.25}, FunctionDescriptor::identity().scaled(4.0)) == doctest::Approx(1.0));
  CHECK(expectation(dist::Bernoulli{0.25}, FunctionDescriptor::custom({{0.0, 2.0}, {1.0, 6.0}})) ==
        doctest::Approx(3.0));
  CHECK_THROWS_AS(expectation(dist::Normal{0.0, 1.0}, FunctionDescriptor::custom({{0.0, 1.0}})),
                  UnsupportedError);
}

TEST_CASE("gaussian vector: degenerate 1x1") {
  Stream s = open_stream({1, 0, 0});
  const Eigen::VectorXd v = draw_gaussian_vector(s, Eigen::MatrixXd::Zero(1, 1));
  REQUIRE(v.size() == 1);
  CHECK(v(0) == 0.0);
}

TEST_CASE("gaussian vector: identity and Gamma_3 covariances") {
  Eigen::MatrixXd gamma(3, 3);
  gamma << 1, .5, .5, .5, 1, .75, .5, .75, 1;
  for (const Eigen::MatrixXd& target : {Eigen::MatrixXd(Eigen::MatrixXd::Identity(3, 3)), gamma}) {
    GaussianSampler sampler(target);
    Stream s = open_stream({77, 0, 0});
    std::vector<Eigen::VectorXd> draws;
    for (int i = 0; i < 100000; ++i) draws.push_back(sampler.draw(s));
    const Eigen::MatrixXd cov = sample_covariance(draws);
    CHECK((cov - target).cwiseAbs().maxCoeff() < 0.02);
    // 5 standard errors entrywise: Var(x_i x_j) = S_ii S_jj + S_ij^2.
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double se = std::sqrt((target(i, i) * target(j, j) + target(i, j) * target(i, j)) / 1e5);
        CHECK(std::abs(cov(i, j) - target(i, j)) < 5 * se);
      }
  }
}

TEST_CASE("gaussian vector: singular PSD matrices are accepted") {
  Eigen::MatrixXd m(3, 3);
  m << 1, 1, 0, 1, 1, 0, 0, 0, 2;
  GaussianSampler sampler(m);
  CHECK((sampler.factor() * sampler.factor().transpose() - m).cwiseAbs().maxCoeff() < 1e-12);
  Stream s = open_stream({2, 0, 0});
  const auto v = sampler.draw(s);
  CHECK(v(0) == doctest::Approx(v(1)));
}

TEST_CASE("gaussian vector: invalid matrices are rejected") {
  Eigen::MatrixXd neg(2, 2);
  neg << 1, 2, 2, 1;
  CHECK_THROWS_AS(GaussianSampler{neg}, MatrixError);
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 0.5, 0.1, 1;
  CHECK_THROWS_AS(GaussianSampler{asym}, MatrixError);
  CHECK_THROWS_AS(GaussianSampler{Eigen::MatrixXd::Ones(2, 3)}, MatrixError);
}

TEST_CASE("Gamma matrices up to n = 50 factor") {
  const CompensatedGaussianSpec spec{1.0, ClosedFormSchedule{0.5}};
  for (std::size_t n : {1u, 5u, 20u, 50u}) CHECK_NOTHROW(GaussianSampler{gamma_matrix(spec, n)});
}
