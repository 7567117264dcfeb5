#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cidlab/error.hpp"
#include "cidlab/processes.hpp"

using namespace cidlab;

namespace {

PolyaUrnSpec urn(std::vector<std::uint64_t> d) {
  PolyaUrnSpec s;
  s.reinforcement = reinforcement::Deterministic{std::move(d)};
  return s;
}

const CompensatedGaussianSpec kGauss{1.0, ClosedFormSchedule{0.5}};

}  // namespace

TEST_CASE("closed-form schedule") {
  CHECK(kGauss.b(0) == 0.0);
  CHECK(kGauss.b(1) == doctest::Approx(0.5));
  CHECK(kGauss.b(2) == doctest::Approx(0.75));
  CHECK(kGauss.b(3) == doctest::Approx(5.0 / 6.0));
  for (std::size_t k = 1; k < 100; ++k) CHECK(static_cast<double>(k) * (kGauss.c - kGauss.b(k)) == doctest::Approx(0.5));
}

TEST_CASE("invalid gaussian specs are rejected") {
  Stream s = open_stream({1, 0, 0});
  CHECK_THROWS_AS(gen_compensated_gaussian({0.0, ClosedFormSchedule{0.5}}, 3, s), ParameterError);
  CHECK_THROWS_AS(gen_compensated_gaussian({1.0, ClosedFormSchedule{1.0}}, 3, s), ParameterError);
  CHECK_THROWS_AS(gen_compensated_gaussian({1.0, std::vector<double>{0.0, 0.5}}, 2, s), ParameterError);
  CHECK_THROWS_AS(gen_compensated_gaussian({1.0, std::vector<double>{0.6, 0.5}}, 2, s), ParameterError);
  CHECK_THROWS_AS(gen_compensated_gaussian({1.0, std::vector<double>{0.5, 1.5}}, 2, s), ParameterError);
  CHECK_THROWS_AS(gen_compensated_gaussian({1.0, std::vector<double>{0.5}}, 3, s), ParameterError);
}

TEST_CASE("gaussian path identities") {
  Stream s = open_stream({8, 0, 0});
  const auto p = gen_compensated_gaussian(kGauss, 200, s);
  const auto& lat = std::get<GaussianLatent>(p.latent);
  REQUIRE(p.predictive_mean.size() == 201);
  for (std::size_t k = 1; k <= 200; ++k) {
    CHECK(p.x[k - 1] - lat.u[k - 1] == doctest::Approx(lat.partial_sum[k]).epsilon(1e-14));
    CHECK(p.predictive_mean[k] == lat.partial_sum[k]);
  }
  CHECK(p.predictive_mean[0] == 0.0);
  CHECK(lat.tail_sd == doctest::Approx(std::sqrt(0.5 / 200.0)));
}

TEST_CASE("degenerate schedule gives a constant path") {
  Stream s = open_stream({8, 1, 0});
  const CompensatedGaussianSpec spec{1.0, std::vector<double>{1.0, 1.0, 1.0, 1.0}};
  const auto p = gen_compensated_gaussian(spec, 4, s);
  for (double x : p.x) CHECK(x == p.x[0]);
}

TEST_CASE("gamma matrix") {
  const auto g1 = gamma_matrix(kGauss, 1);
  CHECK(g1(0, 0) == 1.0);
  const auto g = gamma_matrix(kGauss, 3);
  Eigen::Matrix3d expected;
  expected << 1, .5, .5, .5, 1, .75, .5, .75, 1;
  CHECK((g - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("gaussian triples match Gamma_3") {
  const int R = 100000;
  Eigen::Matrix3d sum = Eigen::Matrix3d::Zero();
  for (int r = 0; r < R; ++r) {
    Stream s = open_stream({5, static_cast<std::uint64_t>(r), 0});
    const auto p = gen_compensated_gaussian(kGauss, 3, s);
    const Eigen::Vector3d v(p.x[0], p.x[1], p.x[2]);
    sum += v * v.transpose();
  }
  CHECK((sum / R - gamma_matrix(kGauss, 3)).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("urn predictive formula") {
  Stream s = open_stream({1, 0, 0});
  const auto spec = urn({1});
  for (int rep = 0; rep < 20; ++rep) {
    const auto p = gen_polya(spec, 30, s);
    const auto& lat = std::get<UrnLatent>(p.latent);
    CHECK(p.predictive_mean[0] == 0.5);
    std::int64_t num = 1, den = 2;
    for (std::size_t k = 1; k <= 30; ++k) {
      const auto d = static_cast<std::int64_t>(lat.d[k - 1]);
      num += d * static_cast<std::int64_t>(p.x[k - 1]);
      den += d;
      CHECK(lat.numerator[k] == num);
      CHECK(lat.denominator[k] == den);
      CHECK(p.predictive_mean[k] == static_cast<double>(num) / static_cast<double>(den));
      const auto q = urn_predictive_fraction(p, k);
      CHECK(q.num == num);
      CHECK(q.den == den);
    }
    if (p.x[0] == 1.0) {
      CHECK(p.predictive_mean[1] == doctest::Approx(2.0 / 3.0));
      CHECK(predictive_cdf(p, 1, 0.5) == doctest::Approx(1.0 / 3.0));
    }
  }
}

TEST_CASE("urn tower property holds exactly along a path") {
  // a_k = a_k (w+r+D_k+d)/(...) split over the next draw: a_k = a_k * a_{k+1}(x=1) + (1-a_k) * a_{k+1}(x=0).
  Stream s = open_stream({2, 0, 0});
  const auto p = gen_polya(urn({1, 2, 3}), 20, s);
  const auto& lat = std::get<UrnLatent>(p.latent);
  for (std::size_t k = 0; k < 20; ++k) {
    const std::int64_t num = lat.numerator[k], den = lat.denominator[k];
    const auto d = static_cast<std::int64_t>(lat.d[k]);
    // num/den == num/den * (num+d)/(den+d) + (den-num)/den * num/(den+d)
    CHECK(num * (den + d) * den == num * (num + d) * den + (den - num) * num * den);
  }
}

TEST_CASE("urn marginal P(X_2 = 1) for d = (1, 2)") {
  const int R = 100000;
  double ones = 0;
  for (int r = 0; r < R; ++r) {
    Stream s = open_stream({3, static_cast<std::uint64_t>(r), 0});
    ones += gen_polya(urn({1, 2}), 2, s).x[1];
  }
  CHECK(std::abs(ones / R - 0.5) < 0.01);
}

TEST_CASE("urn with i.i.d. reinforcement") {
  PolyaUrnSpec spec;
  spec.reinforcement = reinforcement::Iid{dist::Discrete{{0.0, 1.0, 1.0}}};
  CHECK(reinforcement_dispersion(spec) == doctest::Approx(1.0 / 9.0));
  Stream s = open_stream({4, 0, 0});
  const auto p = gen_polya(spec, 1000, s);
  const auto& lat = std::get<UrnLatent>(p.latent);
  for (auto d : lat.d) CHECK((d == 1 || d == 2));
  PolyaUrnSpec bad;
  bad.reinforcement = reinforcement::Iid{dist::Discrete{{1.0, 1.0}}};
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  CHECK_THROWS_AS(urn({0}).validate(), ParameterError);
  PolyaUrnSpec no_white = urn({1});
  no_white.w = 0;
  CHECK_THROWS_AS(no_white.validate(), ParameterError);
}

TEST_CASE("prefix-rule reinforcement") {
  PolyaUrnSpec spec;
  spec.reinforcement = reinforcement::PrefixRule{
      1, [](std::span<const int> prefix) { return static_cast<std::uint64_t>(prefix.back() ? 2 : 1); }};
  Stream s = open_stream({4, 1, 0});
  const auto p = gen_polya(spec, 50, s);
  const auto& lat = std::get<UrnLatent>(p.latent);
  CHECK(lat.d[0] == 1);
  for (std::size_t k = 2; k <= 50; ++k) CHECK(lat.d[k - 1] == (p.x[k - 2] == 1.0 ? 2u : 1u));
}

TEST_CASE("cyclic deterministic reinforcement") {
  const reinforcement::Deterministic det{{1, 2}, true};
  CHECK(det.at(1) == 1);
  CHECK(det.at(2) == 2);
  CHECK(det.at(3) == 1);
  const reinforcement::Deterministic tail{{1, 2}};
  CHECK(tail.at(5) == 2);
}

TEST_CASE("stopped exchangeable paths") {
  const DeFinettiSpec base{dist::Beta{1.0, 1.0}, kernel::Bernoulli{}};
  Stream s = open_stream({6, 0, 0});
  const auto one = gen_stopped_exchangeable({base, stop::PointMass{StopTime::at(1)}}, 20, s);
  for (double x : one.x) CHECK(x == one.x[0]);
  const auto never = gen_stopped_exchangeable({base, stop::PointMass{StopTime::infinite()}}, 20, s);
  const auto& lat = std::get<StoppedLatent>(never.latent);
  CHECK_FALSE(lat.stop.is_finite());
  REQUIRE(lat.z.size() == 20);
  for (std::size_t k = 0; k < 20; ++k) CHECK(never.x[k] == lat.z[k]);

  // E X_3 = E theta under geometric stopping.
  double sum = 0;
  const int R = 100000;
  for (int r = 0; r < R; ++r) {
    Stream t = open_stream({6, static_cast<std::uint64_t>(r), 1});
    const auto p = gen_stopped_exchangeable({base, stop::Geometric{0.5}}, 3, t);
    const auto& l = std::get<StoppedLatent>(p.latent);
    if (l.stop.is_finite())
      for (std::size_t k = 1; k <= 3; ++k) REQUIRE(p.x[k - 1] == l.z[l.stop.min_with(k) - 1]);
    sum += p.x[2];
  }
  CHECK(std::abs(sum / R - 0.5) < 0.01);
}

TEST_CASE("stop time sentinel") {
  const auto inf = StopTime::infinite();
  CHECK_FALSE(inf.is_finite());
  CHECK(inf.min_with(7) == 7);
  CHECK(StopTime::at(3).min_with(7) == 3);
  CHECK(StopTime::at(3) != inf);
}

TEST_CASE("de Finetti predictive means") {
  Stream s = open_stream({7, 0, 0});
  const DeFinettiSpec bb{dist::Beta{1.0, 1.0}, kernel::Bernoulli{}};
  for (int rep = 0; rep < 20; ++rep) {
    const auto p = gen_definetti(bb, 5, s);
    CHECK(p.predictive_mean[0] == 0.5);
    CHECK(p.predictive_mean[1] == doctest::Approx(p.x[0] == 1.0 ? 2.0 / 3.0 : 1.0 / 3.0));
  }
  const DeFinettiSpec iid{dist::Normal{1.5, 0.0}, kernel::Normal{1.0}};
  const auto p = gen_definetti(iid, 10, s);
  for (double a : p.predictive_mean) CHECK(a == 1.5);

  double sum = 0;
  const int R = 100000;
  for (int r = 0; r < R; ++r) {
    Stream t = open_stream({7, static_cast<std::uint64_t>(r), 1});
    sum += gen_definetti({dist::Beta{2.0, 2.0}, kernel::Bernoulli{}}, 1, t).x[0];
  }
  CHECK(std::abs(sum / R - 0.5) < 0.01);
}

TEST_CASE("de Finetti without a conjugate pair has no predictive") {
  const DeFinettiSpec mixed{dist::Uniform{0.0, 1.0}, kernel::Bernoulli{}};
  Stream s = open_stream({7, 1, 0});
  const auto p = gen_definetti(mixed, 10, s);
  CHECK_FALSE(p.has_predictive());
  CHECK_THROWS_AS(predictive_cdf(p, 1, 0.5), UnsupportedError);
}

TEST_CASE("gaussian predictive cdf") {
  Stream s = open_stream({9, 0, 0});
  const auto p = gen_compensated_gaussian(kGauss, 10, s);
  const auto& lat = std::get<GaussianLatent>(p.latent);
  for (std::size_t k = 0; k <= 10; ++k) CHECK(predictive_cdf(p, k, lat.partial_sum[k]) == 0.5);
  CHECK(predictive_cdf(p, 0, 0.7) == doctest::Approx(normal_cdf(0.7)));
}

TEST_CASE("identical marginals across k") {
  // KS distance between the laws of X_1 and X_5 below the 1% critical value.
  const int R = 20000;
  for (const ProcessSpec& spec : std::vector<ProcessSpec>{
           kGauss, StoppedExchangeableSpec{{dist::Normal{0.0, 1.0}, kernel::Normal{1.0}}, stop::Geometric{0.3}}}) {
    std::vector<double> first, fifth;
    for (int r = 0; r < R; ++r) {
      Stream s = open_stream({10, static_cast<std::uint64_t>(r), 0});
      const auto p = generate(spec, 5, s);
      first.push_back(p.x[0]);
      fifth.push_back(p.x[4]);
    }
    std::sort(first.begin(), first.end());
    std::sort(fifth.begin(), fifth.end());
    double d = 0;
    std::size_t i = 0, j = 0;
    while (i < first.size() && j < fifth.size()) {
      const double t = std::min(first[i], fifth[j]);
      while (i < first.size() && first[i] <= t) ++i;
      while (j < fifth.size() && fifth[j] <= t) ++j;
      d = std::max(d, std::abs(double(i) - double(j)) / R);
    }
    CHECK(d < 1.6276 * std::sqrt(2.0 / R));
  }
}

TEST_CASE("predictive means are martingales") {
  const int R = 20000;
  PolyaUrnSpec iid_urn;
  iid_urn.reinforcement = reinforcement::Iid{dist::Discrete{{0.0, 1.0, 1.0}}};
  for (const ProcessSpec& spec : std::vector<ProcessSpec>{kGauss, urn({1, 2, 2}), iid_urn,
                                                          DeFinettiSpec{dist::Beta{1.0, 1.0}, kernel::Bernoulli{}}}) {
    std::vector<double> sum(11, 0.0), sum_sq(11, 0.0);
    for (int r = 0; r < R; ++r) {
      Stream s = open_stream({12, static_cast<std::uint64_t>(r), 0});
      const auto p = generate(spec, 11, s);
      for (std::size_t k = 0; k <= 10; ++k) {
        const double inc = p.predictive_mean[k + 1] - p.predictive_mean[k];
        sum[k] += inc;
        sum_sq[k] += inc * inc;
      }
    }
    for (std::size_t k = 0; k <= 10; ++k) {
      const double m = sum[k] / R;
      const double se = std::sqrt((sum_sq[k] / R - m * m) / R);
      CHECK(std::abs(m) <= 5 * se + 1e-15);
    }
  }
}

TEST_CASE("directing laws") {
  Stream s = open_stream({13, 0, 0});
  const auto g = gen_compensated_gaussian(kGauss, 50, s);
  const auto dg = directing_law(g);
  const auto& lat = std::get<GaussianLatent>(g.latent);
  CHECK(dg.exact);
  CHECK(mean(dg.law) == doctest::Approx(lat.partial_sum[50] + lat.tail));
  const auto u = gen_polya(urn({1}), 50, s);
  const auto du = directing_law(u);
  CHECK_FALSE(du.exact);
  CHECK(std::get<dist::Bernoulli>(du.law).p == u.predictive_mean.back());
}

TEST_CASE("same key reproduces the path") {
  for (const ProcessSpec& spec : std::vector<ProcessSpec>{kGauss, urn({1, 2})}) {
    Stream a = open_stream({14, 3, 0});
    Stream b = open_stream({14, 3, 0});
    CHECK(generate(spec, 100, a).x == generate(spec, 100, b).x);
  }
}
