#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "cidlab/functions.hpp"
#include "cidlab/sampling.hpp"

namespace cidlab {

// ---------------------------------------------------------------------------
// Compensated Gaussian sums: X_n = Z_1 + ... + Z_n + U_n with
// Z_k ~ N(0, b_k - b_{k-1}), U_k ~ N(0, c - b_k), b_0 = 0.
// ---------------------------------------------------------------------------

/// b_k = c - u / k.
struct ClosedFormSchedule {
  double u = 0.5;
};

struct CompensatedGaussianSpec {
  double c = 1.0;
  /// Either an explicit list b_1, b_2, ... or the closed form.
  std::variant<std::vector<double>, ClosedFormSchedule> schedule =
      ClosedFormSchedule{};

  /// b_k for k >= 0 (b_0 = 0).
  double b(std::size_t k) const;
  /// Throws ParameterError unless 0 < b_1 <= ... <= b_n <= c.
  void validate(std::size_t n) const;
};

// ---------------------------------------------------------------------------
// Modified Polya urns.
// ---------------------------------------------------------------------------

namespace reinforcement {
/// d_1, d_2, ...; once the list is exhausted the last entry repeats, or the
/// whole list repeats when `cycle` is set.
struct Deterministic {
  std::vector<std::uint64_t> d;
  bool cycle = false;

  /// d_k, k >= 1.
  std::uint64_t at(std::size_t k) const {
    return cycle ? d[(k - 1) % d.size()] : d[std::min(k - 1, d.size() - 1)];
  }
};
/// d_n i.i.d., independent of the past. The law is a Discrete ScalarDist on
/// the integers with no mass at 0.
struct Iid {
  ScalarDist law;
};
/// d_1 = first, d_n = rule(x_1, ..., x_{n-1}) for n >= 2.
struct PrefixRule {
  std::uint64_t first = 1;
  std::function<std::uint64_t(std::span<const int>)> rule;
};
}  // namespace reinforcement

using Reinforcement = std::variant<reinforcement::Deterministic,
                                   reinforcement::Iid,
                                   reinforcement::PrefixRule>;

struct PolyaUrnSpec {
  std::uint64_t w = 1;
  std::uint64_t r = 1;
  Reinforcement reinforcement = reinforcement::Deterministic{{1}};

  void validate() const;
};

/// delta = Var[d_1] / E[d_1]^2 for i.i.d. reinforcement, 0 for constant d.
double reinforcement_dispersion(const PolyaUrnSpec& spec);

// ---------------------------------------------------------------------------
// De Finetti mixtures and stopped exchangeable sequences.
// ---------------------------------------------------------------------------

namespace kernel {
struct Bernoulli {};  // Bernoulli(theta)
struct Normal {       // N(theta, variance)
  double variance = 1.0;
};
struct Uniform {  // U(theta, theta + width)
  double width = 1.0;
};
}  // namespace kernel

using Kernel = std::variant<kernel::Bernoulli, kernel::Normal, kernel::Uniform>;

ScalarDist kernel_law(const Kernel& k, double theta);

struct DeFinettiSpec {
  ScalarDist mixing = dist::Beta{1.0, 1.0};
  Kernel kernel = kernel::Bernoulli{};

  /// Predictive law of the next observation after k observations summing to
  /// `sum`. Available for degenerate mixing (i.i.d.), Beta-Bernoulli and
  /// Normal-Normal; otherwise throws UnsupportedError.
  ScalarDist predictive(std::size_t k, double sum) const;
  bool has_predictive() const;
};

/// Value in {1, 2, ...} or infinity. Infinity is a distinguished state, not a
/// large integer.
class StopTime {
 public:
  static StopTime at(std::uint64_t k) { return StopTime(k); }
  static StopTime infinite() { return StopTime(); }

  bool is_finite() const { return finite_; }
  std::uint64_t value() const { return value_; }
  /// min(T, k)
  std::uint64_t min_with(std::uint64_t k) const {
    return finite_ && value_ < k ? value_ : k;
  }
  friend bool operator==(const StopTime&, const StopTime&) = default;

 private:
  StopTime() = default;
  explicit StopTime(std::uint64_t k) : finite_(true), value_(k) {}
  bool finite_ = false;
  std::uint64_t value_ = 0;
};

namespace stop {
/// P(T = k) = p (1 - p)^(k - 1), k >= 1.
struct Geometric {
  double p = 0.5;
};
struct PointMass {
  StopTime t = StopTime::infinite();
};
}  // namespace stop

using StopLaw = std::variant<stop::Geometric, stop::PointMass>;

struct StoppedExchangeableSpec {
  DeFinettiSpec base;
  StopLaw stop = stop::Geometric{};
};

using ProcessSpec = std::variant<CompensatedGaussianSpec, PolyaUrnSpec,
                                 StoppedExchangeableSpec, DeFinettiSpec>;

// ---------------------------------------------------------------------------
// Realized paths.
// ---------------------------------------------------------------------------

enum class Family { compensated_gaussian, polya, stopped_exchangeable, definetti };

std::string_view family_name(Family f);

struct GaussianLatent {
  double c = 0.0;
  std::vector<double> b;            // b_0 .. b_n
  std::vector<double> z;            // Z_1 .. Z_n
  std::vector<double> u;            // U_1 .. U_n
  std::vector<double> partial_sum;  // S_0 .. S_n
  /// sum_{k>n} Z_k, drawn from its exact law N(0, c - b_n).
  double tail = 0.0;
  double tail_sd = 0.0;
};

struct UrnLatent {
  std::uint64_t w = 0;
  std::uint64_t r = 0;
  std::vector<std::uint64_t> d;            // d_1 .. d_n
  std::vector<std::int64_t> numerator;     // w + sum_{i<=k} d_i x_i, k = 0..n
  std::vector<std::int64_t> denominator;   // w + r + sum_{i<=k} d_i
};

struct DeFinettiLatent {
  DeFinettiSpec spec;
  double theta = 0.0;
  std::vector<double> prefix_sum;  // sum of the first k observations, k = 0..n
};

struct StoppedLatent {
  DeFinettiSpec base;
  double theta = 0.0;
  StopTime stop = StopTime::infinite();
  std::vector<double> z;           // Z_1 .. Z_min(T, n)
  std::vector<double> prefix_sum;  // partial sums of z
  std::optional<double> z_at_stop;  // Z_T whenever T is finite
};

using Latent =
    std::variant<GaussianLatent, UrnLatent, StoppedLatent, DeFinettiLatent>;

struct PathSample {
  Family family;
  std::vector<double> x;  // X_1 .. X_n
  Latent latent;
  /// a_k = E[X_{k+1} | G_k] for k = 0..n; empty when the family has no closed
  /// form predictive law.
  std::vector<double> predictive_mean;

  std::size_t size() const { return x.size(); }
  bool has_predictive() const { return !predictive_mean.empty(); }
};

PathSample gen_compensated_gaussian(const CompensatedGaussianSpec& spec,
                                    std::size_t n, Stream& stream);
PathSample gen_polya(const PolyaUrnSpec& spec, std::size_t n, Stream& stream);
PathSample gen_stopped_exchangeable(const StoppedExchangeableSpec& spec,
                                    std::size_t n, Stream& stream);
PathSample gen_definetti(const DeFinettiSpec& spec, std::size_t n,
                         Stream& stream);
PathSample generate(const ProcessSpec& spec, std::size_t n, Stream& stream);

/// Exact covariance of (X_1, ..., X_n): c on the diagonal, b_i ^ b_j off it.
Eigen::MatrixXd gamma_matrix(const CompensatedGaussianSpec& spec, std::size_t n);

/// Conditional law of X_{k+1} given G_k, 0 <= k <= n.
ScalarDist predictive_law(const PathSample& path, std::size_t k);
double predictive_cdf(const PathSample& path, std::size_t k, double t);
/// E[f(X_{k+1}) | G_k].
double predictive_expectation(const PathSample& path, std::size_t k,
                              const FunctionDescriptor& f);
/// True when every predictive law of the path is supported on {0, 1}.
bool has_binary_predictive(const PathSample& path);

/// The directing measure realized on this path. `exact` is false when it is
/// estimated from the terminal predictive law (urns).
struct DirectingLaw {
  ScalarDist law;
  bool exact = true;
};
DirectingLaw directing_law(const PathSample& path);

/// a_k of an urn path as an exact fraction.
struct UrnFraction {
  std::int64_t num = 0;
  std::int64_t den = 1;
};
UrnFraction urn_predictive_fraction(const PathSample& path, std::size_t k);

}  // namespace cidlab
