#pragma once

#include <functional>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "cidlab/sampling.hpp"

namespace cidlab {

/// N(0, L) with L drawn per sample; N(0, 0) is the point mass at 0.
struct MixtureNormalLaw {
  std::function<double(Stream&)> variance_sampler;

  static MixtureNormalLaw constant(double variance);
  /// L = delta V (1 - V) with V ~ Beta(a, b).
  static MixtureNormalLaw beta_binomial_dispersion(double delta, double a,
                                                   double b);
};

double sample_mixture_normal(const MixtureNormalLaw& law, Stream& stream);

namespace cdfs {
struct UniformCdf {
  double lo = 0.0;
  double hi = 1.0;
};
struct NormalCdf {
  double mean = 0.0;
  double variance = 1.0;
};
/// Distribution function of Bernoulli(p): 1 - p on [0, 1), 1 from 1 on.
struct BernoulliCdf {
  double p = 0.5;
};
/// Right-continuous step function with jumps at `atoms` (increasing) to the
/// cumulative levels `levels` (nondecreasing, last entry 1).
struct StepCdf {
  std::vector<double> atoms;
  std::vector<double> levels;
};
}  // namespace cdfs

using RealizedCdf = std::variant<cdfs::UniformCdf, cdfs::NormalCdf,
                                 cdfs::BernoulliCdf, cdfs::StepCdf>;

double evaluate(const RealizedCdf& F, double t);
/// Throws LawError if F is not a distribution function.
void validate(const RealizedCdf& F);

struct RandomDistributionFunction {
  std::function<RealizedCdf(Stream&)> sampler;

  static RandomDistributionFunction fixed(RealizedCdf F);
  /// Bernoulli(V) cdf with V ~ Beta(a, b): the directing measure of a
  /// Beta-mixed Bernoulli sequence.
  static RandomDistributionFunction bernoulli_beta(double a, double b);
};

/// Gf = G0 composed with F; covariance F(s ^ t) (1 - F(s v t)).
Eigen::MatrixXd gf_covariance(const RealizedCdf& F, std::span<const double> grid);

/// `cholesky` factors the covariance through draw_gaussian_vector and is kept
/// as the reference; `markov` builds the bridge sequentially in O(m).
enum class BridgeMethod { cholesky, markov };

std::vector<double> sample_gf_path(const RealizedCdf& F,
                                   std::span<const double> grid, Stream& stream,
                                   BridgeMethod method = BridgeMethod::markov);

double sample_gf_supnorm(const RandomDistributionFunction& F_law,
                         std::span<const double> grid, Stream& stream,
                         BridgeMethod method = BridgeMethod::markov);

/// Distribution function of sup |Brownian bridge|.
double kolmogorov_cdf(double x);

}  // namespace cidlab
