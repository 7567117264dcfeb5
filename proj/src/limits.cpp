#include "cidlab/limits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cidlab/error.hpp"

namespace cidlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::vector<double> levels_on(const RealizedCdf& F, std::span<const double> grid) {
  for (std::size_t j = 1; j < grid.size(); ++j)
    if (!(grid[j] > grid[j - 1]))
      throw ParameterError("grid must be strictly increasing");
  std::vector<double> u(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    u[j] = evaluate(F, grid[j]);
    if (!(u[j] >= 0.0 && u[j] <= 1.0) || (j > 0 && u[j] < u[j - 1]))
      throw LawError("distribution function is not monotone in [0, 1]");
  }
  return u;
}

}  // namespace

MixtureNormalLaw MixtureNormalLaw::constant(double variance) {
  return {[variance](Stream&) { return variance; }};
}

MixtureNormalLaw MixtureNormalLaw::beta_binomial_dispersion(double delta,
                                                            double a, double b) {
  return {[=](Stream& s) {
    const double v = draw(s, dist::Beta{a, b});
    return delta * v * (1.0 - v);
  }};
}

double sample_mixture_normal(const MixtureNormalLaw& law, Stream& stream) {
  const double L = law.variance_sampler(stream);
  if (!(L >= 0.0) || !std::isfinite(L))
    throw LawError("mixture variance must be finite and >= 0");
  if (L == 0.0) return 0.0;
  return std::sqrt(L) * stream.standard_normal();
}

double evaluate(const RealizedCdf& F, double t) {
  return std::visit(
      overloaded{
          [t](const cdfs::UniformCdf& u) {
            if (t <= u.lo) return 0.0;
            return t >= u.hi ? 1.0 : (t - u.lo) / (u.hi - u.lo);
          },
          [t](const cdfs::NormalCdf& n) {
            if (n.variance == 0.0) return t >= n.mean ? 1.0 : 0.0;
            return normal_cdf((t - n.mean) / std::sqrt(n.variance));
          },
          [t](const cdfs::BernoulliCdf& b) {
            if (t < 0.0) return 0.0;
            return t < 1.0 ? 1.0 - b.p : 1.0;
          },
          [t](const cdfs::StepCdf& s) {
            const auto it = std::upper_bound(s.atoms.begin(), s.atoms.end(), t);
            if (it == s.atoms.begin()) return 0.0;
            return s.levels[static_cast<std::size_t>(it - s.atoms.begin()) - 1];
          },
      },
      F);
}

void validate(const RealizedCdf& F) {
  std::visit(
      overloaded{
          [](const cdfs::UniformCdf& u) {
            if (!(u.lo < u.hi)) throw LawError("uniform cdf requires lo < hi");
          },
          [](const cdfs::NormalCdf& n) {
            if (!(n.variance >= 0.0)) throw LawError("normal cdf variance < 0");
          },
          [](const cdfs::BernoulliCdf& b) {
            if (!(b.p >= 0.0 && b.p <= 1.0))
              throw LawError("bernoulli cdf requires p in [0, 1]");
          },
          [](const cdfs::StepCdf& s) {
            if (s.atoms.empty() || s.atoms.size() != s.levels.size())
              throw LawError("step cdf needs matching atoms and levels");
            for (std::size_t i = 0; i < s.atoms.size(); ++i) {
              if (i > 0 && !(s.atoms[i] > s.atoms[i - 1]))
                throw LawError("step cdf atoms must increase");
              if (!(s.levels[i] >= 0.0 && s.levels[i] <= 1.0) ||
                  (i > 0 && s.levels[i] < s.levels[i - 1]))
                throw LawError("step cdf levels must be nondecreasing in [0, 1]");
            }
            if (s.levels.back() != 1.0)
              throw LawError("step cdf must reach 1");
          },
      },
      F);
}

RandomDistributionFunction RandomDistributionFunction::fixed(RealizedCdf F) {
  validate(F);
  return {[F](Stream&) { return F; }};
}

RandomDistributionFunction RandomDistributionFunction::bernoulli_beta(double a,
                                                                      double b) {
  return {[a, b](Stream& s) -> RealizedCdf {
    return cdfs::BernoulliCdf{draw(s, dist::Beta{a, b})};
  }};
}

Eigen::MatrixXd gf_covariance(const RealizedCdf& F, std::span<const double> grid) {
  const auto u = levels_on(F, grid);
  const auto m = static_cast<Eigen::Index>(u.size());
  Eigen::MatrixXd sigma(m, m);
  // Grid is increasing, so F(t_i ^ t_j) = u_min(i,j) and F(t_i v t_j) = u_max.
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      sigma(i, j) = u[std::min(i, j)] * (1.0 - u[std::max(i, j)]);
  return sigma;
}

std::vector<double> sample_gf_path(const RealizedCdf& F,
                                   std::span<const double> grid, Stream& stream,
                                   BridgeMethod method) {
  validate(F);
  if (method == BridgeMethod::cholesky) {
    const auto u = levels_on(F, grid);
    const Eigen::VectorXd v = draw_gaussian_vector(stream, gf_covariance(F, grid));
    std::vector<double> out(v.data(), v.data() + v.size());
    for (std::size_t j = 0; j < u.size(); ++j)
      if (u[j] <= 0.0 || u[j] >= 1.0) out[j] = 0.0;
    return out;
  }
  const auto u = levels_on(F, grid);
  std::vector<double> out(u.size());
  // Bridge pinned at 0 for level 0; given G(prev) = g at level prev < 1, the
  // value at level u is N(g (1-u)/(1-prev), (u-prev)(1-u)/(1-prev)).
  double prev = 0.0, g = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (u[j] > prev) {
      if (u[j] >= 1.0) {
        g = 0.0;
      } else {
        const double rest = 1.0 - prev;
        const double m = g * (1.0 - u[j]) / rest;
        const double var = (u[j] - prev) * (1.0 - u[j]) / rest;
        g = m + std::sqrt(var) * stream.standard_normal();
      }
      prev = u[j];
    }
    out[j] = (u[j] <= 0.0 || u[j] >= 1.0) ? 0.0 : g;
  }
  return out;
}

double sample_gf_supnorm(const RandomDistributionFunction& F_law,
                         std::span<const double> grid, Stream& stream,
                         BridgeMethod method) {
  const RealizedCdf F = F_law.sampler(stream);
  const auto path = sample_gf_path(F, grid, stream, method);
  double best = 0.0;
  for (double v : path) best = std::max(best, std::abs(v));
  return best;
}

double kolmogorov_cdf(double x) {
  if (x <= 0.0) return 0.0;
  constexpr double eps = 1e-12;
  if (x < 1.0) {
    // Jacobi theta form; the alternating series converges slowly here.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double sum = 0.0;
    for (int k = 1;; ++k) {
      const double odd = 2.0 * k - 1.0;
      const double term = std::exp(-odd * odd * pi2 / (8.0 * x * x));
      sum += term;
      if (term < eps) break;
    }
    return std::sqrt(2.0 * std::numbers::pi) / x * sum;
  }
  double sum = 0.0;
  for (int k = 1;; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < eps) break;
  }
  return 1.0 - 2.0 * sum;
}

}  // namespace cidlab
