#include "cidlab/processes.hpp"

#include <cmath>
#include <string>

#include "cidlab/error.hpp"

namespace cidlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::uint64_t draw_stop(Stream& stream, const StopLaw& law) {
  return std::visit(
      overloaded{
          [&](const stop::Geometric& g) -> std::uint64_t {
            if (!(g.p > 0.0 && g.p <= 1.0))
              throw ParameterError("geometric stop: p must lie in (0, 1]");
            if (g.p == 1.0) return 1;
            const double k =
                std::floor(std::log(stream.uniform()) / std::log1p(-g.p));
            if (k >= 1e18) return std::numeric_limits<std::uint64_t>::max();
            return 1 + static_cast<std::uint64_t>(k);
          },
          [](const stop::PointMass& p) -> std::uint64_t {
            if (!p.t.is_finite()) return 0;
            if (p.t.value() < 1)
              throw ParameterError("stop time must be >= 1");
            return p.t.value();
          },
      },
      law);
}

bool is_bernoulli_kernel(const Kernel& k) {
  return std::holds_alternative<kernel::Bernoulli>(k);
}

// Point mass expressed in the kernel's natural form, so binary families keep
// binary predictive laws.
ScalarDist point_mass(const Kernel& k, double value) {
  if (is_bernoulli_kernel(k)) return dist::Bernoulli{value};
  return dist::Normal{value, 0.0};
}

std::vector<double> predictive_means(const PathSample& path) {
  std::vector<double> out(path.size() + 1);
  for (std::size_t k = 0; k <= path.size(); ++k)
    out[k] = mean(predictive_law(path, k));
  return out;
}

}  // namespace

// --- Compensated Gaussian ---------------------------------------------------

double CompensatedGaussianSpec::b(std::size_t k) const {
  if (k == 0) return 0.0;
  return std::visit(
      overloaded{
          [&](const std::vector<double>& list) {
            if (k > list.size())
              throw ParameterError("explicit schedule shorter than path length");
            return list[k - 1];
          },
          [&](const ClosedFormSchedule& s) {
            return c - s.u / static_cast<double>(k);
          },
      },
      schedule);
}

void CompensatedGaussianSpec::validate(std::size_t n) const {
  if (!(c > 0.0) || !std::isfinite(c))
    throw ParameterError("compensated gaussian: c must be > 0");
  if (const auto* s = std::get_if<ClosedFormSchedule>(&schedule)) {
    if (!(s->u >= 0.0) || !(c - s->u > 0.0))
      throw ParameterError("closed-form schedule requires u >= 0 and c - u > 0");
    return;
  }
  double prev = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double bk = b(k);
    if (!(bk > 0.0)) throw ParameterError("schedule requires b_1 > 0");
    if (bk < prev) throw ParameterError("schedule must be nondecreasing");
    if (bk > c) throw ParameterError("schedule must satisfy b_k <= c");
    prev = bk;
  }
}

PathSample gen_compensated_gaussian(const CompensatedGaussianSpec& spec,
                                    std::size_t n, Stream& stream) {
  if (n < 1) throw ParameterError("path length must be >= 1");
  spec.validate(n);
  GaussianLatent lat;
  lat.c = spec.c;
  lat.b.resize(n + 1);
  lat.z.resize(n);
  lat.u.resize(n);
  lat.partial_sum.assign(n + 1, 0.0);
  std::vector<double> x(n);
  for (std::size_t k = 0; k <= n; ++k) lat.b[k] = spec.b(k);
  for (std::size_t k = 1; k <= n; ++k) {
    const double z_var = lat.b[k] - lat.b[k - 1];
    const double u_var = spec.c - lat.b[k];
    lat.z[k - 1] = z_var > 0.0 ? std::sqrt(z_var) * stream.standard_normal() : 0.0;
    lat.u[k - 1] = u_var > 0.0 ? std::sqrt(u_var) * stream.standard_normal() : 0.0;
    lat.partial_sum[k] = lat.partial_sum[k - 1] + lat.z[k - 1];
    x[k - 1] = lat.partial_sum[k] + lat.u[k - 1];
  }
  const double tail_var = spec.c - lat.b[n];
  lat.tail_sd = std::sqrt(std::max(tail_var, 0.0));
  lat.tail = lat.tail_sd > 0.0 ? lat.tail_sd * stream.standard_normal() : 0.0;
  PathSample path{Family::compensated_gaussian, std::move(x), std::move(lat), {}};
  path.predictive_mean = std::get<GaussianLatent>(path.latent).partial_sum;
  return path;
}

Eigen::MatrixXd gamma_matrix(const CompensatedGaussianSpec& spec, std::size_t n) {
  if (n < 1) throw ParameterError("gamma_matrix: n must be >= 1");
  spec.validate(n);
  Eigen::MatrixXd g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      g(i, j) = i == j ? spec.c : std::min(spec.b(i + 1), spec.b(j + 1));
  return g;
}

// --- Polya urn --------------------------------------------------------------

void PolyaUrnSpec::validate() const {
  if (w < 1 || r < 1) throw ParameterError("urn: w and r must be >= 1");
  std::visit(
      overloaded{
          [](const reinforcement::Deterministic& det) {
            if (det.d.empty())
              throw ParameterError("urn: deterministic reinforcement is empty");
            for (auto v : det.d)
              if (v < 1) throw ParameterError("urn: every d_n must be >= 1");
          },
          [](const reinforcement::Iid& iid) {
            const auto* disc = std::get_if<dist::Discrete>(&iid.law);
            if (!disc)
              throw ParameterError("urn: i.i.d. reinforcement must be discrete");
            cidlab::validate(iid.law);
            if (!disc->weights.empty() && disc->weights[0] > 0.0)
              throw ParameterError("urn: reinforcement must have no mass at 0");
          },
          [](const reinforcement::PrefixRule& rule) {
            if (rule.first < 1 || !rule.rule)
              throw ParameterError("urn: prefix rule needs d_1 >= 1 and a rule");
          },
      },
      reinforcement);
}

double reinforcement_dispersion(const PolyaUrnSpec& spec) {
  if (const auto* iid = std::get_if<reinforcement::Iid>(&spec.reinforcement)) {
    const double m = mean(iid->law);
    return variance(iid->law) / (m * m);
  }
  if (const auto* det =
          std::get_if<reinforcement::Deterministic>(&spec.reinforcement)) {
    for (auto v : det->d)
      if (v != det->d.front())
        throw UnsupportedError("dispersion undefined for varying deterministic d");
    return 0.0;
  }
  throw UnsupportedError("dispersion undefined for prefix-rule reinforcement");
}

PathSample gen_polya(const PolyaUrnSpec& spec, std::size_t n, Stream& stream) {
  if (n < 1) throw ParameterError("path length must be >= 1");
  spec.validate();
  UrnLatent lat;
  lat.w = spec.w;
  lat.r = spec.r;
  lat.d.resize(n);
  lat.numerator.resize(n + 1);
  lat.denominator.resize(n + 1);
  lat.numerator[0] = static_cast<std::int64_t>(spec.w);
  lat.denominator[0] = static_cast<std::int64_t>(spec.w + spec.r);
  std::vector<double> x(n);
  std::vector<int> bits(n);
  for (std::size_t k = 1; k <= n; ++k) {
    const std::uint64_t d = std::visit(
        overloaded{
            [&](const reinforcement::Deterministic& det) {
              return det.at(k);
            },
            [&](const reinforcement::Iid& iid) {
              return static_cast<std::uint64_t>(draw(stream, iid.law));
            },
            [&](const reinforcement::PrefixRule& rule) {
              if (k == 1) return rule.first;
              const std::uint64_t v =
                  rule.rule(std::span<const int>(bits.data(), k - 1));
              if (v < 1) throw ParameterError("urn: prefix rule returned d < 1");
              return v;
            },
        },
        spec.reinforcement);
    const auto num = lat.numerator[k - 1];
    const auto den = lat.denominator[k - 1];
    const bool white = stream.uniform() * static_cast<double>(den) <
                       static_cast<double>(num);
    bits[k - 1] = white ? 1 : 0;
    x[k - 1] = white ? 1.0 : 0.0;
    lat.d[k - 1] = d;
    lat.numerator[k] = num + (white ? static_cast<std::int64_t>(d) : 0);
    lat.denominator[k] = den + static_cast<std::int64_t>(d);
  }
  PathSample path{Family::polya, std::move(x), std::move(lat), {}};
  const auto& l = std::get<UrnLatent>(path.latent);
  path.predictive_mean.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k)
    path.predictive_mean[k] = static_cast<double>(l.numerator[k]) /
                              static_cast<double>(l.denominator[k]);
  return path;
}

UrnFraction urn_predictive_fraction(const PathSample& path, std::size_t k) {
  const auto* lat = std::get_if<UrnLatent>(&path.latent);
  if (!lat) throw UnsupportedError("urn_predictive_fraction: not an urn path");
  if (k > path.size()) throw IndexError("urn_predictive_fraction: k out of range");
  return {lat->numerator[k], lat->denominator[k]};
}

// --- De Finetti ---------------------------------------------------------------

ScalarDist kernel_law(const Kernel& k, double theta) {
  ScalarDist out = std::visit(
      overloaded{
          [&](const kernel::Bernoulli&) -> ScalarDist {
            return dist::Bernoulli{theta};
          },
          [&](const kernel::Normal& n) -> ScalarDist {
            return dist::Normal{theta, n.variance};
          },
          [&](const kernel::Uniform& u) -> ScalarDist {
            return dist::Uniform{theta, theta + u.width};
          },
      },
      k);
  validate(out);
  return out;
}

ScalarDist DeFinettiSpec::predictive(std::size_t k, double sum) const {
  if (is_degenerate(mixing)) return kernel_law(kernel, cidlab::mean(mixing));
  const double kk = static_cast<double>(k);
  if (const auto* beta = std::get_if<dist::Beta>(&mixing);
      beta && is_bernoulli_kernel(kernel)) {
    return dist::Bernoulli{(beta->a + sum) / (beta->a + beta->b + kk)};
  }
  const auto* prior = std::get_if<dist::Normal>(&mixing);
  const auto* lik = std::get_if<kernel::Normal>(&kernel);
  if (prior && lik) {
    if (lik->variance == 0.0) {
      if (k == 0) return dist::Normal{prior->mean, prior->variance};
      return dist::Normal{sum / kk, 0.0};
    }
    const double precision = 1.0 / prior->variance + kk / lik->variance;
    const double post_mean =
        (prior->mean / prior->variance + sum / lik->variance) / precision;
    return dist::Normal{post_mean, 1.0 / precision + lik->variance};
  }
  throw UnsupportedError("no closed-form predictive for this mixing/kernel pair");
}

bool DeFinettiSpec::has_predictive() const {
  try {
    (void)predictive(0, 0.0);
    return true;
  } catch (const UnsupportedError&) {
    return false;
  }
}

PathSample gen_definetti(const DeFinettiSpec& spec, std::size_t n,
                         Stream& stream) {
  if (n < 1) throw ParameterError("path length must be >= 1");
  validate(spec.mixing);
  DeFinettiLatent lat{spec, draw(stream, spec.mixing), {}};
  const ScalarDist obs = kernel_law(spec.kernel, lat.theta);
  std::vector<double> x(n);
  lat.prefix_sum.assign(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    x[k] = draw(stream, obs);
    lat.prefix_sum[k + 1] = lat.prefix_sum[k] + x[k];
  }
  PathSample path{Family::definetti, std::move(x), std::move(lat), {}};
  if (spec.has_predictive()) path.predictive_mean = predictive_means(path);
  return path;
}

PathSample gen_stopped_exchangeable(const StoppedExchangeableSpec& spec,
                                    std::size_t n, Stream& stream) {
  if (n < 1) throw ParameterError("path length must be >= 1");
  validate(spec.base.mixing);
  StoppedLatent lat;
  lat.base = spec.base;
  lat.theta = draw(stream, spec.base.mixing);
  const std::uint64_t t = draw_stop(stream, spec.stop);
  lat.stop = t == 0 ? StopTime::infinite() : StopTime::at(t);
  const ScalarDist obs = kernel_law(spec.base.kernel, lat.theta);
  const std::size_t observed = lat.stop.min_with(n);
  lat.z.resize(observed);
  lat.prefix_sum.assign(observed + 1, 0.0);
  for (std::size_t k = 0; k < observed; ++k) {
    lat.z[k] = draw(stream, obs);
    lat.prefix_sum[k + 1] = lat.prefix_sum[k] + lat.z[k];
  }
  if (lat.stop.is_finite()) {
    // Z_T for T beyond the path is still a fresh conditionally i.i.d. draw.
    lat.z_at_stop = lat.stop.value() <= n ? lat.z[lat.stop.value() - 1]
                                          : draw(stream, obs);
  }
  std::vector<double> x(n);
  for (std::size_t k = 1; k <= n; ++k) x[k - 1] = lat.z[lat.stop.min_with(k) - 1];
  PathSample path{Family::stopped_exchangeable, std::move(x), std::move(lat), {}};
  if (spec.base.has_predictive()) path.predictive_mean = predictive_means(path);
  return path;
}

PathSample generate(const ProcessSpec& spec, std::size_t n, Stream& stream) {
  return std::visit(
      overloaded{
          [&](const CompensatedGaussianSpec& s) {
            return gen_compensated_gaussian(s, n, stream);
          },
          [&](const PolyaUrnSpec& s) { return gen_polya(s, n, stream); },
          [&](const StoppedExchangeableSpec& s) {
            return gen_stopped_exchangeable(s, n, stream);
          },
          [&](const DeFinettiSpec& s) { return gen_definetti(s, n, stream); },
      },
      spec);
}

std::string_view family_name(Family f) {
  switch (f) {
    case Family::compensated_gaussian:
      return "compensated_gaussian";
    case Family::polya:
      return "polya";
    case Family::stopped_exchangeable:
      return "stopped_exchangeable";
    case Family::definetti:
      return "definetti";
  }
  return "unknown";
}

// --- Predictive and directing laws --------------------------------------------

ScalarDist predictive_law(const PathSample& path, std::size_t k) {
  if (k > path.size())
    throw IndexError("predictive_law: k = " + std::to_string(k) +
                     " beyond path length");
  return std::visit(
      overloaded{
          [&](const GaussianLatent& g) -> ScalarDist {
            return dist::Normal{g.partial_sum[k], g.c - g.b[k]};
          },
          [&](const UrnLatent& u) -> ScalarDist {
            return dist::Bernoulli{static_cast<double>(u.numerator[k]) /
                                   static_cast<double>(u.denominator[k])};
          },
          [&](const DeFinettiLatent& d) -> ScalarDist {
            return d.spec.predictive(k, d.prefix_sum[k]);
          },
          [&](const StoppedLatent& s) -> ScalarDist {
            // G_k reveals whether T <= k; once stopped the path is frozen.
            if (s.stop.is_finite() && s.stop.value() <= k)
              return point_mass(s.base.kernel, *s.z_at_stop);
            return s.base.predictive(k, s.prefix_sum[k]);
          },
      },
      path.latent);
}

double predictive_cdf(const PathSample& path, std::size_t k, double t) {
  return cdf(predictive_law(path, k), t);
}

double predictive_expectation(const PathSample& path, std::size_t k,
                              const FunctionDescriptor& f) {
  return expectation(predictive_law(path, k), f);
}

bool has_binary_predictive(const PathSample& path) {
  return std::visit(
      overloaded{
          [](const GaussianLatent&) { return false; },
          [](const UrnLatent&) { return true; },
          [](const DeFinettiLatent& d) {
            return is_bernoulli_kernel(d.spec.kernel) && d.spec.has_predictive();
          },
          [](const StoppedLatent& s) {
            return is_bernoulli_kernel(s.base.kernel) && s.base.has_predictive();
          },
      },
      path.latent);
}

DirectingLaw directing_law(const PathSample& path) {
  return std::visit(
      overloaded{
          [](const GaussianLatent& g) {
            return DirectingLaw{dist::Normal{g.partial_sum.back() + g.tail, 0.0},
                                true};
          },
          [&](const UrnLatent&) {
            return DirectingLaw{dist::Bernoulli{path.predictive_mean.back()},
                                false};
          },
          [](const DeFinettiLatent& d) {
            return DirectingLaw{kernel_law(d.spec.kernel, d.theta), true};
          },
          [](const StoppedLatent& s) {
            if (s.stop.is_finite())
              return DirectingLaw{point_mass(s.base.kernel, *s.z_at_stop), true};
            return DirectingLaw{kernel_law(s.base.kernel, s.theta), true};
          },
      },
      path.latent);
}

}  // namespace cidlab
