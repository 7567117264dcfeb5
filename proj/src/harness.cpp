#include "cidlab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "cidlab/error.hpp"

namespace cidlab {

namespace {

// 1% asymptotic Kolmogorov critical value and the finite-n allowance.
constexpr double kKsCritical = 1.6276;
constexpr double kKsAllowance = 1.25;
constexpr double kMaxExcludedFraction = 0.05;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<double> merged_grid(const StatisticSpec& s, const PathSample& path) {
  if (!s.add_order_statistics) return s.grid;
  std::vector<double> grid = order_statistic_grid(path);
  grid.insert(grid.end(), s.grid.begin(), s.grid.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::string test_name(TestKind t) {
  switch (t) {
    case TestKind::ks_one_sample: return "ks_one_sample";
    case TestKind::ks_two_sample: return "ks_two_sample";
    case TestKind::variance_bound: return "variance_bound";
    case TestKind::band_check: return "band_check";
    case TestKind::symmetry_check: return "symmetry_check";
  }
  return "unknown";
}

std::string limit_name(const LimitLaw& l) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, limit::Normal>) return "normal";
        else if constexpr (std::is_same_v<T, limit::PathNormal>) return "path_normal";
        else if constexpr (std::is_same_v<T, limit::Degenerate>) return "degenerate";
        else if constexpr (std::is_same_v<T, limit::Kolmogorov>) return "kolmogorov";
        else if constexpr (std::is_same_v<T, limit::GFSupNorm>) return "gf_supnorm";
        else if constexpr (std::is_same_v<T, limit::PathSigma>) return "path_sigma";
        else return "sampled_mixture";
      },
      l);
}

std::string control_name(Control c) {
  switch (c) {
    case Control::none: return "none";
    case Control::unstandardized: return "unstandardized";
    case Control::doubled_variance: return "doubled_variance";
  }
  return "none";
}

struct ReplicaOutcome {
  double value = 0.0;
  double reference = 0.0;
  bool kept = true;
  bool excluded = false;
};

// Sup of a centered Gaussian vector whose covariance is the per-path
// estimate (1/n) sum_k q_k(s) q_k(t) on the grid.
double path_sigma_sup(const PathSample& path, std::span<const double> grid, Stream& stream) {
  const auto m = static_cast<Eigen::Index>(grid.size());
  std::vector<std::vector<double>> q;
  q.reserve(grid.size());
  for (double t : grid) q.push_back(q_k_values(path, t));
  Eigen::MatrixXd sigma(m, m);
  const double n = static_cast<double>(path.size());
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      double acc = 0.0;
      const auto& a = q[static_cast<std::size_t>(i)];
      const auto& b = q[static_cast<std::size_t>(j)];
      for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
      sigma(i, j) = sigma(j, i) = acc / n;
    }
  const Eigen::VectorXd g = draw_gaussian_vector(stream, sigma);
  return g.size() == 0 ? 0.0 : g.cwiseAbs().maxCoeff();
}

VerificationReport run_distributional(
    const ExperimentConfig& config,
    const std::function<bool(const PathSample&)>& event) {
  config.validate();
  const auto start = Clock::now();
  const double reference_scale = config.control == Control::doubled_variance ? std::sqrt(2.0) : 1.0;
  const bool one_sample = config.test != TestKind::ks_two_sample;

  auto outcomes = map_replicas<ReplicaOutcome>(
      config.process, config.n, config.replicas, config.seed, config.exec,
      [&](const PathSample& path, Stream& limit_stream, std::size_t) {
        ReplicaOutcome o;
        o.kept = !event || event(path);
        o.value = evaluate_statistic(config.statistic, path);
        std::visit(
            [&](const auto& lim) {
              using T = std::decay_t<decltype(lim)>;
              if constexpr (std::is_same_v<T, limit::Normal>) {
                if (config.control != Control::unstandardized) o.value /= std::sqrt(lim.variance);
              } else if constexpr (std::is_same_v<T, limit::PathNormal>) {
                const double L = lim.variance(path);
                if (!(L >= lim.min_variance)) {
                  o.excluded = true;
                } else if (!one_sample) {
                  // Mixture against mixture: a draw from N(0, L) for this path.
                  o.reference = std::sqrt(L) * limit_stream.standard_normal();
                } else if (config.control != Control::unstandardized) {
                  o.value /= std::sqrt(L);
                }
              } else if constexpr (std::is_same_v<T, limit::GFSupNorm>) {
                o.reference = sample_gf_supnorm(lim.F, merged_grid(config.statistic, path),
                                                limit_stream, lim.method);
              } else if constexpr (std::is_same_v<T, limit::PathSigma>) {
                o.reference = path_sigma_sup(path, config.statistic.grid, limit_stream);
              } else if constexpr (std::is_same_v<T, limit::SampledMixture>) {
                o.reference = sample_mixture_normal(lim.law, limit_stream);
              }
            },
            config.limit);
        if (one_sample) o.value /= reference_scale;
        o.reference *= reference_scale;
        return o;
      });

  // Sequential, order-fixed reduction.
  std::vector<double> samples, reference;
  std::size_t excluded = 0, conditioned = 0;
  for (const auto& o : outcomes) {
    if (!o.kept) continue;
    ++conditioned;
    if (o.excluded) {
      ++excluded;
      continue;
    }
    samples.push_back(o.value);
    reference.push_back(o.reference);
  }

  VerificationReport rep;
  rep.id = config.id;
  rep.criterion = config.criterion;
  rep.seed = config.seed;
  rep.summary = summarize(samples);
  rep.comparator = config.control == Control::none ? Comparator::less : Comparator::greater;
  rep.inconclusive = conditioned > 0 &&
                     static_cast<double>(excluded) > kMaxExcludedFraction * static_cast<double>(conditioned);

  const bool ks = config.test == TestKind::ks_one_sample || config.test == TestKind::ks_two_sample;
  if (ks && rep.inconclusive && samples.size() < 100) {
    // Too few usable paths to run the test at all.
    rep.details["skipped"] = true;
  } else switch (config.test) {
    case TestKind::ks_one_sample: {
      std::function<double(double)> F = normal_cdf;
      if (std::holds_alternative<limit::Kolmogorov>(config.limit)) F = kolmogorov_cdf;
      rep.statistic = ks_one_sample(samples, F);
      rep.threshold = config.tolerance.value_or(ks_one_sample_threshold(samples.size()));
      rep.plot = std::holds_alternative<limit::Kolmogorov>(config.limit) ? "histogram" : "qq_normal";
      break;
    }
    case TestKind::ks_two_sample:
      rep.statistic = ks_two_sample(samples, reference);
      rep.threshold =
          config.tolerance.value_or(ks_two_sample_threshold(samples.size(), reference.size()));
      rep.plot = "histogram";
      rep.details["reference_summary"] = {{"mean", summarize(reference).mean},
                                          {"variance", summarize(reference).variance}};
      break;
    case TestKind::variance_bound:
      rep.statistic = rep.summary.variance;
      rep.threshold = *config.tolerance;
      rep.plot = "histogram";
      break;
    case TestKind::band_check: {
      std::vector<double> abs_values(samples.size());
      std::transform(samples.begin(), samples.end(), abs_values.begin(),
                     [](double v) { return std::abs(v); });
      rep.statistic = quantile(abs_values, 0.95);
      rep.threshold = *config.tolerance;
      rep.plot = "histogram";
      break;
    }
    case TestKind::symmetry_check: {
      double pos = 0.0, neg = 0.0;
      for (double v : samples) {
        if (v > 0.0) pos += 1.0;
        if (v < 0.0) neg += 1.0;
      }
      rep.statistic = pos + neg > 0.0 ? std::abs(pos - neg) / std::sqrt(pos + neg) : 0.0;
      rep.threshold = config.tolerance.value_or(3.0);
      break;
    }
  }
  rep.details["n"] = config.n;
  rep.details["replicas"] = config.replicas;
  rep.details["test"] = test_name(config.test);
  rep.details["limit"] = limit_name(config.limit);
  rep.details["control"] = control_name(config.control);
  rep.details["tested"] = samples.size();
  rep.details["excluded"] = excluded;
  if (event) rep.details["conditioned"] = conditioned;
  rep.samples = std::move(samples);
  rep.decide();
  rep.wall_seconds = seconds_since(start);
  return rep;
}

template <class Fn>
std::vector<double> replica_values(const ExperimentConfig& config, std::size_t n, Fn&& fn) {
  return map_replicas<double>(config.process, n, config.replicas, config.seed, config.exec,
                              [&](const PathSample& path, Stream&, std::size_t) { return fn(path); });
}

std::vector<std::size_t> decade_sizes(std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t m : {n / 100, n / 10, n})
    if (m > 0 && (out.empty() || m > out.back())) out.push_back(m);
  return out;
}

}  // namespace

double evaluate_statistic(const StatisticSpec& s, const PathSample& path) {
  if (s.f) return centered_stat(path, *s.f, s.kind);
  const auto grid = merged_grid(s, path);
  return sup_norm(empirical_process(path, grid, s.kind));
}

void ExperimentConfig::validate() const {
  if (n == 0) throw SizeError("experiment: n must be positive");
  if (replicas == 0) throw SizeError("experiment: replicas must be positive");
  const bool distributional = test == TestKind::ks_one_sample || test == TestKind::ks_two_sample;
  if (distributional && replicas < 100)
    throw SizeError("experiment: distributional tests need at least 100 replicas");
  if (tolerance && !(*tolerance > 0.0)) throw ParameterError("experiment: tolerance must be positive");
  if (!tolerance && (test == TestKind::variance_bound || test == TestKind::band_check))
    throw ParameterError("experiment: this test needs an explicit tolerance");
  if (!statistic.f && statistic.grid.empty() && !statistic.add_order_statistics)
    throw ParameterError("experiment: process statistic needs a grid");
}

SampleSummary summarize(std::span<const double> samples) {
  SampleSummary s;
  s.count = samples.size();
  if (samples.empty()) return s;
  double m = 0.0;
  for (double v : samples) m += v;
  m /= static_cast<double>(samples.size());
  double ss = 0.0;
  for (double v : samples) ss += (v - m) * (v - m);
  s.mean = m;
  s.variance = samples.size() > 1 ? ss / static_cast<double>(samples.size() - 1) : 0.0;
  std::vector<double> copy(samples.begin(), samples.end());
  std::sort(copy.begin(), copy.end());
  const std::array<double, 5> ps{0.05, 0.25, 0.5, 0.75, 0.95};
  for (std::size_t i = 0; i < ps.size(); ++i) s.quantiles[i] = quantile(copy, ps[i]);
  return s;
}

double quantile(std::vector<double> samples, double p) {
  if (samples.empty()) throw SizeError("quantile: no samples");
  std::sort(samples.begin(), samples.end());
  const double h = (static_cast<double>(samples.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, samples.size() - 1);
  return samples[lo] + (h - static_cast<double>(lo)) * (samples[hi] - samples[lo]);
}

void VerificationReport::decide() {
  const bool within = comparator == Comparator::less ? statistic < threshold : statistic > threshold;
  pass = within && side_condition && !inconclusive;
}

std::vector<double> run_replicas(const ExperimentConfig& config) {
  config.validate();
  return replica_values(config, config.n,
                        [&](const PathSample& path) { return evaluate_statistic(config.statistic, path); });
}

double ks_one_sample(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.size() < 100) throw SizeError("ks_one_sample: need at least 100 samples");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double r = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / r - F, F - static_cast<double>(i) / r});
  }
  return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 100 || b.size() < 100) throw SizeError("ks_two_sample: need at least 100 samples each");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

double ks_one_sample_threshold(std::size_t r) {
  return kKsAllowance * kKsCritical / std::sqrt(static_cast<double>(r));
}

double ks_two_sample_threshold(std::size_t r1, std::size_t r2) {
  const double a = static_cast<double>(r1), b = static_cast<double>(r2);
  return kKsAllowance * kKsCritical * std::sqrt((a + b) / (a * b));
}

VerificationReport clt_experiment(const ExperimentConfig& config) {
  return run_distributional(config, {});
}

VerificationReport polya_clt_experiment(const ExperimentConfig& config) {
  const auto* urn = std::get_if<PolyaUrnSpec>(&config.process);
  if (!urn) throw UnsupportedError("polya_clt_experiment: process must be an urn");
  const double delta = reinforcement_dispersion(*urn);
  ExperimentConfig c = config;
  c.statistic = {Centering::C, FunctionDescriptor::identity(), {}, false};
  if (delta == 0.0) {
    c.limit = limit::Degenerate{};
    c.test = TestKind::variance_bound;
    if (!c.tolerance) c.tolerance = 2e-3;
  } else {
    c.limit = limit::PathNormal{[delta](const PathSample& p) {
      const double v = p.predictive_mean.back();
      return delta * v * (1.0 - v);
    }};
  }
  auto rep = run_distributional(c, {});
  rep.details["delta"] = delta;
  return rep;
}

VerificationReport stable_conditional_test(const ExperimentConfig& config,
                                           const std::function<bool(const PathSample&)>& event,
                                           const std::string& event_name) {
  auto rep = run_distributional(config, event);
  const auto conditioned = rep.details["conditioned"].get<std::size_t>();
  if (conditioned < 100) throw SizeError("stable_conditional_test: too few conditioned samples");
  rep.details["event"] = event_name;
  rep.details["event_fraction"] = static_cast<double>(conditioned) / static_cast<double>(config.replicas);
  return rep;
}

VerificationReport uniform_convergence_test(const ExperimentConfig& config) {
  config.validate();
  if (!config.tolerance) throw ParameterError("uniform_convergence_test: tolerance required");
  const auto start = Clock::now();
  VerificationReport rep;
  rep.id = config.id;
  rep.criterion = config.criterion;
  rep.seed = config.seed;
  rep.plot = "curve";
  std::vector<double> sizes, q95s;
  std::vector<double> last;
  for (std::size_t m : decade_sizes(config.n)) {
    last = replica_values(config, m, [](const PathSample& path) {
      const auto grid = order_statistic_grid(path);
      return sup_norm(empirical_process(path, grid, Centering::C)) /
             std::sqrt(static_cast<double>(path.size()));
    });
    sizes.push_back(static_cast<double>(m));
    q95s.push_back(quantile(last, 0.95));
  }
  for (std::size_t i = 1; i < q95s.size(); ++i)
    if (!(q95s[i] < q95s[i - 1])) rep.side_condition = false;
  rep.summary = summarize(last);
  rep.statistic = q95s.back();
  rep.threshold = *config.tolerance;
  rep.details["n_values"] = sizes;
  rep.details["q95"] = q95s;
  rep.details["decreasing"] = rep.side_condition;
  rep.samples = std::move(last);
  rep.decide();
  rep.wall_seconds = seconds_since(start);
  return rep;
}

VerificationReport asymptotic_exchangeability_test(const ExperimentConfig& config,
                                                   std::vector<std::size_t> ms) {
  config.validate();
  if (ms.empty()) throw SizeError("asymptotic_exchangeability_test: no positions");
  const auto start = Clock::now();
  VerificationReport rep;
  rep.id = config.id;
  rep.criterion = config.criterion;
  rep.seed = config.seed;
  rep.plot = "curve";
  const double R = static_cast<double>(config.replicas);
  std::vector<double> gaps, ses;
  for (std::size_t m : ms) {
    // +1 for (1, 0, 0) at positions m+1..m+3, -1 for (0, 1, 0), 0 otherwise.
    const auto signs = replica_values(config, m + 3, [m](const PathSample& path) {
      const double a = path.x[m], b = path.x[m + 1], c = path.x[m + 2];
      for (double v : {a, b, c})
        if (v != 0.0 && v != 1.0) throw UnsupportedError("asymptotic exchangeability needs binary data");
      if (c != 0.0) return 0.0;
      return a == 1.0 && b == 0.0 ? 1.0 : a == 0.0 && b == 1.0 ? -1.0 : 0.0;
    });
    double sum = 0.0, sum_sq = 0.0;
    for (double s : signs) {
      sum += s;
      sum_sq += s * s;
    }
    const double gap = sum / R;
    gaps.push_back(gap);
    ses.push_back(std::sqrt(std::max(sum_sq / R - gap * gap, 0.0) / R));
  }
  const double se = ses.back();
  rep.statistic = se > 0.0 ? std::abs(gaps.back()) / se : 0.0;
  rep.threshold = config.tolerance.value_or(3.0);
  rep.summary = summarize(gaps);
  std::vector<double> m_values(ms.begin(), ms.end());
  rep.details["m_values"] = m_values;
  rep.details["gaps"] = gaps;
  rep.details["standard_errors"] = ses;
  rep.details["first_gap_exceeds_last"] = std::abs(gaps.front()) > std::abs(gaps.back());
  rep.samples = gaps;
  rep.decide();
  rep.wall_seconds = seconds_since(start);
  return rep;
}

VerificationReport empirical_process_experiment(const ExperimentConfig& config) {
  auto rep = run_distributional(config, {});
  // Predictive drift average at a handful of grid midpoints, on a few paths.
  const auto& grid = config.statistic.grid;
  if (grid.size() >= 2) {
    std::vector<double> mids;
    const std::size_t step = std::max<std::size_t>(1, (grid.size() - 1) / 8);
    for (std::size_t j = 0; j + 1 < grid.size(); j += step) mids.push_back(0.5 * (grid[j] + grid[j + 1]));
    ExperimentConfig few = config;
    few.replicas = std::min<std::size_t>(config.replicas, 20);
    std::vector<double> sizes, averages;
    bool available = true;
    for (std::size_t m : decade_sizes(config.n)) {
      std::vector<double> per_path;
      try {
        per_path = replica_values(few, m, [&](const PathSample& path) {
          double worst = 0.0;
          for (double t : mids) worst = std::max(worst, predictive_drift_average(path, t));
          return worst;
        });
      } catch (const UnsupportedError&) {
        available = false;
        break;
      }
      sizes.push_back(static_cast<double>(m));
      averages.push_back(summarize(per_path).mean);
    }
    if (available) {
      rep.details["drift_average_n"] = sizes;
      rep.details["drift_average_max"] = averages;
    }
  }
  return rep;
}

VerificationReport martingale_increment_diagnostic(const ExperimentConfig& config) {
  config.validate();
  const auto start = Clock::now();
  const FunctionDescriptor f = config.statistic.f.value_or(FunctionDescriptor::identity());
  VerificationReport rep;
  rep.id = config.id;
  rep.criterion = config.criterion;
  rep.seed = config.seed;
  rep.plot = "curve";
  const std::vector<std::size_t> sizes{std::max<std::size_t>(config.n / 100, 1), config.n};
  std::vector<double> q95s, last;
  for (std::size_t m : sizes) {
    last = replica_values(config, m,
                          [&](const PathSample& path) { return max_martingale_increment(path, f); });
    q95s.push_back(quantile(last, 0.95));
  }
  rep.summary = summarize(last);
  rep.statistic = q95s.back();
  rep.threshold = q95s.front();
  rep.details["n_values"] = std::vector<double>{static_cast<double>(sizes[0]), static_cast<double>(sizes[1])};
  rep.details["q95"] = q95s;
  rep.samples = std::move(last);
  rep.decide();
  rep.wall_seconds = seconds_since(start);
  return rep;
}

VerificationReport oscillation_diagnostic(const ExperimentConfig& config,
                                          std::vector<std::size_t> cell_counts,
                                          const std::function<double(double)>& quantile_fn) {
  config.validate();
  if (cell_counts.empty()) throw SizeError("oscillation_diagnostic: no partitions");
  const auto start = Clock::now();
  std::vector<Partition> partitions;
  for (std::size_t cells : cell_counts) {
    std::vector<double> cuts;
    for (std::size_t i = 1; i < cells; ++i)
      cuts.push_back(quantile_fn(static_cast<double>(i) / static_cast<double>(cells)));
    partitions.push_back(partition_from_cuts(cuts));
  }
  const std::size_t P = partitions.size();
  auto per_replica = map_replicas<std::vector<double>>(
      config.process, config.n, config.replicas, config.seed, config.exec,
      [&](const PathSample& path, Stream&, std::size_t) {
        const auto ep = empirical_process(path, config.statistic.grid, config.statistic.kind);
        std::vector<double> out;
        for (const auto& part : partitions) out.push_back(oscillation(ep, part));
        return out;
      });
  std::vector<double> means(P, 0.0);
  for (const auto& v : per_replica)
    for (std::size_t i = 0; i < P; ++i) means[i] += v[i] / static_cast<double>(per_replica.size());
  VerificationReport rep;
  rep.id = config.id;
  rep.criterion = config.criterion;
  rep.seed = config.seed;
  rep.gated = false;
  rep.plot = "curve";
  rep.statistic = means.back();
  rep.threshold = means.front();
  std::vector<double> cells(cell_counts.begin(), cell_counts.end());
  rep.details["cells"] = cells;
  rep.details["mean_oscillation"] = means;
  rep.summary = summarize(means);
  rep.samples = means;
  rep.decide();
  rep.wall_seconds = seconds_since(start);
  return rep;
}

VerificationReport m_stat_trajectory(const ExperimentConfig& config) {
  config.validate();
  const auto start = Clock::now();
  const FunctionDescriptor f = config.statistic.f.value_or(FunctionDescriptor::identity());
  VerificationReport rep;
  rep.id = config.id;
  rep.criterion = config.criterion;
  rep.seed = config.seed;
  rep.gated = false;
  rep.plot = "curve";
  std::vector<double> sizes, means, sds, last;
  for (std::size_t m : decade_sizes(config.n)) {
    last = replica_values(config, m, [&](const PathSample& path) { return m_stat(path, f); });
    const auto s = summarize(last);
    sizes.push_back(static_cast<double>(m));
    means.push_back(s.mean);
    sds.push_back(std::sqrt(s.variance));
  }
  rep.summary = summarize(last);
  rep.statistic = sds.back();
  rep.threshold = sds.front();
  rep.details["n_values"] = sizes;
  rep.details["mean"] = means;
  rep.details["stddev"] = sds;
  rep.details["exploratory"] = true;
  rep.samples = std::move(last);
  rep.decide();
  rep.wall_seconds = seconds_since(start);
  return rep;
}

}  // namespace cidlab
