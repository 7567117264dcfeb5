#include "cidlab/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cidlab/error.hpp"

namespace cidlab {

namespace {

void require_predictive(const PathSample& path) {
  if (!path.has_predictive())
    throw UnsupportedError(std::string("family ") +
                           std::string(family_name(path.family)) +
                           " has no closed-form predictive law");
}

// a_k(f), using the cached predictive means for the identity.
double predictive_value(const PathSample& path, std::size_t k,
                        const FunctionDescriptor& f) {
  if (std::holds_alternative<fn::Identity>(f.base))
    return f.scale * path.predictive_mean[k];
  return predictive_expectation(path, k, f);
}

double sum_of(const PathSample& path, const FunctionDescriptor& f) {
  double total = 0.0;
  for (double x : path.x) total += evaluate(f, x);
  return total;
}

void require_increasing(std::span<const double> grid) {
  for (std::size_t j = 1; j < grid.size(); ++j)
    if (!(grid[j] > grid[j - 1]))
      throw ParameterError("grid must be strictly increasing");
}

bool is_iid(const PathSample& path) {
  const auto* d = std::get_if<DeFinettiLatent>(&path.latent);
  return d && is_degenerate(d->spec.mixing);
}

}  // namespace

std::string_view centering_name(Centering c) {
  switch (c) {
    case Centering::W:
      return "W";
    case Centering::B:
      return "B";
    case Centering::C:
      return "C";
  }
  return "?";
}

Centering parse_centering(std::string_view s) {
  if (s == "W") return Centering::W;
  if (s == "B") return Centering::B;
  if (s == "C") return Centering::C;
  throw ParameterError("unknown centering '" + std::string(s) + "'");
}

ResolvedVf resolve_v_f(const PathSample& path, const FunctionDescriptor& f) {
  const DirectingLaw alpha = directing_law(path);
  return {expectation(alpha.law, f), alpha.exact};
}

double centered_stat(const PathSample& path, const FunctionDescriptor& f,
                     Centering kind, std::optional<double> v_f) {
  const std::size_t n = path.size();
  if (n == 0) throw SizeError("centered_stat: empty path");
  const double root_n = std::sqrt(static_cast<double>(n));
  switch (kind) {
    case Centering::W: {
      const double v = v_f ? *v_f : resolve_v_f(path, f).value;
      return (sum_of(path, f) - static_cast<double>(n) * v) / root_n;
    }
    case Centering::B: {
      require_predictive(path);
      double total = 0.0;
      for (std::size_t k = 1; k <= n; ++k)
        total += evaluate(f, path.x[k - 1]) - predictive_value(path, k - 1, f);
      return total / root_n;
    }
    case Centering::C: {
      require_predictive(path);
      return (sum_of(path, f) -
              static_cast<double>(n) * predictive_value(path, n, f)) /
             root_n;
    }
  }
  throw ParameterError("centered_stat: bad centering");
}

double m_stat(const PathSample& path, const FunctionDescriptor& f) {
  require_predictive(path);
  const std::size_t n = path.size();
  double total = 0.0;
  double prev = predictive_value(path, 0, f);
  for (std::size_t k = 1; k <= n; ++k) {
    const double cur = predictive_value(path, k, f);
    const double term = evaluate(f, path.x[k - 1]) -
                        static_cast<double>(k) * cur +
                        static_cast<double>(k - 1) * prev;
    total += term * term;
    prev = cur;
  }
  return total / static_cast<double>(n);
}

std::vector<double> predictive_increments(const PathSample& path,
                                          const FunctionDescriptor& f) {
  require_predictive(path);
  std::vector<double> out(path.size());
  double prev = predictive_value(path, 0, f);
  for (std::size_t k = 1; k <= path.size(); ++k) {
    const double cur = predictive_value(path, k, f);
    out[k - 1] = cur - prev;
    prev = cur;
  }
  return out;
}

std::vector<double> q_k_values(const PathSample& path, double t) {
  require_predictive(path);
  const auto f = FunctionDescriptor::indicator(t);
  std::vector<double> out(path.size());
  double prev = predictive_cdf(path, 0, t);
  for (std::size_t k = 1; k <= path.size(); ++k) {
    const double cur = predictive_cdf(path, k, t);
    out[k - 1] = evaluate(f, path.x[k - 1]) - static_cast<double>(k) * cur +
                 static_cast<double>(k - 1) * prev;
    prev = cur;
  }
  return out;
}

SigmaEstimate sigma_estimate(std::span<const PathSample> paths, double s,
                             double t) {
  if (paths.empty()) throw SizeError("sigma_estimate: no paths");
  SigmaEstimate est;
  est.per_path.reserve(paths.size());
  for (const auto& path : paths) {
    const auto qs = q_k_values(path, s);
    const auto qt = s == t ? qs : q_k_values(path, t);
    double acc = 0.0;
    for (std::size_t k = 0; k < qs.size(); ++k) acc += qs[k] * qt[k];
    est.per_path.push_back(acc / static_cast<double>(qs.size()));
  }
  double m = 0.0;
  for (double v : est.per_path) m += v;
  m /= static_cast<double>(est.per_path.size());
  double ss = 0.0;
  for (double v : est.per_path) ss += (v - m) * (v - m);
  est.mean = m;
  est.stddev = est.per_path.size() > 1
                   ? std::sqrt(ss / static_cast<double>(est.per_path.size() - 1))
                   : 0.0;
  return est;
}

double block_product_mean(const PathSample& path,
                          std::span<const FunctionDescriptor> fs) {
  const std::size_t n = path.size();
  const std::size_t k = fs.size();
  if (k < 1) throw SizeError("block_product_mean: need at least one function");
  if (n <= k) throw SizeError("block_product_mean: need n > k");
  double total = 0.0;
  for (std::size_t i = 0; i + k <= n; ++i) {
    double prod = 1.0;
    for (std::size_t j = 0; j < k; ++j) prod *= evaluate(fs[j], path.x[i + j]);
    total += prod;
  }
  return total / static_cast<double>(n - k + 1);
}

double predictive_drift_average(const PathSample& path, double t) {
  require_predictive(path);
  const std::size_t n = path.size();
  double total = 0.0;
  double prev = predictive_cdf(path, 0, t);
  for (std::size_t k = 1; k <= n; ++k) {
    const double cur = predictive_cdf(path, k, t);
    const double kd = static_cast<double>(k) * (cur - prev);
    total += kd * kd;
    prev = cur;
  }
  return total / static_cast<double>(n);
}

double max_martingale_increment(const PathSample& path,
                                const FunctionDescriptor& f) {
  require_predictive(path);
  double best = 0.0;
  for (std::size_t k = 1; k <= path.size(); ++k)
    best = std::max(best, std::abs(evaluate(f, path.x[k - 1]) -
                                   predictive_value(path, k - 1, f)));
  return best / std::sqrt(static_cast<double>(path.size()));
}

std::vector<double> cumulative_predictive_cdf(const PathSample& path,
                                              std::span<const double> grid,
                                              Execution exec) {
  require_predictive(path);
  const std::size_t n = path.size();
  std::vector<double> out(grid.size());
  if (has_binary_predictive(path)) {
    double mass_at_zero = 0.0;
    for (std::size_t k = 0; k < n; ++k) mass_at_zero += 1.0 - path.predictive_mean[k];
    for (std::size_t j = 0; j < grid.size(); ++j)
      out[j] = grid[j] < 0.0 ? 0.0 : grid[j] < 1.0 ? mass_at_zero
                                                   : static_cast<double>(n);
    return out;
  }
  if (is_iid(path)) {
    const ScalarDist law = predictive_law(path, 0);
    for (std::size_t j = 0; j < grid.size(); ++j)
      out[j] = static_cast<double>(n) * cdf(law, grid[j]);
    return out;
  }
  std::vector<ScalarDist> laws;
  laws.reserve(n);
  for (std::size_t k = 0; k < n; ++k) laws.push_back(predictive_law(path, k));
  for_each_index(grid.size(), exec, [&](std::size_t j) {
    double acc = 0.0;
    for (const auto& law : laws) acc += cdf(law, grid[j]);
    out[j] = acc;
  });
  return out;
}

EmpiricalProcessPath empirical_process(const PathSample& path,
                                       std::span<const double> grid,
                                       Centering kind,
                                       const std::function<double(double)>& v_fn,
                                       Execution exec) {
  require_increasing(grid);
  const std::size_t n = path.size();
  if (n == 0) throw SizeError("empirical_process: empty path");
  const double nd = static_cast<double>(n);
  const double root_n = std::sqrt(nd);

  std::vector<double> sorted = path.x;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> counts(grid.size());
  std::size_t pos = 0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    while (pos < n && sorted[pos] <= grid[j]) ++pos;
    counts[j] = static_cast<double>(pos);
  }

  EmpiricalProcessPath ep{{grid.begin(), grid.end()}, std::vector<double>(grid.size()),
                          n, kind};
  switch (kind) {
    case Centering::W: {
      std::function<double(double)> v = v_fn;
      if (!v) {
        const ScalarDist alpha = directing_law(path).law;
        v = [alpha](double t) { return cdf(alpha, t); };
      }
      for (std::size_t j = 0; j < grid.size(); ++j)
        ep.values[j] = (counts[j] - nd * v(grid[j])) / root_n;
      break;
    }
    case Centering::B: {
      const auto cum = cumulative_predictive_cdf(path, grid, exec);
      for (std::size_t j = 0; j < grid.size(); ++j)
        ep.values[j] = (counts[j] - cum[j]) / root_n;
      break;
    }
    case Centering::C: {
      require_predictive(path);
      const ScalarDist terminal = predictive_law(path, n);
      for (std::size_t j = 0; j < grid.size(); ++j)
        ep.values[j] = (counts[j] - nd * cdf(terminal, grid[j])) / root_n;
      break;
    }
  }
  return ep;
}

std::vector<double> order_statistic_grid(const PathSample& path) {
  std::vector<double> sorted = path.x;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<double> grid;
  grid.reserve(2 * sorted.size());
  for (double v : sorted) {
    const double left = std::nextafter(v, -std::numeric_limits<double>::infinity());
    if (grid.empty() || left > grid.back()) grid.push_back(left);
    grid.push_back(v);
  }
  return grid;
}

double sup_norm(const EmpiricalProcessPath& ep) {
  if (ep.values.empty()) throw SizeError("sup_norm: empty grid");
  double best = 0.0;
  for (double v : ep.values) best = std::max(best, std::abs(v));
  return best;
}

Partition partition_from_cuts(std::span<const double> cuts) {
  require_increasing(cuts);
  constexpr double inf = std::numeric_limits<double>::infinity();
  Partition p;
  double lo = -inf;
  for (double c : cuts) {
    p.push_back({lo, c});
    lo = c;
  }
  p.push_back({lo, inf});
  return p;
}

double oscillation(const EmpiricalProcessPath& ep, const Partition& partition) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (partition.empty()) throw PartitionError("partition is empty");
  if (partition.front().lo != -inf || partition.back().hi != inf)
    throw PartitionError("partition must cover the real line");
  for (std::size_t i = 0; i < partition.size(); ++i) {
    if (!(partition[i].lo < partition[i].hi))
      throw PartitionError("partition interval with lo >= hi");
    if (i + 1 < partition.size() && partition[i].hi != partition[i + 1].lo)
      throw PartitionError("partition intervals must be contiguous");
  }
  double best = 0.0;
  std::size_t j = 0;
  for (const auto& interval : partition) {
    double lo = inf, hi = -inf;
    while (j < ep.grid.size() && ep.grid[j] < interval.hi) {
      lo = std::min(lo, ep.values[j]);
      hi = std::max(hi, ep.values[j]);
      ++j;
    }
    if (hi >= lo) best = std::max(best, hi - lo);
  }
  return best;
}

}  // namespace cidlab
