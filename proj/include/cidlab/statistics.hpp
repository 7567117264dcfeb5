#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cidlab/functions.hpp"
#include "cidlab/parallel.hpp"
#include "cidlab/processes.hpp"

namespace cidlab {

/// W centers at the directing-measure mean V_f, B at the one-step predictive
/// means, C at the terminal predictive mean a_n(f).
enum class Centering { W, B, C };

std::string_view centering_name(Centering c);
Centering parse_centering(std::string_view s);

/// V_f for the path, plus whether it is exact (Gaussian, de Finetti and
/// stopped families expose their directing measure) or estimated as a_n(f).
struct ResolvedVf {
  double value = 0.0;
  bool exact = true;
};
ResolvedVf resolve_v_f(const PathSample& path, const FunctionDescriptor& f);

double centered_stat(const PathSample& path, const FunctionDescriptor& f,
                     Centering kind, std::optional<double> v_f = std::nullopt);

/// (1/n) sum_k (f(X_k) - k a_k(f) + (k - 1) a_{k-1}(f))^2.
double m_stat(const PathSample& path, const FunctionDescriptor& f);

/// D_k = a_k(f) - a_{k-1}(f), k = 1..n.
std::vector<double> predictive_increments(const PathSample& path,
                                          const FunctionDescriptor& f);

/// q_k(t) for k = 1..n.
std::vector<double> q_k_values(const PathSample& path, double t);

struct SigmaEstimate {
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> per_path;
};
SigmaEstimate sigma_estimate(std::span<const PathSample> paths, double s,
                             double t);

/// Average of prod_j f_j(X_{i+j}) over the complete windows i = 0..n-k.
double block_product_mean(const PathSample& path,
                          std::span<const FunctionDescriptor> fs);

/// (1/n) sum_k k^2 D_k(t)^2 for the indicator of (-inf, t].
double predictive_drift_average(const PathSample& path, double t);

/// max_k |f(X_k) - a_{k-1}(f)| / sqrt(n).
double max_martingale_increment(const PathSample& path,
                                const FunctionDescriptor& f);

struct EmpiricalProcessPath {
  std::vector<double> grid;
  std::vector<double> values;
  std::size_t n = 0;
  Centering centering = Centering::W;
};

/// W, B or C evaluated on the indicators of (-inf, t_j]. `v_fn` overrides the
/// directing-measure cdf used by W.
EmpiricalProcessPath empirical_process(
    const PathSample& path, std::span<const double> grid, Centering kind,
    const std::function<double(double)>& v_fn = {},
    Execution exec = Execution::serial);

/// sum_{k=0}^{n-1} P(X_{k+1} <= t_j | G_k) for each grid point.
std::vector<double> cumulative_predictive_cdf(const PathSample& path,
                                              std::span<const double> grid,
                                              Execution exec = Execution::serial);

/// Every order statistic together with its left neighbour in floating point,
/// so the sup of an indicator process over this grid is the exact sup.
std::vector<double> order_statistic_grid(const PathSample& path);

double sup_norm(const EmpiricalProcessPath& ep);

/// Right-open interval [lo, hi).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};
using Partition = std::vector<Interval>;

/// (-inf, c_1), [c_1, c_2), ..., [c_m, +inf).
Partition partition_from_cuts(std::span<const double> cuts);

double oscillation(const EmpiricalProcessPath& ep, const Partition& partition);

}  // namespace cidlab
