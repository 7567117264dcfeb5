#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace cidlab {

/// Address of an independent random stream. Every replica of every
/// experiment draws from its own key, so results never depend on the order
/// in which replicas are scheduled.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;
  std::uint32_t lane = 0;

  friend bool operator==(const StreamKey&, const StreamKey&) = default;
};

/// Philox4x32-10 counter-based generator. The key holds the seed; the
/// counter holds (block, lane, replica), so any stream is reachable without
/// fast-forwarding. Satisfies UniformRandomBitGenerator.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(StreamKey key);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() { return next_u64(); }
  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1), 53 bits of resolution.
  double uniform();
  double standard_normal();

  const StreamKey& key() const { return key_; }

 private:
  void refill();

  StreamKey key_;
  std::array<std::uint32_t, 2> philox_key_{};
  std::uint32_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

inline Stream open_stream(StreamKey key) { return Stream(key); }

namespace dist {
struct Normal {
  double mean = 0.0;
  double variance = 1.0;
};
struct Bernoulli {
  double p = 0.5;
};
struct Beta {
  double a = 1.0;
  double b = 1.0;
};
struct Uniform {
  double lo = 0.0;
  double hi = 1.0;
};
/// Mass proportional to weights[i] on the integer i.
struct Discrete {
  std::vector<double> weights;
};
}  // namespace dist

/// Scalar law. Normal with zero variance is the point mass at its mean.
using ScalarDist = std::variant<dist::Normal, dist::Bernoulli, dist::Beta,
                                dist::Uniform, dist::Discrete>;

/// Throws ParameterError when the distribution's invariants are violated.
void validate(const ScalarDist& d);

double draw(Stream& stream, const ScalarDist& d);

double mean(const ScalarDist& d);
double variance(const ScalarDist& d);
double cdf(const ScalarDist& d, double t);
bool is_degenerate(const ScalarDist& d);

double normal_cdf(double x);
double normal_quantile(double p);

/// Square-root factorization of a PSD covariance, reusable across draws.
/// Uses pivoted LDL^T so matrices with zero eigenvalues are accepted.
class GaussianSampler {
 public:
  /// Throws MatrixError if the matrix is not symmetric or has an eigen-
  /// direction below -1e-10 times its largest diagonal entry.
  explicit GaussianSampler(const Eigen::MatrixXd& covariance);

  Eigen::VectorXd draw(Stream& stream) const;
  Eigen::Index dim() const { return factor_.rows(); }
  const Eigen::MatrixXd& factor() const { return factor_; }

 private:
  Eigen::MatrixXd factor_;  // covariance = factor_ * factor_^T
};

Eigen::VectorXd draw_gaussian_vector(Stream& stream,
                                     const Eigen::MatrixXd& covariance);

inline constexpr double kPsdTolerance = 1e-10;

}  // namespace cidlab
