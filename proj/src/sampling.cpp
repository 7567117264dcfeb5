#include "cidlab/sampling.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <boost/math/special_functions/beta.hpp>

#include "cidlab/error.hpp"

namespace cidlab {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

// Marsaglia-Tsang; shape < 1 handled by the usual U^(1/shape) boost.
double draw_gamma(Stream& s, double shape) {
  if (shape < 1.0) {
    const double boost = std::pow(s.uniform(), 1.0 / shape);
    return draw_gamma(s, shape + 1.0) * boost;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double z, v;
    do {
      z = s.standard_normal();
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = s.uniform();
    if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
    if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v;
  }
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

Stream::Stream(StreamKey key) : key_(key) {
  philox_key_ = {static_cast<std::uint32_t>(key.seed),
                 static_cast<std::uint32_t>(key.seed >> 32)};
}

void Stream::refill() {
  buffer_ = philox4x32_10({block_, key_.lane,
                           static_cast<std::uint32_t>(key_.replica),
                           static_cast<std::uint32_t>(key_.replica >> 32)},
                          philox_key_);
  ++block_;
  buffered_ = 4;
}

std::uint64_t Stream::next_u64() {
  if (buffered_ < 2) refill();
  const std::uint64_t hi = buffer_[4 - buffered_];
  const std::uint64_t lo = buffer_[5 - buffered_];
  buffered_ -= 2;
  return (hi << 32) | lo;
}

double Stream::uniform() {
  // (k + 0.5) / 2^53 never hits 0 or 1.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Stream::standard_normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  const double radius = std::sqrt(-2.0 * std::log(uniform()));
  const double angle = 2.0 * std::numbers::pi * uniform();
  spare_normal_ = radius * std::sin(angle);
  has_spare_normal_ = true;
  return radius * std::cos(angle);
}

void validate(const ScalarDist& d) {
  std::visit(
      overloaded{
          [](const dist::Normal& n) {
            if (!(n.variance >= 0.0) || !std::isfinite(n.mean) ||
                !std::isfinite(n.variance))
              throw ParameterError("normal: variance must be finite and >= 0");
          },
          [](const dist::Bernoulli& b) {
            if (!(b.p >= 0.0 && b.p <= 1.0))
              throw ParameterError("bernoulli: p must lie in [0, 1]");
          },
          [](const dist::Beta& b) {
            if (!(b.a > 0.0 && b.b > 0.0) || !std::isfinite(b.a) ||
                !std::isfinite(b.b))
              throw ParameterError("beta: a and b must be > 0");
          },
          [](const dist::Uniform& u) {
            if (!(u.lo < u.hi) || !std::isfinite(u.lo) || !std::isfinite(u.hi))
              throw ParameterError("uniform: requires lo < hi");
          },
          [](const dist::Discrete& w) {
            double total = 0.0;
            for (double x : w.weights) {
              if (!(x >= 0.0) || !std::isfinite(x))
                throw ParameterError("discrete: weights must be >= 0");
              total += x;
            }
            if (!(total > 0.0))
              throw ParameterError("discrete: weights must sum to > 0");
          },
      },
      d);
}

double draw(Stream& stream, const ScalarDist& d) {
  validate(d);
  return std::visit(
      overloaded{
          [&](const dist::Normal& n) {
            if (n.variance == 0.0) return n.mean;
            return n.mean + std::sqrt(n.variance) * stream.standard_normal();
          },
          [&](const dist::Bernoulli& b) {
            return stream.uniform() < b.p ? 1.0 : 0.0;
          },
          [&](const dist::Beta& b) {
            const double x = draw_gamma(stream, b.a);
            const double y = draw_gamma(stream, b.b);
            return x / (x + y);
          },
          [&](const dist::Uniform& u) {
            return u.lo + (u.hi - u.lo) * stream.uniform();
          },
          [&](const dist::Discrete& w) {
            const double total =
                std::accumulate(w.weights.begin(), w.weights.end(), 0.0);
            double target = stream.uniform() * total;
            std::size_t last_positive = 0;
            for (std::size_t i = 0; i < w.weights.size(); ++i) {
              if (w.weights[i] <= 0.0) continue;
              last_positive = i;
              if (target < w.weights[i]) return static_cast<double>(i);
              target -= w.weights[i];
            }
            return static_cast<double>(last_positive);
          },
      },
      d);
}

double mean(const ScalarDist& d) {
  return std::visit(
      overloaded{
          [](const dist::Normal& n) { return n.mean; },
          [](const dist::Bernoulli& b) { return b.p; },
          [](const dist::Beta& b) { return b.a / (b.a + b.b); },
          [](const dist::Uniform& u) { return 0.5 * (u.lo + u.hi); },
          [](const dist::Discrete& w) {
            double total = 0.0, first = 0.0;
            for (std::size_t i = 0; i < w.weights.size(); ++i) {
              total += w.weights[i];
              first += static_cast<double>(i) * w.weights[i];
            }
            return first / total;
          },
      },
      d);
}

double variance(const ScalarDist& d) {
  return std::visit(
      overloaded{
          [](const dist::Normal& n) { return n.variance; },
          [](const dist::Bernoulli& b) { return b.p * (1.0 - b.p); },
          [](const dist::Beta& b) {
            const double s = b.a + b.b;
            return b.a * b.b / (s * s * (s + 1.0));
          },
          [](const dist::Uniform& u) {
            return (u.hi - u.lo) * (u.hi - u.lo) / 12.0;
          },
          [](const dist::Discrete& w) {
            double total = 0.0, first = 0.0, second = 0.0;
            for (std::size_t i = 0; i < w.weights.size(); ++i) {
              const double x = static_cast<double>(i);
              total += w.weights[i];
              first += x * w.weights[i];
              second += x * x * w.weights[i];
            }
            const double m = first / total;
            return second / total - m * m;
          },
      },
      d);
}

bool is_degenerate(const ScalarDist& d) {
  return std::visit(
      overloaded{
          [](const dist::Normal& n) { return n.variance == 0.0; },
          [](const dist::Bernoulli& b) { return b.p == 0.0 || b.p == 1.0; },
          [](const dist::Beta&) { return false; },
          [](const dist::Uniform&) { return false; },
          [](const dist::Discrete& w) {
            int positive = 0;
            for (double x : w.weights) positive += x > 0.0;
            return positive == 1;
          },
      },
      d);
}

double cdf(const ScalarDist& d, double t) {
  return std::visit(
      overloaded{
          [t](const dist::Normal& n) {
            if (n.variance == 0.0) return t >= n.mean ? 1.0 : 0.0;
            return normal_cdf((t - n.mean) / std::sqrt(n.variance));
          },
          [t](const dist::Bernoulli& b) {
            if (t < 0.0) return 0.0;
            return t < 1.0 ? 1.0 - b.p : 1.0;
          },
          [t](const dist::Beta& b) {
            if (t <= 0.0) return 0.0;
            if (t >= 1.0) return 1.0;
            return boost::math::ibeta(b.a, b.b, t);
          },
          [t](const dist::Uniform& u) {
            if (t <= u.lo) return 0.0;
            if (t >= u.hi) return 1.0;
            return (t - u.lo) / (u.hi - u.lo);
          },
          [t](const dist::Discrete& w) {
            double total = 0.0, below = 0.0;
            for (std::size_t i = 0; i < w.weights.size(); ++i) {
              total += w.weights[i];
              if (static_cast<double>(i) <= t) below += w.weights[i];
            }
            return below / total;
          },
      },
      d);
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw ParameterError("normal_quantile: p outside [0, 1]");
  }
  // Acklam's rational approximation followed by one Halley step.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double e[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double low = 0.02425;
  double x;
  if (p < low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((e[0] * q + e[1]) * q + e[2]) * q + e[3]) * q + 1.0);
  } else if (p <= 1.0 - low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((e[0] * q + e[1]) * q + e[2]) * q + e[3]) * q + 1.0);
  }
  const double err = normal_cdf(x) - p;
  const double u = err * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

GaussianSampler::GaussianSampler(const Eigen::MatrixXd& covariance) {
  if (covariance.rows() != covariance.cols() || covariance.rows() == 0)
    throw MatrixError("covariance must be a non-empty square matrix");
  const double scale = std::max(covariance.diagonal().cwiseAbs().maxCoeff(), 0.0);
  const double tol = kPsdTolerance * (scale > 0.0 ? scale : 1.0);
  if (!covariance.allFinite())
    throw MatrixError("covariance has non-finite entries");
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > tol)
    throw MatrixError("covariance is not symmetric");
  const Eigen::Index dim = covariance.rows();
  if (scale == 0.0) {
    if (covariance.cwiseAbs().maxCoeff() > tol)
      throw MatrixError("covariance is not positive semidefinite");
    factor_ = Eigen::MatrixXd::Zero(dim, dim);
    return;
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(covariance);
  if (ldlt.info() != Eigen::Success)
    throw MatrixError("LDL^T factorization failed");
  Eigen::VectorXd d = ldlt.vectorD();
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (d(i) < -tol)
      throw MatrixError("covariance is not positive semidefinite (pivot " +
                        std::to_string(d(i)) + ")");
    d(i) = std::max(d(i), 0.0);
  }
  Eigen::MatrixXd lower = ldlt.matrixL();
  Eigen::MatrixXd scaled = lower * d.cwiseSqrt().asDiagonal();
  // covariance = P^T L D L^T P
  factor_ = ldlt.transpositionsP().transpose() * scaled;
  const double residual =
      (factor_ * factor_.transpose() - covariance).cwiseAbs().maxCoeff();
  if (residual > 1e-8 * scale)
    throw MatrixError("covariance is not positive semidefinite");
}

Eigen::VectorXd GaussianSampler::draw(Stream& stream) const {
  Eigen::VectorXd z(factor_.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = stream.standard_normal();
  return factor_ * z;
}

Eigen::VectorXd draw_gaussian_vector(Stream& stream,
                                     const Eigen::MatrixXd& covariance) {
  return GaussianSampler(covariance).draw(stream);
}

}  // namespace cidlab
