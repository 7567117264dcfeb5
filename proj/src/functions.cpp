#include "cidlab/functions.hpp"

#include <cmath>
#include <string>

#include "cidlab/error.hpp"

namespace cidlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// Raw moments E[Y^p] of N(m, v) via E[Y^p] = m E[Y^(p-1)] + (p-1) v E[Y^(p-2)].
double normal_moment(double m, double v, int p) {
  double prev = 1.0, cur = m;
  if (p == 0) return 1.0;
  for (int k = 2; k <= p; ++k) {
    const double next = m * cur + (k - 1) * v * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double base_expectation(const ScalarDist& law, const fn::Power& pw) {
  const int p = pw.p;
  return std::visit(
      overloaded{
          [p](const dist::Normal& n) { return normal_moment(n.mean, n.variance, p); },
          [](const dist::Bernoulli& b) { return b.p; },
          [p](const dist::Beta& b) {
            double m = 1.0;
            for (int k = 0; k < p; ++k) m *= (b.a + k) / (b.a + b.b + k);
            return m;
          },
          [p](const dist::Uniform& u) {
            return (std::pow(u.hi, p + 1) - std::pow(u.lo, p + 1)) /
                   ((p + 1) * (u.hi - u.lo));
          },
          [p](const dist::Discrete& w) {
            double total = 0.0, acc = 0.0;
            for (std::size_t i = 0; i < w.weights.size(); ++i) {
              total += w.weights[i];
              acc += std::pow(static_cast<double>(i), p) * w.weights[i];
            }
            return acc / total;
          },
      },
      law);
}

double lookup(const fn::Custom& c, double x) {
  const auto it = c.table.find(x);
  if (it == c.table.end())
    throw UnsupportedError("custom function undefined at " + std::to_string(x));
  return it->second;
}

double base_expectation(const ScalarDist& law, const fn::Custom& c) {
  return std::visit(
      overloaded{
          [&](const dist::Normal& n) {
            if (n.variance != 0.0)
              throw UnsupportedError("custom function under a continuous law");
            return lookup(c, n.mean);
          },
          [&](const dist::Bernoulli& b) {
            double acc = 0.0;
            if (b.p < 1.0) acc += (1.0 - b.p) * lookup(c, 0.0);
            if (b.p > 0.0) acc += b.p * lookup(c, 1.0);
            return acc;
          },
          [&](const dist::Discrete& w) {
            double total = 0.0, acc = 0.0;
            for (std::size_t i = 0; i < w.weights.size(); ++i) {
              total += w.weights[i];
              if (w.weights[i] > 0.0)
                acc += w.weights[i] * lookup(c, static_cast<double>(i));
            }
            return acc / total;
          },
          [](const auto&) -> double {
            throw UnsupportedError("custom function under a continuous law");
          },
      },
      law);
}

}  // namespace

double evaluate(const FunctionDescriptor& f, double x) {
  const double base = std::visit(
      overloaded{
          [x](const fn::Identity&) { return x; },
          [x](const fn::Indicator& i) { return x <= i.t ? 1.0 : 0.0; },
          [x](const fn::Power& p) { return std::pow(x, p.p); },
          [x](const fn::Custom& c) { return lookup(c, x); },
      },
      f.base);
  return f.scale * base;
}

double expectation(const ScalarDist& law, const FunctionDescriptor& f) {
  const double base = std::visit(
      overloaded{
          [&](const fn::Identity&) { return mean(law); },
          [&](const fn::Indicator& i) { return cdf(law, i.t); },
          [&](const fn::Power& p) { return base_expectation(law, p); },
          [&](const fn::Custom& c) { return base_expectation(law, c); },
      },
      f.base);
  return f.scale * base;
}

}  // namespace cidlab
