#pragma once

#include <map>
#include <variant>

#include "cidlab/sampling.hpp"

namespace cidlab {

namespace fn {
struct Identity {};
/// Indicator of (-inf, t].
struct Indicator {
  double t = 0.0;
};
struct Power {
  int p = 1;
};
/// Tabulated map for finite-state families.
struct Custom {
  std::map<double, double> table;
};
}  // namespace fn

/// f(x) = scale * base(x).
struct FunctionDescriptor {
  std::variant<fn::Identity, fn::Indicator, fn::Power, fn::Custom> base;
  double scale = 1.0;

  static FunctionDescriptor identity() { return {fn::Identity{}}; }
  static FunctionDescriptor indicator(double t) { return {fn::Indicator{t}}; }
  static FunctionDescriptor power(int p) { return {fn::Power{p}}; }
  static FunctionDescriptor custom(std::map<double, double> table) {
    return {fn::Custom{std::move(table)}};
  }
  FunctionDescriptor scaled(double lambda) const {
    FunctionDescriptor out = *this;
    out.scale *= lambda;
    return out;
  }
};

double evaluate(const FunctionDescriptor& f, double x);

/// E[f(Y)] for Y distributed as `law`. Throws UnsupportedError when no closed
/// form is available (e.g. a tabulated f under a continuous law).
double expectation(const ScalarDist& law, const FunctionDescriptor& f);

}  // namespace cidlab
