#pragma once

#include <span>
#include <string>
#include <vector>

namespace cidlab::svg {

/// Sample quantiles against standard normal quantiles, with the y = x line.
std::string qq_normal(std::span<const double> samples, const std::string& title);

std::string histogram(std::span<const double> samples, const std::string& title,
                      std::size_t bins = 40);

/// Polyline through (x_i, y_i); x on a log10 axis when `log_x` is set.
std::string curve(std::span<const double> x, std::span<const double> y,
                  const std::string& title, bool log_x);

}  // namespace cidlab::svg
