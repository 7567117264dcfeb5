#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cidlab/harness.hpp"

namespace cidlab {

/// oracle, gaussian, urn_clt, slln, empirical, predictive, stable,
/// diagnostics. "all" runs them in this order.
const std::vector<std::string>& suite_names();

/// Throws ParameterError for an unknown name.
std::vector<VerificationReport> run_suite(std::string_view name, std::uint64_t seed,
                                          Execution exec = Execution::parallel);

/// Seed of one experiment, derived from the suite seed and the experiment id.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view id);

}  // namespace cidlab
