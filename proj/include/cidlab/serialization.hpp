#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "cidlab/harness.hpp"
#include "cidlab/oracle.hpp"
#include "cidlab/processes.hpp"
#include "cidlab/statistics.hpp"

namespace cidlab {

using nlohmann::json;

inline constexpr int kConfigVersion = 1;

json to_json(const ScalarDist& d);
ScalarDist scalar_dist_from_json(const json& j);

json to_json(const FunctionDescriptor& f);
FunctionDescriptor function_from_json(const json& j);

/// Prefix-rule reinforcement holds code and cannot be serialized.
json to_json(const ProcessSpec& spec);
ProcessSpec process_from_json(const json& j);

/// {"num": ..., "den": ...}; integers that do not fit in 64 bits are strings.
json to_json(const Rational& q);
json to_json(const Certificate& c);
json to_json(const SampleSummary& s);
/// Everything except wall time and raw samples, so reruns are byte-identical.
json to_json(const VerificationReport& r);
VerificationReport report_from_json(const json& j);

/// "# {metadata}" line, then "t,value" rows.
std::string empirical_process_csv(const EmpiricalProcessPath& ep, Family family,
                                  std::uint64_t seed);

std::string format_double(double v);

/// Input of `cidlab simulate`.
struct SimulationConfig {
  int version = kConfigVersion;
  std::string id = "simulation";
  ProcessSpec process;
  std::size_t n = 1000;
  std::size_t replicas = 100;
  std::uint64_t seed = 0;
  StatisticSpec statistic;
  /// Number of raw paths written out in full.
  std::size_t paths_to_write = 1;
};
SimulationConfig simulation_config_from_json(const json& j);

}  // namespace cidlab
