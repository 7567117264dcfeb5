#include "cidlab/serialization.hpp"

#include <charconv>
#include <limits>
#include <sstream>

#include "cidlab/error.hpp"

namespace cidlab {

namespace {

template <class T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) throw ParameterError(std::string("missing field '") + key + "'");
  return j.at(key).get<T>();
}

json big_integer(const boost::multiprecision::cpp_int& v) {
  if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
    return static_cast<std::int64_t>(v);
  return v.str();
}

json kernel_json(const Kernel& k) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, kernel::Bernoulli>) return {{"kind", "bernoulli"}};
        else if constexpr (std::is_same_v<T, kernel::Normal>)
          return {{"kind", "normal"}, {"variance", v.variance}};
        else return {{"kind", "uniform"}, {"width", v.width}};
      },
      k);
}

Kernel kernel_from_json(const json& j) {
  const auto kind = required<std::string>(j, "kind");
  if (kind == "bernoulli") return kernel::Bernoulli{};
  if (kind == "normal") return kernel::Normal{j.value("variance", 1.0)};
  if (kind == "uniform") return kernel::Uniform{j.value("width", 1.0)};
  throw ParameterError("unknown kernel '" + kind + "'");
}

json definetti_json(const DeFinettiSpec& s) {
  return {{"family", "definetti"}, {"mixing", to_json(s.mixing)}, {"kernel", kernel_json(s.kernel)}};
}

DeFinettiSpec definetti_from_json(const json& j) {
  return {scalar_dist_from_json(j.at("mixing")), kernel_from_json(j.at("kernel"))};
}

json stop_json(const StopLaw& law) {
  if (const auto* g = std::get_if<stop::Geometric>(&law)) return {{"kind", "geometric"}, {"p", g->p}};
  const auto& t = std::get<stop::PointMass>(law).t;
  return {{"kind", "point_mass"}, {"t", t.is_finite() ? json(t.value()) : json(nullptr)}};
}

StopLaw stop_from_json(const json& j) {
  const auto kind = required<std::string>(j, "kind");
  if (kind == "geometric") return stop::Geometric{required<double>(j, "p")};
  if (kind == "point_mass") {
    if (!j.contains("t") || j.at("t").is_null()) return stop::PointMass{StopTime::infinite()};
    return stop::PointMass{StopTime::at(j.at("t").get<std::uint64_t>())};
  }
  throw ParameterError("unknown stop law '" + kind + "'");
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json to_json(const ScalarDist& d) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, dist::Normal>)
          return {{"kind", "normal"}, {"mean", v.mean}, {"variance", v.variance}};
        else if constexpr (std::is_same_v<T, dist::Bernoulli>) return {{"kind", "bernoulli"}, {"p", v.p}};
        else if constexpr (std::is_same_v<T, dist::Beta>) return {{"kind", "beta"}, {"a", v.a}, {"b", v.b}};
        else if constexpr (std::is_same_v<T, dist::Uniform>)
          return {{"kind", "uniform"}, {"lo", v.lo}, {"hi", v.hi}};
        else return {{"kind", "discrete"}, {"weights", v.weights}};
      },
      d);
}

ScalarDist scalar_dist_from_json(const json& j) {
  const auto kind = required<std::string>(j, "kind");
  ScalarDist d;
  if (kind == "normal") d = dist::Normal{j.value("mean", 0.0), j.value("variance", 1.0)};
  else if (kind == "point_mass") d = dist::Normal{required<double>(j, "value"), 0.0};
  else if (kind == "bernoulli") d = dist::Bernoulli{required<double>(j, "p")};
  else if (kind == "beta") d = dist::Beta{required<double>(j, "a"), required<double>(j, "b")};
  else if (kind == "uniform") d = dist::Uniform{j.value("lo", 0.0), j.value("hi", 1.0)};
  else if (kind == "discrete") d = dist::Discrete{required<std::vector<double>>(j, "weights")};
  else throw ParameterError("unknown distribution '" + kind + "'");
  validate(d);
  return d;
}

json to_json(const FunctionDescriptor& f) {
  json j = std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, fn::Identity>) return {{"kind", "identity"}};
        else if constexpr (std::is_same_v<T, fn::Indicator>) return {{"kind", "indicator"}, {"t", v.t}};
        else if constexpr (std::is_same_v<T, fn::Power>) return {{"kind", "power"}, {"p", v.p}};
        else {
          json table = json::array();
          for (const auto& [x, y] : v.table) table.push_back({x, y});
          return {{"kind", "custom"}, {"table", table}};
        }
      },
      f.base);
  if (f.scale != 1.0) j["scale"] = f.scale;
  return j;
}

FunctionDescriptor function_from_json(const json& j) {
  const auto kind = required<std::string>(j, "kind");
  FunctionDescriptor f;
  if (kind == "identity") f = FunctionDescriptor::identity();
  else if (kind == "indicator") f = FunctionDescriptor::indicator(required<double>(j, "t"));
  else if (kind == "power") f = FunctionDescriptor::power(required<int>(j, "p"));
  else if (kind == "custom") {
    std::map<double, double> table;
    for (const auto& row : j.at("table")) table[row.at(0).get<double>()] = row.at(1).get<double>();
    f = FunctionDescriptor::custom(std::move(table));
  } else {
    throw ParameterError("unknown function '" + kind + "'");
  }
  return f.scaled(j.value("scale", 1.0));
}

json to_json(const ProcessSpec& spec) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CompensatedGaussianSpec>) {
          json j{{"family", "compensated_gaussian"}, {"c", s.c}};
          if (const auto* cf = std::get_if<ClosedFormSchedule>(&s.schedule)) j["u"] = cf->u;
          else j["b"] = std::get<std::vector<double>>(s.schedule);
          return j;
        } else if constexpr (std::is_same_v<T, PolyaUrnSpec>) {
          json r;
          if (const auto* det = std::get_if<reinforcement::Deterministic>(&s.reinforcement)) {
            r = {{"kind", "deterministic"}, {"d", det->d}};
            if (det->cycle) r["cycle"] = true;
          } else if (const auto* iid = std::get_if<reinforcement::Iid>(&s.reinforcement)) {
            r = {{"kind", "iid"}, {"law", to_json(iid->law)}};
          } else {
            throw UnsupportedError("prefix-rule reinforcement cannot be serialized");
          }
          return {{"family", "polya"}, {"w", s.w}, {"r", s.r}, {"reinforcement", r}};
        } else if constexpr (std::is_same_v<T, StoppedExchangeableSpec>) {
          return {{"family", "stopped_exchangeable"}, {"base", definetti_json(s.base)},
                  {"stop", stop_json(s.stop)}};
        } else {
          return definetti_json(s);
        }
      },
      spec);
}

ProcessSpec process_from_json(const json& j) {
  const auto family = required<std::string>(j, "family");
  if (family == "compensated_gaussian") {
    CompensatedGaussianSpec s;
    s.c = j.value("c", 1.0);
    if (j.contains("b")) s.schedule = j.at("b").get<std::vector<double>>();
    else s.schedule = ClosedFormSchedule{j.value("u", 0.5)};
    return s;
  }
  if (family == "polya") {
    PolyaUrnSpec s;
    s.w = j.value<std::uint64_t>("w", 1);
    s.r = j.value<std::uint64_t>("r", 1);
    if (j.contains("reinforcement")) {
      const auto& r = j.at("reinforcement");
      const auto kind = required<std::string>(r, "kind");
      if (kind == "deterministic")
        s.reinforcement = reinforcement::Deterministic{required<std::vector<std::uint64_t>>(r, "d"),
                                                       r.value("cycle", false)};
      else if (kind == "iid")
        s.reinforcement = reinforcement::Iid{scalar_dist_from_json(r.at("law"))};
      else
        throw ParameterError("unknown reinforcement '" + kind + "'");
    }
    s.validate();
    return s;
  }
  if (family == "definetti") return definetti_from_json(j);
  if (family == "stopped_exchangeable")
    return StoppedExchangeableSpec{definetti_from_json(j.at("base")), stop_from_json(j.at("stop"))};
  throw ParameterError("unknown family '" + family + "'");
}

json to_json(const Rational& q) {
  return {{"num", big_integer(boost::multiprecision::numerator(q))},
          {"den", big_integer(boost::multiprecision::denominator(q))}};
}

json to_json(const Certificate& c) {
  json j{{"violated", c.violated}, {"n", c.n}, {"atom", c.atom},
         {"lhs", to_json(c.lhs)}, {"rhs", to_json(c.rhs)}};
  if (!c.permutation.empty()) j["permutation"] = c.permutation;
  return j;
}

json to_json(const SampleSummary& s) {
  return {{"count", s.count},
          {"mean", s.mean},
          {"variance", s.variance},
          {"quantiles", {{"q05", s.quantiles[0]}, {"q25", s.quantiles[1]}, {"q50", s.quantiles[2]},
                         {"q75", s.quantiles[3]}, {"q95", s.quantiles[4]}}}};
}

json to_json(const VerificationReport& r) {
  return {{"id", r.id},
          {"criterion", r.criterion},
          {"description", r.description},
          {"gated", r.gated},
          {"pass", r.pass},
          {"inconclusive", r.inconclusive},
          {"side_condition", r.side_condition},
          {"statistic", r.statistic},
          {"threshold", r.threshold},
          {"comparator", r.comparator == Comparator::less ? "less" : "greater"},
          {"seed", r.seed},
          {"summary", to_json(r.summary)},
          {"details", r.details},
          {"plot", r.plot}};
}

VerificationReport report_from_json(const json& j) {
  VerificationReport r;
  r.id = required<std::string>(j, "id");
  r.criterion = j.value("criterion", 0);
  r.description = j.value("description", "");
  r.gated = j.value("gated", true);
  r.pass = j.value("pass", false);
  r.inconclusive = j.value("inconclusive", false);
  r.side_condition = j.value("side_condition", true);
  r.statistic = j.value("statistic", 0.0);
  r.threshold = j.value("threshold", 0.0);
  r.comparator = j.value("comparator", "less") == "less" ? Comparator::less : Comparator::greater;
  r.seed = j.value<std::uint64_t>("seed", 0);
  if (j.contains("summary")) {
    const auto& s = j.at("summary");
    r.summary.count = s.value<std::size_t>("count", 0);
    r.summary.mean = s.value("mean", 0.0);
    r.summary.variance = s.value("variance", 0.0);
  }
  r.details = j.value("details", json::object());
  r.plot = j.value("plot", "");
  return r;
}

std::string empirical_process_csv(const EmpiricalProcessPath& ep, Family family,
                                  std::uint64_t seed) {
  const json meta{{"n", ep.n},
                  {"kind", centering_name(ep.centering)},
                  {"family", family_name(family)},
                  {"seed", seed}};
  std::ostringstream out;
  out << "# " << meta.dump() << "\n" << "t,value\n";
  for (std::size_t j = 0; j < ep.grid.size(); ++j)
    out << format_double(ep.grid[j]) << "," << format_double(ep.values[j]) << "\n";
  return out.str();
}

SimulationConfig simulation_config_from_json(const json& j) {
  SimulationConfig c;
  c.version = required<int>(j, "version");
  if (c.version != kConfigVersion)
    throw ParameterError("unsupported config version " + std::to_string(c.version));
  c.id = j.value("id", c.id);
  c.process = process_from_json(j.at("process"));
  c.n = j.value("n", c.n);
  c.replicas = j.value("replicas", c.replicas);
  c.seed = j.value<std::uint64_t>("seed", 0);
  c.paths_to_write = j.value("paths_to_write", c.paths_to_write);
  if (j.contains("statistic")) {
    const auto& s = j.at("statistic");
    c.statistic.kind = parse_centering(s.value("kind", "W"));
    if (s.contains("grid")) {
      c.statistic.f.reset();
      c.statistic.grid = s.at("grid").get<std::vector<double>>();
      c.statistic.add_order_statistics = s.value("order_statistics", false);
    } else if (s.contains("function")) {
      c.statistic.f = function_from_json(s.at("function"));
    }
  }
  if (c.n == 0 || c.replicas == 0) throw SizeError("simulate: n and replicas must be positive");
  return c;
}

}  // namespace cidlab
