// cidlab command line: simulate, verify, oracle, report.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "cidlab/error.hpp"
#include "cidlab/harness.hpp"
#include "cidlab/oracle.hpp"
#include "cidlab/serialization.hpp"
#include "cidlab/suites.hpp"
#include "cidlab/svg.hpp"

namespace fs = std::filesystem;
using namespace cidlab;

namespace {

json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ParameterError("cannot open " + p.string());
  return json::parse(in);
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ParameterError("cannot write " + p.string());
  out << content;
}

int cmd_simulate(const std::string& config_path, const fs::path& out_dir) {
  const auto cfg = simulation_config_from_json(read_json(config_path));
  fs::create_directories(out_dir);

  struct Row {
    double value = 0.0;
    std::string path_csv;
    std::string process_csv;
  };
  const auto rows = map_replicas<Row>(
      cfg.process, cfg.n, cfg.replicas, cfg.seed, Execution::parallel,
      [&](const PathSample& path, Stream&, std::size_t r) {
        Row row;
        row.value = evaluate_statistic(cfg.statistic, path);
        if (r < cfg.paths_to_write) {
          std::ostringstream p;
          for (std::size_t k = 0; k < path.size(); ++k) {
            p << r << "," << k + 1 << "," << format_double(path.x[k]) << ",";
            if (path.has_predictive()) p << format_double(path.predictive_mean[k + 1]);
            p << "\n";
          }
          row.path_csv = p.str();
          if (!cfg.statistic.f) {
            std::vector<double> grid = cfg.statistic.grid;
            if (cfg.statistic.add_order_statistics) {
              auto os = order_statistic_grid(path);
              grid.insert(grid.end(), os.begin(), os.end());
              std::sort(grid.begin(), grid.end());
              grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
            }
            row.process_csv = empirical_process_csv(
                empirical_process(path, grid, cfg.statistic.kind), path.family, cfg.seed);
          }
        }
        return row;
      });

  std::ostringstream stats, paths;
  stats << "replica,value\n";
  paths << "replica,k,x,predictive_mean\n";
  std::vector<double> values;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    stats << r << "," << format_double(rows[r].value) << "\n";
    paths << rows[r].path_csv;
    values.push_back(rows[r].value);
    if (!rows[r].process_csv.empty())
      write_file(out_dir / (cfg.id + "_process_" + std::to_string(r) + ".csv"), rows[r].process_csv);
  }
  write_file(out_dir / (cfg.id + "_statistics.csv"), stats.str());
  write_file(out_dir / (cfg.id + "_paths.csv"), paths.str());
  json meta{{"version", cfg.version},
            {"id", cfg.id},
            {"process", to_json(cfg.process)},
            {"n", cfg.n},
            {"replicas", cfg.replicas},
            {"seed", cfg.seed},
            {"statistic_kind", centering_name(cfg.statistic.kind)},
            {"summary", to_json(summarize(values))}};
  write_file(out_dir / (cfg.id + "_summary.json"), meta.dump(2) + "\n");
  std::cout << meta.dump(2) << "\n";
  return 0;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, const fs::path& out_dir, bool serial) {
  const auto reports = run_suite(suite, seed, serial ? Execution::serial : Execution::parallel);
  fs::create_directories(out_dir / "reports");
  fs::create_directories(out_dir / "samples");
  std::ostringstream summary, timings;
  summary << "id,criterion,gated,pass,statistic,threshold,comparator\n";
  timings << "id,wall_seconds\n";
  bool all_pass = true;
  for (const auto& r : reports) {
    write_file(out_dir / "reports" / (r.id + ".json"), to_json(r).dump(2) + "\n");
    std::ostringstream samples;
    samples << "value\n";
    for (double v : r.samples) samples << format_double(v) << "\n";
    write_file(out_dir / "samples" / (r.id + ".csv"), samples.str());
    summary << r.id << "," << r.criterion << "," << r.gated << "," << r.pass << ","
            << format_double(r.statistic) << "," << format_double(r.threshold) << ","
            << (r.comparator == Comparator::less ? "<" : ">") << "\n";
    timings << r.id << "," << r.wall_seconds << "\n";
    if (r.gated && !r.pass) all_pass = false;
    std::cout << std::left << std::setw(6) << (r.gated ? (r.pass ? "PASS" : "FAIL") : "INFO")
              << std::setw(52) << r.id << " " << r.statistic
              << (r.comparator == Comparator::less ? " < " : " > ") << r.threshold << "\n";
  }
  write_file(out_dir / "summary.csv", summary.str());
  write_file(out_dir / "timings.csv", timings.str());
  return all_pass ? 0 : 1;
}

std::vector<int> parse_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

int cmd_oracle(const std::string& spec_path, int depth, const std::vector<std::string>& checks,
               const std::string& permutation) {
  const auto process = process_from_json(read_json(spec_path));
  const auto* urn = std::get_if<PolyaUrnSpec>(&process);
  if (!urn) throw UnsupportedError("oracle: only urn specs can be enumerated");
  json out{{"spec", to_json(process)}, {"depth", depth}, {"checks", json::object()}};
  bool all = true;
  for (const auto& name : checks) {
    CheckResult res;
    if (name == "cid") res = check_cid_eq5(*urn, depth);
    else if (name == "exchangeable") res = check_exchangeable(enumerate_polya_joint(*urn, depth));
    else throw ParameterError("oracle: unknown check '" + name + "'");
    out["checks"][name] = {{"holds", res.holds}, {"certificate", to_json(res.certificate)}};
    all = all && res.holds;
  }
  if (!permutation.empty()) {
    const auto tau = parse_list(permutation);
    const auto res = check_permuted_cid(*urn, tau, static_cast<int>(tau.size()));
    out["checks"]["permuted_cid"] = {{"tau", tau}, {"holds", res.holds}, {"certificate", to_json(res.certificate)}};
    all = all && res.holds;
  }
  std::cout << out.dump(2) << "\n";
  return all ? 0 : 1;
}

std::vector<double> read_samples(const fs::path& p) {
  std::vector<double> out;
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(std::stod(line));
  return out;
}

int cmd_report(const fs::path& in_dir, bool svg_out) {
  if (!svg_out) {
    std::cout << "nothing to render; pass --svg\n";
    return 0;
  }
  const fs::path plots = in_dir / "plots";
  fs::create_directories(plots);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(in_dir / "reports"))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    const auto r = report_from_json(read_json(file));
    const auto samples = read_samples(in_dir / "samples" / (r.id + ".csv"));
    std::string doc;
    if (r.plot == "qq_normal" && !samples.empty()) {
      doc = svg::qq_normal(samples, r.id);
    } else if (r.plot == "histogram" && !samples.empty()) {
      doc = svg::histogram(samples, r.id);
    } else if (r.plot == "curve") {
      const auto& d = r.details;
      for (const auto& [xk, yk, logx] : std::vector<std::tuple<const char*, const char*, bool>>{
               {"n_values", "q95", true}, {"m_values", "gaps", true}, {"cells", "mean_oscillation", true},
               {"n_values", "mean", true}}) {
        if (d.contains(xk) && d.contains(yk)) {
          const auto x = d.at(xk).get<std::vector<double>>();
          const auto y = d.at(yk).get<std::vector<double>>();
          doc = svg::curve(x, y, r.id, logx);
          break;
        }
      }
      if (doc.empty() && !samples.empty()) {
        std::vector<double> x(samples.size());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
        doc = svg::curve(x, samples, r.id, false);
      }
    }
    if (doc.empty()) continue;
    write_file(plots / (r.id + ".svg"), doc);
    std::cout << (plots / (r.id + ".svg")).string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cidlab: simulate and verify conditionally identically distributed sequences"};
  app.require_subcommand(1);

  std::string config_path, out_dir, suite = "all", spec_path, in_dir, permutation;
  std::uint64_t seed = 42;
  int depth = 4;
  bool serial = false, svg_flag = false;
  std::vector<std::string> checks{"cid", "exchangeable"};

  auto* simulate = app.add_subcommand("simulate", "generate paths and statistics");
  simulate->add_option("--config", config_path, "JSON config")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", out_dir, "output directory")->required();

  auto* verify = app.add_subcommand("verify", "run acceptance suites");
  verify->add_option("--suite", suite, "suite name or 'all'");
  verify->add_option("--seed", seed, "64-bit seed");
  verify->add_option("--out", out_dir, "output directory")->required();
  verify->add_flag("--serial", serial, "run replicas on one thread");

  auto* oracle = app.add_subcommand("oracle", "exact checks on an urn spec");
  oracle->add_option("--spec", spec_path, "JSON process spec")->required()->check(CLI::ExistingFile);
  oracle->add_option("--depth", depth, "enumeration depth");
  oracle->add_option("--checks", checks, "cid, exchangeable")->delimiter(',');
  oracle->add_option("--permutation", permutation, "comma-separated tau for the permuted check");

  auto* report = app.add_subcommand("report", "render verification output");
  report->add_option("--in", in_dir, "directory written by verify")->required()->check(CLI::ExistingDirectory);
  report->add_flag("--svg", svg_flag, "write SVG plots");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*simulate) return cmd_simulate(config_path, out_dir);
    if (*verify) return cmd_verify(suite, seed, out_dir, serial);
    if (*oracle) return cmd_oracle(spec_path, depth, checks, permutation);
    if (*report) return cmd_report(in_dir, svg_flag);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
