// Runs the full verification twice through the CLI and prints one line per criterion.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_verify(const fs::path& out) {
  const std::string cmd = std::string("\"") + CIDLAB_CLI_PATH + "\" verify --suite all --seed 42 --out \"" +
                          out.string() + "\" > \"" + (out / "log.txt").string() + "\" 2>&1";
  fs::create_directories(out);
  return std::system(cmd.c_str());
}

std::map<std::string, std::string> report_files(const fs::path& dir) {
  std::map<std::string, std::string> files;
  if (!fs::exists(dir / "reports")) return files;
  for (const auto& e : fs::directory_iterator(dir / "reports"))
    files[e.path().filename().string()] = slurp(e.path());
  return files;
}

}  // namespace

int main() {
  const fs::path root = fs::temp_directory_path() / ("cidlab_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  const fs::path first = root / "a", second = root / "b";

  const int rc1 = run_verify(first);
  const int rc2 = run_verify(second);
  std::cout << "verify exit codes: " << rc1 << " " << rc2 << "\n";

  const auto a = report_files(first);
  const auto b = report_files(second);

  std::map<int, std::vector<json>> by_criterion;
  for (const auto& [name, text] : a) {
    const json r = json::parse(text);
    if (r.value("gated", true)) by_criterion[r.value("criterion", 0)].push_back(r);
  }

  bool all = true;
  for (int c = 1; c <= 11; ++c) {
    const auto& reports = by_criterion[c];
    bool ok = !reports.empty();
    std::string failed;
    for (const auto& r : reports)
      if (!r.value("pass", false)) {
        ok = false;
        failed += " " + r.value("id", std::string("?"));
      }
    all = all && ok;
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << c << " (" << reports.size() << " reports)";
    if (!failed.empty()) std::cout << " failing:" << failed;
    std::cout << "\n";
  }

  const bool identical = !a.empty() && a == b;
  all = all && identical;
  std::cout << (identical ? "PASS" : "FAIL") << " criterion 12 (" << a.size() << " report files, "
            << (identical ? "byte-identical" : "differ") << ")\n";

  if (all) fs::remove_all(root);
  else std::cout << "outputs kept in " << root << "\n";
  return all ? 0 : 1;
}
