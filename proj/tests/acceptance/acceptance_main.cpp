// Runs every verification suite and prints one PASS/FAIL line per acceptance
// criterion. Exit status is 0 only when all criteria pass.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <map>
#include <string>
#include <vector>

#include <rwrp/suites.hpp>

namespace {

struct Criterion {
  bool passed = true;
  int checks = 0;
  std::vector<std::string> notes;
  double seconds = 0.0;
};

}  // namespace

int main(int argc, char** argv) {
  rwrp::SuiteOptions options;
  bool verbose = false;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "-v" || a == "--verbose") {
      verbose = true;
    } else if (a == "--threads" && i + 1 < argc) {
      options.threads = std::strtoull(argv[++i], nullptr, 10);
    } else {
      std::fprintf(stderr, "usage: %s [--verbose] [--threads N]\n", argv[0]);
      return 2;
    }
  }

  std::map<int, Criterion> criteria;
  for (int c = 1; c <= 9; ++c) criteria[c].passed = false;  // no checks yet
  for (const std::string& name : rwrp::suite_names()) {
    const auto t0 = std::chrono::steady_clock::now();
    rwrp::SuiteReport report;
    try {
      report = rwrp::run_suite(name, options);
    } catch (const std::exception& e) {
      std::printf("suite %s aborted: %s\n", name.c_str(), e.what());
      return 1;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const rwrp::SuiteCheck& check : report.checks) {
      Criterion& c = criteria[check.criterion];
      c.passed = (c.checks == 0 || c.passed) && check.passed;
      ++c.checks;
      c.seconds += secs / static_cast<double>(report.checks.size());
      if (verbose || !check.passed)
        c.notes.push_back(std::string(check.passed ? "ok   " : "FAIL ") + check.name + ": " + check.detail);
    }
    std::printf("suite %-10s %zu checks in %.1f s\n", name.c_str(), report.checks.size(), secs);
  }

  bool all = true;
  for (int id = 1; id <= 9; ++id) {
    const Criterion& c = criteria[id];
    const bool ok = c.checks > 0 && c.passed;
    all = all && ok;
    std::printf("criterion %d: %s (%d checks, ~%.1f s)\n", id, ok ? "PASS" : "FAIL", c.checks, c.seconds);
    for (const std::string& n : c.notes) std::printf("    %s\n", n.c_str());
  }
  std::fflush(stdout);
  return all ? 0 : 1;
}
