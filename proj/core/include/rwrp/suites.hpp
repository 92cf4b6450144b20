#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rwrp {

/// One pass/fail property check. `criterion` links the check to an acceptance
/// criterion number (0 when it has none).
struct SuiteCheck {
  int criterion = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<SuiteCheck> checks;
  bool passed() const;
};

struct SuiteOptions {
  std::uint64_t seed = 0x5eed2024ULL;
  std::size_t threads = 1;
};

std::vector<std::string> suite_names();

/// Throws ValidationError for an unknown name.
SuiteReport run_suite(const std::string& name, const SuiteOptions& options = {});

SuiteReport lattice_suite(const SuiteOptions& options = {});
SuiteReport duality_suite(const SuiteOptions& options = {});
SuiteReport appendix_c_suite(const SuiteOptions& options = {});
SuiteReport rates_suite(const SuiteOptions& options = {});
SuiteReport sampling_suite(const SuiteOptions& options = {});

}  // namespace rwrp
