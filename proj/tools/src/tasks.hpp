#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "output.hpp"

namespace rwrp::cli {

inline constexpr std::uint64_t kDefaultSeed = 20240611ULL;

/// What the command line asked for. Empty optionals fall back to the config.
struct Invocation {
  std::string command;  ///< a task name, "run" or "suite"
  std::optional<std::string> config_path;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> threads;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> suite;
};

/// Settings shared by every task after overrides are applied.
struct Common {
  std::uint64_t seed = kDefaultSeed;
  std::size_t threads = 1;
  std::vector<std::uint64_t> seeds;  ///< every seed that influences the artifacts
};

/// Parsed task, ready to run. Returns the process exit code.
using Plan = std::function<int(const Artifacts&)>;

/// Parses the task section of `root` (filling defaults in place) and returns
/// the computation to run. Throws ValidationError on bad input.
Plan plan_task(const std::string& task, Reader& root, Reader& task_block, Reader& numeric, Common& common);

const std::vector<std::string>& task_names();

/// Full run: config, overrides, artifacts, run.json and the error line.
int execute(const Invocation& inv);

}  // namespace rwrp::cli
