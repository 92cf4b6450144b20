#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "tasks.hpp"

int main(int argc, char** argv) {
  CLI::App app{"rwrp: quenched free energies, variational formulas and rate functions for random walks in random potentials"};
  app.set_version_flag("--version", std::string(RWRP_VERSION));
  app.require_subcommand(1);

  rwrp::cli::Invocation inv;
  std::string config, out, suite;
  std::size_t threads = 0;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", config, "JSON experiment config (schema in docs/config.md)");
    if (config_required) c->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (default $RWRP_OUT_DIR, then ./rwrp-out)");
    sub->add_option("--threads", threads, "worker threads; results do not depend on it")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "master seed, overrides numeric.seed");
  };

  std::vector<std::pair<std::string, std::string>> commands = {
      {"free-energy", "finite-n free energies, Perron value and optional xi/tilt grids"},
      {"verify-duality", "Perron root, corrector minimum and entropy dual on one periodic model"},
      {"sample", "exact polymer path samples, endpoint histogram and empirical measures"},
      {"mc-free-energy", "quenched free energy over independent i.i.d. environment replicas"},
      {"rate", "level-1 Legendre rate and level-2 rate functions"},
      {"lattice", "hull, loop, reachability and canonical-path queries for a step set"},
      {"class-k", "class-K check of a corrector with loop and mean-zero witnesses"},
      {"run", "run the task named in the config's task.name"},
  };
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), true);
  auto* suite_cmd = app.add_subcommand("suite", "run a verification suite (lattice, duality, appendix-c, rates, sampling)");
  add_common(suite_cmd, false);
  suite_cmd->add_option("--suite,name", suite, "suite name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  inv.command = app.get_subcommands().front()->get_name();
  if (!config.empty()) inv.config_path = config;
  if (!out.empty()) inv.out_dir = out;
  if (threads) inv.threads = threads;
  for (auto* sub : app.get_subcommands()) {
    if (sub->count("--seed")) inv.seed = seed;
  }
  if (!suite.empty()) inv.suite = suite;
  return rwrp::cli::execute(inv);
}
