#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rwrp/chain.hpp"

namespace rwrp {

/// A periodic test instance: chain space plus a g table over its states.
struct PeriodicInstance {
  ChainStateSpace space;
  std::vector<double> g;
  std::string label;
};

struct InstanceLimits {
  int max_dimension = 2;
  int max_period = 4;
  std::size_t max_steps = 4;
  int max_memory = 2;
  int max_step_entry = 1;
  double g_range = 2.0;
};

/// Draws a random instance whose transfer operator is irreducible. Step sets
/// are redrawn until the state graph is strongly connected.
PeriodicInstance random_periodic_instance(std::mt19937_64& rng, const InstanceLimits& limits = {});

/// Random strictly positive probability vector of the given width.
std::vector<double> random_probability_vector(std::mt19937_64& rng, std::size_t width,
                                              double floor = 0.05);

}  // namespace rwrp
