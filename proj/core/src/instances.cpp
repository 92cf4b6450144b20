#include "rwrp/instances.hpp"

#include <algorithm>
#include <set>

#include "rwrp/perron.hpp"
#include "rwrp/transfer.hpp"

namespace rwrp {

std::vector<double> random_probability_vector(std::mt19937_64& rng, std::size_t width, double floor) {
  std::uniform_real_distribution<double> u(floor, 1.0);
  std::vector<double> p(width);
  double total = 0.0;
  for (double& x : p) total += (x = u(rng));
  for (double& x : p) x /= total;
  // Push the rounding residue into the largest entry so the row sums to 1 within 1e-15.
  double sum = 0.0;
  for (double x : p) sum += x;
  *std::max_element(p.begin(), p.end()) += 1.0 - sum;
  return p;
}

PeriodicInstance random_periodic_instance(std::mt19937_64& rng, const InstanceLimits& limits) {
  std::uniform_int_distribution<int> dim_d(1, limits.max_dimension);
  std::uniform_int_distribution<int> period_d(1, limits.max_period);
  std::uniform_int_distribution<std::size_t> count_d(2, limits.max_steps);
  std::uniform_int_distribution<int> memory_d(0, limits.max_memory);
  std::uniform_int_distribution<int> entry_d(-limits.max_step_entry, limits.max_step_entry);
  std::uniform_real_distribution<double> g_d(-limits.g_range, limits.g_range);

  for (;;) {
    const int d = dim_d(rng);
    std::vector<std::int64_t> period(static_cast<std::size_t>(d));
    for (auto& L : period) L = period_d(rng);
    std::size_t distinct = 1;
    for (int i = 0; i < d; ++i) distinct *= static_cast<std::size_t>(2 * limits.max_step_entry + 1);
    const std::size_t k = std::min(count_d(rng), distinct);
    std::set<Point> chosen;
    while (chosen.size() < k) {
      Point z(d);
      for (int i = 0; i < d; ++i) z[i] = entry_d(rng);
      chosen.insert(z);
    }
    std::vector<Point> steps(chosen.begin(), chosen.end());
    std::shuffle(steps.begin(), steps.end(), rng);
    const int memory = memory_d(rng);

    std::size_t sites = 1;
    for (auto L : period) sites *= static_cast<std::size_t>(L);
    std::vector<int> cells(sites);
    for (std::size_t c = 0; c < sites; ++c) cells[c] = static_cast<int>(c);
    ChainStateSpace space(PeriodicEnvironment(period, cells), StepSet(d, steps), memory);
    std::vector<double> g(space.size());
    for (double& x : g) x = g_d(rng);
    if (strongly_connected_components(transfer_matrix(space, g)).size() != 1) continue;

    std::string label = "d=" + std::to_string(d) + " L=(";
    for (std::size_t i = 0; i < period.size(); ++i) label += (i ? "," : "") + std::to_string(period[i]);
    label += ") R={";
    for (std::size_t i = 0; i < steps.size(); ++i) label += (i ? "," : "") + steps[i].to_string();
    label += "} l=" + std::to_string(memory);
    return {std::move(space), std::move(g), std::move(label)};
  }
}

}  // namespace rwrp
