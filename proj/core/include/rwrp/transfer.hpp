#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rwrp/chain.hpp"
#include "rwrp/environment.hpp"
#include "rwrp/lattice.hpp"
#include "rwrp/perron.hpp"
#include "rwrp/potential.hpp"

namespace rwrp {

/// A log-domain value that may be the log of an empty sum. The empty case is
/// a tag, never -inf, so it cannot leak into arithmetic unnoticed.
class LogValue {
 public:
  static LogValue empty() { return LogValue(); }
  explicit LogValue(double v);
  bool is_empty() const noexcept { return empty_; }
  /// Throws NoPathError when empty.
  double value() const;
  bool operator==(const LogValue&) const = default;

 private:
  LogValue() = default;
  double v_ = 0.0;
  bool empty_ = true;
};

double log_add(double a, double b) noexcept;
double log_sum_exp(const std::vector<double>& xs);

inline constexpr std::size_t kDefaultStateBudget = 10'000'000;

/// Walk state used by the lattice dynamic program: position X_k and the
/// remembered steps Z_{k+1..k+l} as a tuple code.
struct DPState {
  Point pos;
  std::size_t code = 0;
  bool operator==(const DPState&) const = default;
};

struct DPStateHash {
  std::size_t operator()(const DPState& s) const noexcept;
};

using DPLayer = std::unordered_map<DPState, double, DPStateHash>;

/// Forward dynamic program over chains s_0, ..., s_n with weight
/// prod_{k<n} e^{g(s_k)} / |R| and s_0 uniform over tuples at the origin.
/// Layers are materialized breadth-first; the total number of states across
/// all layers is bounded by the budget.
class PathDP {
 public:
  PathDP(Environment env, StepSet steps, Potential g, std::size_t state_budget = kDefaultStateBudget);

  const StepSet& steps() const noexcept { return steps_; }
  int memory() const noexcept { return g_.memory(); }
  std::size_t tuple_count() const noexcept { return tuples_; }

  DPLayer initial();
  /// Next layer; `tilt` (if nonempty) adds t . X-increment to each move.
  DPLayer advance(const DPLayer& layer, const std::vector<double>& tilt = {});

  double g_at(const DPState& s) const;
  /// Log of the one-step weight e^{g(s)} / |R| shared by every move from s.
  double log_step_weight(const DPState& s) const { return g_at(s) - log_k_; }
  DPState move(const DPState& s, std::size_t z) const;
  std::size_t taken_step(const DPState& s, std::size_t z) const noexcept {
    return memory() == 0 ? z : s.code / lead_;
  }
  std::size_t states_used() const noexcept { return used_; }

 private:
  void charge(std::size_t n);

  Environment env_;
  StepSet steps_;
  Potential g_;
  std::size_t budget_;
  std::size_t used_ = 0;
  std::size_t tuples_;
  std::size_t lead_;
  double log_k_;
};

/// Sum of the layer's weights, optionally restricted to X = endpoint.
LogValue layer_total(const DPLayer& layer, const std::optional<Point>& endpoint = std::nullopt);

struct TransferOptions {
  PerronOptions perron;
  std::size_t state_budget = kDefaultStateBudget;
};

/// Transfer operator M(s, S_z s) = e^{g(s) + t . x_z} / |R| where x_z is the
/// increment of X on that move.
SparseMatrix transfer_matrix(const ChainStateSpace& space, const std::vector<double>& g,
                             const std::vector<double>& tilt = {});

struct FreeEnergyResult {
  double value = 0.0;
  double iteration_contraction = 1.0;
  int iterations = 0;
  std::vector<double> right;
  std::vector<double> left;
  std::vector<std::string> warnings;
};

/// Log Perron root of the (tilted) transfer operator: Lambda_l(g), or the
/// tilted pressure when `tilt` is given.
FreeEnergyResult free_energy_periodic(const ChainStateSpace& space, const std::vector<double>& g,
                                      const std::vector<double>& tilt = {},
                                      const PerronOptions& options = {});
FreeEnergyResult free_energy_periodic(const ChainStateSpace& space, const Potential& g,
                                      const std::vector<double>& tilt = {},
                                      const PerronOptions& options = {});

/// log E_0[exp sum_{k<n} g(T_{X_k} omega, Z_{k+1..k+l})], optionally with X_n = endpoint.
/// An empty constrained sum is returned as LogValue::empty().
LogValue log_partition(const Environment& env, const StepSet& steps, const Potential& g, int n,
                       const std::optional<Point>& endpoint = std::nullopt,
                       const TransferOptions& options = {});

/// n^-1 log Z_n for n = 1..n_max (entry n-1 holds n).
std::vector<double> free_energy_sequence(const Environment& env, const StepSet& steps,
                                         const Potential& g, int n_max,
                                         const TransferOptions& options = {});

/// Same as free_energy_sequence for a chain space with a precomputed g table.
std::vector<double> free_energy_sequence(const ChainStateSpace& space, const std::vector<double>& g,
                                         std::size_t start_cell, int n_max);

/// n^-1 log E_0[e^{sum g} 1{X_n = x_n(xi)}] along the canonical path for n = 1..n_max.
std::vector<LogValue> constrained_free_energy(const Environment& env, const StepSet& steps,
                                              const Potential& g, const RationalVector& xi,
                                              int n_max, const TransferOptions& options = {});

/// Lower sandwich bound: uniform average over cells of min over tuples of g.
double mean_min_lower_bound(const ChainStateSpace& space, const std::vector<double>& g);
/// Upper sandwich bound: maximum cycle mean of g on the state graph (max-plus
/// limit of the heaviest n-step path), computed with Karp's algorithm.
double max_cycle_mean_upper_bound(const ChainStateSpace& space, const std::vector<double>& g);

}  // namespace rwrp
