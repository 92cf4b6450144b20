#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rwrp/environment.hpp"
#include "rwrp/lattice.hpp"
#include "rwrp/potential.hpp"
#include "rwrp/transfer.hpp"

namespace rwrp {

inline constexpr std::size_t kSampleChunk = 1024;

struct SamplerOptions {
  std::size_t threads = 1;
  /// Uniform reference steps appended after the n + l weighted ones, so that
  /// empirical measures with a longer memory can be formed.
  int tail_steps = 0;
  std::size_t state_budget = kDefaultStateBudget;
};

/// Exact samples from the quenched polymer measure Q_{n,0}. Each path stores
/// n + l + tail step indices; X_n is the sum of the first n.
struct PolymerSampleBatch {
  std::uint64_t seed = 0;
  int n = 0;
  int memory = 0;
  int tail_steps = 0;
  StepSet steps;
  Environment env;
  double log_Z = 0.0;  ///< log E_0[e^{-sum V}]
  std::size_t count = 0;
  std::vector<std::uint8_t> flat;

  std::size_t path_length() const noexcept { return static_cast<std::size_t>(n + memory + tail_steps); }
  std::span<const std::uint8_t> path(std::size_t i) const {
    return {flat.data() + i * path_length(), path_length()};
  }
  /// X_k of path i.
  Point position(std::size_t i, int k) const;
};

/// Backward partition weights, then forward sampling step by step. Samples are
/// drawn in chunks of kSampleChunk with an RNG seeded by derive_seed(seed, chunk),
/// so the batch does not depend on the thread count.
PolymerSampleBatch sample_paths(const Environment& env, const StepSet& steps, const Potential& V, int n,
                                std::size_t count, std::uint64_t seed, const SamplerOptions& options = {});

/// Q_{n,0}(X_n = x) for every reachable x, by the constrained dynamic program.
std::vector<std::pair<Point, double>> endpoint_distribution(const Environment& env, const StepSet& steps,
                                                            const Potential& V, int n,
                                                            const TransferOptions& options = {});

/// Mass over (pattern, z_1..z_l): the pattern is the periodic cell at X_k, or the
/// symbol at X_k for an i.i.d. environment. Index = pattern * |R|^l + tuple code.
struct EmpiricalMeasure {
  std::size_t pattern_count = 0;
  std::size_t step_count = 0;
  int memory = 0;
  std::vector<double> mass;
};

/// R_n^{1,l} of one path.
EmpiricalMeasure empirical_measure(const PolymerSampleBatch& batch, std::size_t path, int memory);
/// Batch average of R_n^{1,l}.
EmpiricalMeasure empirical_measure(const PolymerSampleBatch& batch, int memory);

struct McOptions {
  std::size_t threads = 1;
  /// Permit step sets that are not strictly directed (only for n <= 1000).
  bool allow_undirected = false;
  std::size_t state_budget = kDefaultStateBudget;
};

struct McResult {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::vector<double> values;          ///< n^-1 log Z_n per replica
  std::vector<std::uint64_t> seeds;    ///< environment seed per replica
};

/// Exact n^-1 log Z_n^{-V} for independent environment replicas; replica r
/// uses environment seed derive_seed(seed, r).
McResult mc_free_energy(const IidEnvironment& env, const StepSet& steps, const Potential& V, int n,
                        std::size_t replicas, std::uint64_t seed, const McOptions& options = {});

/// log E[e^{-V(omega_0)}]: the annealed free energy of a strictly directed walk
/// with a site potential (memory 0).
double annealed_free_energy(const IidEnvironment& env, const StepSet& steps, const Potential& V);

}  // namespace rwrp
