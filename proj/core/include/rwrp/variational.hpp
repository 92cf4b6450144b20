#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rwrp/chain.hpp"
#include "rwrp/perron.hpp"

namespace rwrp {

/// Probability vector over chain states.
using PairMeasure = std::vector<double>;
/// Row-major |states| x |R| table; row s is a distribution over the moves S_z s.
using StepKernel = std::vector<double>;
/// Row-major |states| x |R| table F(state, z).
using CorrectorTable = std::vector<double>;

void validate_pair_measure(const ChainStateSpace& space, const PairMeasure& mu);
void validate_step_kernel(const ChainStateSpace& space, const StepKernel& q);

/// The reference kernel: uniform over R from every state.
StepKernel uniform_kernel(const ChainStateSpace& space);
/// Stationary distribution of the chain moving by q (dense solve).
PairMeasure stationary_measure(const ChainStateSpace& space, const StepKernel& q);

/// H(mu x q | mu x p_l) = sum_s mu(s) sum_z q(s,z) log(q(s,z) |R|), with 0 log 0 = 0.
double relative_entropy(const PairMeasure& mu, const StepKernel& q, std::size_t step_count);

struct EntropyOptions {
  double tolerance = 1e-12;  ///< L1 marginal residual
  int max_iterations = 1'000'000;
};

struct EntropyResult {
  bool infinite = false;  ///< no kernel on the support of mu leaves mu invariant
  double value = 0.0;
  StepKernel q;
  int iterations = 0;
  double residual = 0.0;
};

/// H_l(mu) = inf { H(mu x q | mu x p_l) : mu q = mu }. The minimizer is the
/// I-projection of mu x p_l onto couplings with both marginals mu, found by
/// alternating marginal scaling on the edge set.
EntropyResult entropy_H(const ChainStateSpace& space, const PairMeasure& mu,
                        const EntropyOptions& options = {});

struct DualOptions {
  double tolerance = 1e-11;  ///< certified optimality gap
  int max_iterations = 500;
};

struct DualResult {
  double value = 0.0;   ///< E^mu[g] - H(mu x q | mu x p_l) at the returned pair
  PairMeasure mu;
  StepKernel q;
  double gap = 0.0;     ///< upper bound minus value
  int iterations = 0;
};

/// H#_l(g) = sup_mu { E^mu[g] - H_l(mu) } as an entropy-regularized
/// average-reward problem, solved by soft policy iteration.
DualResult dual_Hsharp(const ChainStateSpace& space, const std::vector<double>& g,
                       const DualOptions& options = {});

/// F(s, z) = h(S_z s) - h(s).
CorrectorTable gradient_corrector(const ChainStateSpace& space, const std::vector<double>& h);

struct KValue {
  double value = 0.0;
  std::size_t argmax_state = 0;  ///< smallest state index attaining the max
};

/// K_{l,F}(g) = max_s log sum_z |R|^-1 e^{g(s) + F(s,z)}.
KValue K_functional(const ChainStateSpace& space, const std::vector<double>& g, const CorrectorTable& F);

enum class KbarInit { kPerron, kZero };

struct KbarOptions {
  KbarInit init = KbarInit::kPerron;
  double tolerance = 1e-12;  ///< gap between K(h) and its Collatz-Wielandt lower bound
  int max_iterations = 100'000;
};

struct KbarResult {
  double value = 0.0;
  double lower_bound = 0.0;
  std::vector<double> h;         ///< optimal corrector potential, h(first state) = 0
  std::size_t argmax_state = 0;
  int iterations = 0;
};

/// inf over gradient correctors F = grad h of K_{l,F}(g).
KbarResult Kbar_minimize(const ChainStateSpace& space, const std::vector<double>& g,
                         const KbarOptions& options = {});

struct LoopWitness {
  std::size_t start_state = 0;
  std::vector<std::size_t> path_a;  ///< step indices
  std::vector<std::size_t> path_b;  ///< empty for a loop
  double sum_a = 0.0;
  double sum_b = 0.0;
};

struct MeanZeroWitness {
  std::size_t tuple_code = 0;
  std::size_t step = 0;
  double mean = 0.0;
};

struct ClassKReport {
  bool integrable = true;
  bool mean_zero = false;
  bool closed_loop = false;
  /// F = grad phi + a . (increment) on the Z^d lift; `drift` is a.
  std::vector<double> drift;
  double fit_residual = 0.0;
  std::optional<LoopWitness> loop_witness;
  std::optional<MeanZeroWitness> mean_zero_witness;
  bool passed() const noexcept { return integrable && mean_zero && closed_loop; }
};

inline constexpr double kClassKTolerance = 1e-10;

/// Class-K conditions for a corrector table on a periodic environment. Paths
/// are compared on the Z^d lift: two move sequences from the same state that
/// end at the same lattice point and step tuple must carry the same F-sum.
ClassKReport check_class_K(const ChainStateSpace& space, const CorrectorTable& F,
                           double tolerance = kClassKTolerance);

}  // namespace rwrp
