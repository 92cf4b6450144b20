#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rwrp/environment.hpp"
#include "rwrp/lattice.hpp"

namespace rwrp {

/// Sufficient conditions for class-L membership that a user may assert. They
/// cannot be verified from finite data; `class_L_diagnostic` only reports a trend.
enum class ClassLCondition { kNone, kBounded, kD1L1, kIidMoment, kMixingMoment };

std::string to_string(ClassLCondition c);
ClassLCondition parse_class_L_condition(const std::string& name);

/// Step tuples are passed as step indices, most recent step last.
using StepTuple = std::span<const std::size_t>;
using PotentialFn = std::function<double(const Environment&, const Point&, StepTuple)>;

/// A function g(T_x omega, z_1..z_l) on environment x step tuples, l = memory().
class Potential {
 public:
  Potential(int memory, PotentialFn fn, std::string name = "custom",
            ClassLCondition declared = ClassLCondition::kNone);

  int memory() const noexcept { return memory_; }
  const std::string& name() const noexcept { return name_; }
  ClassLCondition declared_condition() const noexcept { return declared_; }

  /// Evaluates at base point x. Throws ValidationError on a wrong tuple length
  /// or a non-finite value.
  double operator()(const Environment& env, const Point& x, StepTuple tuple) const;

  /// Same function viewed with a longer memory; extra trailing steps are ignored.
  Potential with_memory(int memory) const;
  Potential with_declared(ClassLCondition c) const;
  /// -g, with the same memory.
  Potential negated() const;

 private:
  int memory_;
  PotentialFn fn_;
  std::string name_;
  ClassLCondition declared_;
};

Potential constant_potential(double c, int memory = 0);

/// V(omega) = -beta * omega_0: the directed-polymer potential.
Potential polymer_potential(double beta);

/// Site-dependent step distribution: pi_{x, .} indexed like the step set.
using KernelFn = std::function<std::vector<double>(const Environment&, const Point&)>;

/// Kernel read from the environment symbol at x: row s is used where omega_x = s.
KernelFn symbol_kernel(std::vector<std::vector<double>> rows);

/// Checks that every row is a strictly positive probability vector of the given width.
void validate_kernel_rows(const std::vector<std::vector<double>>& rows, std::size_t width);

/// V(omega, z_1) = -log pi_{0, z_1}(omega), memory 1. Evaluation throws
/// ZeroProbabilityStepError where pi vanishes (V would be infinite).
Potential rwre_potential(KernelFn kernel);

/// g(omega, z_{1..l}) read from a table indexed by [symbol at x][tuple code].
Potential symbol_table_potential(int memory, std::size_t step_count,
                                 std::vector<std::vector<double>> table);

/// Periodic-only: g read from a table indexed by [cell of x][tuple code].
Potential cell_table_potential(int memory, std::size_t step_count,
                               std::vector<std::vector<double>> table);

/// Mixed-radix code of a step tuple, first step most significant.
std::size_t tuple_code(StepTuple tuple, std::size_t step_count);
std::vector<std::size_t> tuple_from_code(std::size_t code, int memory, std::size_t step_count);
std::size_t tuple_count(int memory, std::size_t step_count);

struct ClassLRow {
  double epsilon = 0.0;
  int n = 0;
  double value = 0.0;         ///< max over x of n^-1 sum_{i <= eps n} max_tuple |g(T_{x+iz} omega)|
  std::size_t points = 0;     ///< base points examined
  bool sampled = false;       ///< true when the base points were sampled, not enumerated
};

struct ClassLOptions {
  std::size_t enumeration_limit = 100'000;
  std::size_t sample_count = 10'000;
  std::uint64_t seed = 0x5eed;
};

/// Finite-window class-L trend: for each (epsilon, n) the maximum over
/// x in D_0 u ... u D_n of n^-1 sum_{0 <= i <= eps n} max_tuple |g(T_{x+iz} omega, .)|.
std::vector<ClassLRow> class_L_diagnostic(const Potential& g, const Environment& env,
                                          const StepSet& steps, std::size_t step_index,
                                          const std::vector<double>& eps_list,
                                          const std::vector<int>& n_list,
                                          const ClassLOptions& options = {});

}  // namespace rwrp
