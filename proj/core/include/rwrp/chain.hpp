#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rwrp/environment.hpp"
#include "rwrp/lattice.hpp"
#include "rwrp/potential.hpp"

namespace rwrp {

/// The finite space of chain states (cell, z_1..z_l) over a periodic
/// environment. State index = cell * |R|^l + tuple code.
class ChainStateSpace {
 public:
  ChainStateSpace(PeriodicEnvironment env, StepSet steps, int memory);

  const PeriodicEnvironment& periodic() const noexcept { return env_; }
  const Environment& environment() const noexcept { return view_; }
  const StepSet& steps() const noexcept { return steps_; }
  int memory() const noexcept { return memory_; }
  std::size_t size() const noexcept { return cells_ * tuples_; }
  std::size_t cell_count() const noexcept { return cells_; }
  std::size_t tuple_count() const noexcept { return tuples_; }
  std::size_t step_count() const noexcept { return steps_.size(); }

  std::size_t index(std::size_t cell, std::size_t code) const noexcept { return cell * tuples_ + code; }
  std::size_t cell_of(std::size_t state) const noexcept { return state / tuples_; }
  std::size_t code_of(std::size_t state) const noexcept { return state % tuples_; }
  std::vector<std::size_t> tuple_of(std::size_t state) const;

  /// S_z: the state after appending step z.
  std::size_t move(std::size_t state, std::size_t z) const noexcept { return next_[state * steps_.size() + z]; }
  /// Step index actually taken by the walk on the move S_z from `state`
  /// (the oldest remembered step when l >= 1, z itself when l = 0).
  std::size_t taken_step(std::size_t state, std::size_t z) const noexcept {
    return memory_ == 0 ? z : code_of(state) / lead_;
  }
  const Point& displacement(std::size_t state, std::size_t z) const { return steps_[taken_step(state, z)]; }

  /// g at every state, evaluated at the cell representative.
  std::vector<double> tabulate(const Potential& g) const;
  /// Same space with a different memory length.
  ChainStateSpace with_memory(int memory) const { return ChainStateSpace(env_, steps_, memory); }

  /// False when shifts by the step group do not act transitively on the torus,
  /// so the uniform site measure is not ergodic. Callers surface this as a warning.
  bool ergodic() const noexcept { return ergodic_; }
  std::string describe(std::size_t state) const;

 private:
  PeriodicEnvironment env_;
  Environment view_;
  StepSet steps_;
  int memory_;
  std::size_t cells_;
  std::size_t tuples_;
  std::size_t lead_;  // |R|^(l-1)
  std::vector<std::size_t> next_;
  bool ergodic_;
};

}  // namespace rwrp
