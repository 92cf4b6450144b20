#pragma once

#include <cstddef>
#include <vector>

#include "rwrp/chain.hpp"
#include "rwrp/variational.hpp"

namespace rwrp {

/// A point of the Z^d lift: lattice position and remembered step tuple.
struct LiftedState {
  Point x;
  std::size_t code = 0;
  bool operator==(const LiftedState&) const = default;
};

/// Path integrals L and f of a closed-loop corrector over a periodic
/// environment. Requires R to generate Z^d.
class PathIntegral {
 public:
  /// Throws ValidationError when R does not generate Z^d and NoClosedLoopError
  /// when F fails the closed-loop check.
  PathIntegral(const ChainStateSpace& space, CorrectorTable F, double tolerance = kClassKTolerance);

  const ChainStateSpace& space() const noexcept { return space_; }
  const CorrectorTable& table() const noexcept { return F_; }

  /// Moves taking (y, tuple~) to (x, tuple); throws NoPathError when none is found.
  std::vector<std::size_t> path(const LiftedState& from, const LiftedState& to) const;

  /// Sum of F along `moves` from `from`, in the environment shifted by u.
  double sum_along(const Point& u, const LiftedState& from, const std::vector<std::size_t>& moves) const;
  /// Lifted state reached from `from` by `moves`.
  LiftedState endpoint(const LiftedState& from, const std::vector<std::size_t>& moves) const;

  /// L(T_u omega, from, to).
  double L(const Point& u, const LiftedState& from, const LiftedState& to) const;

  /// A state (y, tilde) with a path to both a and b.
  LiftedState common_ancestor(const LiftedState& a, const LiftedState& b, std::size_t tilde_code) const;

  /// f(T_u omega, z, zbar, x) = L(anc, (x, zbar)) - L(anc, (0, z)).
  double f(const Point& u, std::size_t z_code, std::size_t zbar_code, const Point& x) const;

 private:
  std::vector<std::size_t> steps_summing_to(const Point& w) const;
  Point tuple_sum(std::size_t code) const;

  ChainStateSpace space_;
  CorrectorTable F_;
};

/// c(z) = E[f(omega, z^, z^, z)] with z^ = (z, ..., z), one entry per step.
std::vector<double> mean_zero_constants(const PathIntegral& pi);

/// F'(s, z) = F(s, z) - c(step taken on that move).
CorrectorTable mean_zero_correction(const ChainStateSpace& space, const CorrectorTable& F);

}  // namespace rwrp
