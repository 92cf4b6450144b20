#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "rwrp/point.hpp"
#include "rwrp/rational.hpp"

namespace rwrp {

/// The admissible step set R of the walk: a nonempty ordered list of distinct
/// vectors in Z^d. Step indices (positions in this list) are used throughout
/// the library to denote steps.
class StepSet {
 public:
  StepSet(int dimension, std::vector<Point> steps);

  int dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return steps_.size(); }
  const std::vector<Point>& steps() const noexcept { return steps_; }
  const Point& operator[](std::size_t i) const { return steps_.at(i); }

  /// Largest Euclidean norm over the steps.
  double r_max() const noexcept { return r_max_; }
  std::optional<std::size_t> index_of(const Point& z) const;
  bool has_zero_step() const noexcept;
  Point origin() const { return Point(dimension_); }

  /// True when the additive group generated by R is all of Z^d.
  bool generates_full_lattice() const;

 private:
  int dimension_;
  std::vector<Point> steps_;
  double r_max_ = 0.0;
};

/// 0 in conv(R); equivalently some finite step sequence sums to zero.
bool hull_contains_zero(const StepSet& steps);

/// 0 in the relative interior of conv(R); equivalently every point of the
/// generated group is reachable from 0 by an admissible path.
bool zero_in_relative_interior(const StepSet& steps);

/// Some u has u . z > 0 for every step, i.e. 0 is outside conv(R).
inline bool strictly_directed(const StepSet& steps) { return !hull_contains_zero(steps); }

/// True when xi lies in conv(R).
bool hull_contains(const StepSet& steps, const RationalVector& xi);

/// Nonnegative rational weights alpha (indexed like the steps) summing to one
/// with sum alpha_z z = xi. Throws InfeasiblePointError when xi is outside conv(R).
RationalVector rational_convex_combination(const StepSet& steps, const RationalVector& xi);

inline constexpr int kDefaultReachableCap = 64;

/// D_n = { z_1 + ... + z_n : z_i in R }, D_0 = {0}. Throws BoundExceededError when n > cap.
std::set<Point> reachable_set(const StepSet& steps, int n, int cap = kDefaultReachableCap);

/// Smallest b <= bound with b*xi integral and b*xi in D_b. The default bound is
/// ten times the common denominator of xi.
std::int64_t direction_period(const StepSet& steps, const RationalVector& xi,
                              std::optional<std::int64_t> bound = std::nullopt);

/// Deterministic admissible path with x_{jb} = j*b*xi.
class DirectionPath {
 public:
  DirectionPath(RationalVector xi, std::int64_t period, std::vector<std::size_t> block,
                const StepSet& steps);

  const RationalVector& xi() const noexcept { return xi_; }
  std::int64_t period() const noexcept { return period_; }
  /// Step indices of one period, in traversal order.
  const std::vector<std::size_t>& block() const noexcept { return block_; }
  /// x_k for any k >= 0.
  Point point_at(std::int64_t k) const;
  /// x_0, ..., x_n.
  std::vector<Point> prefix(std::int64_t n) const;

 private:
  RationalVector xi_;
  std::int64_t period_;
  std::vector<std::size_t> block_;
  std::vector<Point> partial_;  // partial sums within one block, size period+1
};

/// Builds the canonical path in direction xi. One period repeats a fixed step
/// multiset: nonzero steps grouped in declared order, with any zero steps
/// spread in blocks after the nonzero ones.
DirectionPath canonical_path(const StepSet& steps, const RationalVector& xi,
                             std::optional<std::int64_t> bound = std::nullopt);

}  // namespace rwrp
