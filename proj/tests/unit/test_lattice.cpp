#include <gtest/gtest.h>

#include <functional>
#include <set>

#include "rwrp/errors.hpp"
#include "rwrp/lattice.hpp"

namespace rwrp {
namespace {

StepSet make(int d, std::vector<Point> steps) { return StepSet(d, std::move(steps)); }

RationalVector rv(std::initializer_list<const char*> xs) {
  RationalVector v;
  for (const char* x : xs) v.push_back(parse_rational(x));
  return v;
}

// Exhaustive oracle: does some sequence of 1..m steps sum to zero?
bool brute_zero_sum(const StepSet& s, int m) {
  std::set<Point> layer{s.origin()};
  for (int k = 1; k <= m; ++k) {
    std::set<Point> next;
    for (const Point& p : layer) {
      for (const Point& z : s.steps()) next.insert(p + z);
    }
    if (next.count(s.origin())) return true;
    layer = std::move(next);
  }
  return false;
}

TEST(StepSet, RejectsEmptyAndDuplicateSteps) {
  EXPECT_THROW(make(1, {}), ValidationError);
  EXPECT_THROW(make(1, {Point{1}, Point{1}}), ValidationError);
  EXPECT_THROW(make(2, {Point{1}}), ValidationError);
}

TEST(StepSet, RMaxIsLargestNorm) {
  const StepSet s = make(2, {Point{1, 0}, Point{2, -1}});
  EXPECT_DOUBLE_EQ(s.r_max(), std::sqrt(5.0));
}

TEST(StepSet, GeneratesFullLattice) {
  EXPECT_TRUE(make(2, {Point{1, 0}, Point{1, 1}}).generates_full_lattice());
  EXPECT_FALSE(make(2, {Point{1, 1}, Point{1, -1}}).generates_full_lattice());
  EXPECT_FALSE(make(1, {Point{2}, Point{-2}}).generates_full_lattice());
  EXPECT_TRUE(make(1, {Point{2}, Point{3}}).generates_full_lattice());
}

TEST(HullContainsZero, Examples) {
  EXPECT_TRUE(hull_contains_zero(make(1, {Point{1}, Point{-1}})));
  EXPECT_FALSE(hull_contains_zero(make(2, {Point{1, 1}, Point{1, -1}})));
  EXPECT_TRUE(hull_contains_zero(make(2, {Point{1, 0}, Point{0, 1}, Point{-1, -1}})));
}

TEST(HullContainsZero, MatchesZeroSumSearch) {
  const std::vector<std::vector<Point>> sets = {
      {Point{1, 0}, Point{-2, 1}, Point{1, -1}}, {Point{2, 1}, Point{-1, 0}},
      {Point{1, 2}, Point{-1, -1}, Point{0, -1}}, {Point{0, 0}, Point{1, 1}},
      {Point{1, -2}, Point{-2, 2}, Point{2, 1}}};
  for (const auto& steps : sets) {
    const StepSet s = make(2, steps);
    const int m = static_cast<int>(2 * s.size() * std::ceil(s.r_max()) * 2);
    EXPECT_EQ(hull_contains_zero(s), brute_zero_sum(s, m));
  }
}

TEST(RelativeInterior, Examples) {
  EXPECT_TRUE(zero_in_relative_interior(make(2, {Point{1, 0}, Point{-1, 0}, Point{0, 1}, Point{0, -1}})));
  EXPECT_FALSE(zero_in_relative_interior(make(1, {Point{0}, Point{1}})));
  EXPECT_TRUE(zero_in_relative_interior(make(1, {Point{1}, Point{-1}, Point{0}})));
}

TEST(RelativeInterior, EveryNearbyPointReachable) {
  const StepSet s = make(1, {Point{1}, Point{-1}, Point{0}});
  std::set<Point> seen;
  for (int n = 0; n <= 12; ++n) {
    for (const Point& p : reachable_set(s, n)) seen.insert(p);
  }
  for (int x = -3; x <= 3; ++x) EXPECT_TRUE(seen.count(Point{x})) << x;
}

TEST(RelativeInterior, ImpliesNegatedStepsReachable) {
  const StepSet s = make(2, {Point{1, 0}, Point{0, 1}, Point{-1, -1}});
  ASSERT_TRUE(zero_in_relative_interior(s));
  std::set<Point> seen;
  for (int n = 1; n <= 6; ++n) {
    for (const Point& p : reachable_set(s, n)) seen.insert(p);
  }
  for (const Point& z : s.steps()) EXPECT_TRUE(seen.count(-z));
}

void expect_valid_combination(const StepSet& s, const RationalVector& xi, const RationalVector& a) {
  ASSERT_EQ(a.size(), s.size());
  Rational total = 0;
  RationalVector sum(xi.size(), Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_GE(a[i], 0);
    total += a[i];
    for (std::size_t j = 0; j < xi.size(); ++j) sum[j] += a[i] * s[i][static_cast<int>(j)];
  }
  EXPECT_EQ(total, 1);
  EXPECT_EQ(sum, xi);
}

TEST(RationalConvexCombination, Examples) {
  const StepSet diag = make(2, {Point{1, 1}, Point{1, -1}});
  const auto a = rational_convex_combination(diag, rv({"1", "0"}));
  EXPECT_EQ(a, (RationalVector{Rational(1, 2), Rational(1, 2)}));

  const StepSet lazy = make(1, {Point{0}, Point{1}});
  const auto b = rational_convex_combination(lazy, rv({"1/3"}));
  EXPECT_EQ(b, (RationalVector{Rational(2, 3), Rational(1, 3)}));

  const StepSet cross = make(2, {Point{1, 0}, Point{-1, 0}, Point{0, 1}, Point{0, -1}});
  expect_valid_combination(cross, rv({"1/2", "0"}), rational_convex_combination(cross, rv({"1/2", "0"})));
}

TEST(RationalConvexCombination, OutsideHullThrows) {
  const StepSet s = make(2, {Point{1, 1}, Point{1, -1}});
  EXPECT_THROW(rational_convex_combination(s, rv({"0", "0"})), InfeasiblePointError);
}

TEST(ReachableSet, Examples) {
  EXPECT_EQ(reachable_set(make(1, {Point{1}}), 4), (std::set<Point>{Point{4}}));
  EXPECT_EQ(reachable_set(make(1, {Point{1}, Point{-1}}), 2),
            (std::set<Point>{Point{-2}, Point{0}, Point{2}}));
  EXPECT_EQ(reachable_set(make(2, {Point{1, 1}, Point{1, -1}}), 2),
            (std::set<Point>{Point{2, 2}, Point{2, 0}, Point{2, -2}}));
  EXPECT_EQ(reachable_set(make(1, {Point{1}}), 0), (std::set<Point>{Point{0}}));
}

TEST(ReachableSet, CapExceeded) {
  EXPECT_THROW(reachable_set(make(1, {Point{1}}), 65), BoundExceededError);
}

TEST(ReachableSet, MinkowskiAdditivity) {
  const std::vector<std::vector<Point>> sets = {
      {Point{1, 0}, Point{0, 1}, Point{-1, -1}},
      {Point{1, 1}, Point{1, -1}, Point{0, 0}, Point{-1, 2}},
      {Point{2, 0}, Point{-1, 1}}};
  for (const auto& steps : sets) {
    const StepSet s = make(2, steps);
    for (int m = 0; m <= 5; ++m) {
      for (int n = 0; n + m <= 8; ++n) {
        std::set<Point> sum;
        for (const Point& x : reachable_set(s, m)) {
          for (const Point& y : reachable_set(s, n)) sum.insert(x + y);
        }
        EXPECT_EQ(sum, reachable_set(s, m + n));
      }
    }
  }
}

TEST(DirectionPeriod, Examples) {
  const StepSet lazy = make(1, {Point{0}, Point{1}});
  EXPECT_EQ(direction_period(lazy, rv({"1/3"})), 3);
  EXPECT_EQ(direction_period(make(1, {Point{1}}), rv({"1"})), 1);
  const StepSet diag = make(2, {Point{1, 1}, Point{1, -1}});
  EXPECT_EQ(direction_period(diag, rv({"1", "0"})), 2);
}

TEST(DirectionPeriod, MatchesBruteForce) {
  const StepSet lazy = make(1, {Point{0}, Point{1}});
  int brute = 0;
  for (int b = 1; b <= 12 && brute == 0; ++b) {
    if (b % 3 != 0) continue;
    if (reachable_set(lazy, b).count(Point{b / 3})) brute = b;
  }
  EXPECT_EQ(direction_period(lazy, rv({"1/3"})), brute);
}

TEST(DirectionPeriod, BoundReported) {
  const StepSet s = make(1, {Point{0}, Point{1}});
  try {
    direction_period(s, rv({"1/3"}), 2);
    FAIL() << "expected BoundExceededError";
  } catch (const BoundExceededError& e) {
    EXPECT_EQ(e.bound(), 2);
  }
}

TEST(CanonicalPath, Examples) {
  const auto p = canonical_path(make(1, {Point{1}}), rv({"1"}));
  EXPECT_EQ(p.prefix(3), (std::vector<Point>{Point{0}, Point{1}, Point{2}, Point{3}}));

  const StepSet diag = make(2, {Point{1, 1}, Point{1, -1}});
  const auto q = canonical_path(diag, rv({"1", "0"}));
  EXPECT_EQ(q.prefix(4), (std::vector<Point>{Point{0, 0}, Point{1, 1}, Point{2, 0}, Point{3, 1},
                                             Point{4, 0}}));
}

TEST(CanonicalPath, HitsMultiplesOfDirection) {
  const StepSet s = make(2, {Point{1, 0}, Point{0, 1}, Point{-1, -1}, Point{0, 0}});
  for (const auto& xi : {rv({"1/3", "1/4"}), rv({"0", "0"}), rv({"-1/2", "-1/3"}), rv({"1/5", "-1/5"})}) {
    const auto path = canonical_path(s, xi);
    const auto pts = path.prefix(4 * path.period());
    for (std::size_t k = 1; k < pts.size(); ++k) {
      EXPECT_TRUE(s.index_of(pts[k] - pts[k - 1]).has_value());
    }
    for (std::int64_t j = 0; j <= 4; ++j) {
      const Point x = pts[static_cast<std::size_t>(j * path.period())];
      for (int i = 0; i < 2; ++i) {
        EXPECT_EQ(Rational(x[i]), Rational(j * path.period()) * xi[static_cast<std::size_t>(i)]);
      }
    }
  }
}

}  // namespace
}  // namespace rwrp
