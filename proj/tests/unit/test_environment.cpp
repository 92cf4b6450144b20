#include <gtest/gtest.h>

#include <cmath>

#include "rwrp/environment.hpp"
#include "rwrp/errors.hpp"

namespace rwrp {
namespace {

TEST(PeriodicEnvironment, ValueAtWrapsModPeriod) {
  const PeriodicEnvironment env({2}, {0, 1}, {0.25, 0.75});
  EXPECT_DOUBLE_EQ(env.value_at(Point{5}), 0.75);
  EXPECT_DOUBLE_EQ(env.value_at(Point{-3}), 0.75);
  EXPECT_DOUBLE_EQ(env.value_at(Point{4}), 0.25);
}

TEST(PeriodicEnvironment, CellsFirstCoordinateFastest) {
  const PeriodicEnvironment env({2, 3}, {0, 1, 2, 3, 4, 5});
  EXPECT_EQ(env.symbol_at(Point{1, 0}), 1);
  EXPECT_EQ(env.symbol_at(Point{0, 1}), 2);
  EXPECT_EQ(env.symbol_at(Point{-1, -1}), 5);
  for (std::size_t c = 0; c < env.site_count(); ++c) EXPECT_EQ(env.cell_index(env.cell_point(c)), c);
}

TEST(PeriodicEnvironment, RejectsBadTables) {
  EXPECT_THROW(PeriodicEnvironment({2}, {0, 1, 0}), ValidationError);
  EXPECT_THROW(PeriodicEnvironment({0}, {}), ValidationError);
  EXPECT_THROW(PeriodicEnvironment({2}, {0, 3}, {1.0, 2.0}), ValidationError);
}

TEST(PeriodicEnvironment, StationaryMeasureUniform) {
  EXPECT_EQ(PeriodicEnvironment({2}, {0, 1}).stationary_site_measure(), (std::vector<double>{0.5, 0.5}));
  const auto m = PeriodicEnvironment({2, 2}, {0, 1, 1, 0}).stationary_site_measure();
  ASSERT_EQ(m.size(), 4u);
  for (double p : m) EXPECT_DOUBLE_EQ(p, 0.25);
}

TEST(PeriodicEnvironment, UniformMeasureShiftInvariant) {
  const PeriodicEnvironment env({3, 2}, {0, 1, 2, 3, 4, 5});
  const StepSet steps(2, {Point{1, 0}, Point{0, 1}, Point{-1, 1}});
  const auto mu = env.stationary_site_measure();
  for (const Point& z : steps.steps()) {
    std::vector<double> pushed(mu.size(), 0.0);
    for (std::size_t c = 0; c < mu.size(); ++c) pushed[env.cell_index(env.cell_point(c) + z)] += mu[c];
    EXPECT_EQ(pushed, mu);
  }
}

TEST(PeriodicEnvironment, OrbitTransitivity) {
  const PeriodicEnvironment env({2, 2}, {0, 1, 2, 3});
  EXPECT_TRUE(env.shift_orbit_transitive(StepSet(2, {Point{1, 0}, Point{0, 1}})));
  EXPECT_FALSE(env.shift_orbit_transitive(StepSet(2, {Point{1, 1}, Point{1, -1}})));
}

TEST(IidEnvironment, Deterministic) {
  const IidEnvironment env(2, {{-1.0, 0.5}, {1.0, 0.5}}, 17);
  for (int i = -5; i < 5; ++i) {
    EXPECT_EQ(env.value_at(Point{i, 3 * i}), env.value_at(Point{i, 3 * i}));
    EXPECT_EQ(env.value_at(Point{i, 1}), env.with_seed(17).value_at(Point{i, 1}));
  }
}

TEST(IidEnvironment, FrequenciesWithinBinomialBand) {
  const IidEnvironment env(1, {{0.0, 0.5}, {1.0, 0.5}}, 2024);
  const int n = 100000;
  int ones = 0;
  for (int i = 0; i < n; ++i) ones += env.symbol_at(Point{i});
  const double sigma = std::sqrt(n * 0.25);
  EXPECT_LE(std::abs(ones - n / 2.0), 3 * sigma);
}

TEST(IidEnvironment, SkewedFrequencies) {
  const IidEnvironment env(2, {{0.0, 0.2}, {1.0, 0.3}, {2.0, 0.5}}, 99);
  const int side = 300;
  std::vector<int> counts(3, 0);
  for (int i = 0; i < side; ++i) {
    for (int j = 0; j < side; ++j) ++counts[static_cast<std::size_t>(env.symbol_at(Point{i, j}))];
  }
  const double n = side * side;
  const double p[3] = {0.2, 0.3, 0.5};
  for (int s = 0; s < 3; ++s) {
    EXPECT_LE(std::abs(counts[static_cast<std::size_t>(s)] - n * p[s]), 3 * std::sqrt(n * p[s] * (1 - p[s])));
  }
}

TEST(IidEnvironment, ProbabilitiesMustSumToOne) {
  try {
    IidEnvironment(1, {{0.0, 0.5}, {1.0, 0.4}}, 1);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "alphabet");
  }
  EXPECT_THROW(IidEnvironment(1, {{0.0, -0.5}, {1.0, 1.5}}, 1), ValidationError);
}

TEST(Environment, ShiftConsistency) {
  const Environment per(PeriodicEnvironment({3}, {0, 1, 2}, {0.1, 0.2, 0.3}));
  const Environment iid(IidEnvironment(2, {{-1.0, 0.5}, {1.0, 0.5}}, 5));
  for (int x = -4; x <= 4; ++x) {
    for (int y = -4; y <= 4; ++y) {
      EXPECT_EQ(per.value_at(Point{x + y}), per.shifted(Point{y}).value_at(Point{x}));
      EXPECT_EQ(iid.value_at(Point{x + y, x}), iid.shifted(Point{y, 0}).value_at(Point{x, x}));
      EXPECT_EQ(iid.shifted(Point{x, 0}).shifted(Point{0, y}).value_at(Point{1, 1}),
                iid.value_at(Point{x + 1, y + 1}));
    }
  }
}

TEST(DeriveSeed, DistinctIndicesGiveDistinctSeeds) {
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
}

}  // namespace
}  // namespace rwrp
