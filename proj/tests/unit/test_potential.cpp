#include <gtest/gtest.h>

#include <cmath>

#include "rwrp/errors.hpp"
#include "rwrp/potential.hpp"

namespace rwrp {
namespace {

const std::vector<std::size_t> kNoSteps;

TEST(PolymerPotential, Examples) {
  const Environment env(PeriodicEnvironment({2}, {0, 1}, {0.7, -1.0}));
  EXPECT_DOUBLE_EQ(polymer_potential(1.0)(env, Point{0}, kNoSteps), -0.7);
  EXPECT_DOUBLE_EQ(polymer_potential(0.0)(env, Point{1}, kNoSteps), 0.0);
  EXPECT_DOUBLE_EQ(polymer_potential(2.0)(env, Point{1}, kNoSteps), 2.0);
  EXPECT_EQ(polymer_potential(1.0).memory(), 0);
}

TEST(RwrePotential, HalfProbabilityGivesLogTwo) {
  const Environment env(PeriodicEnvironment({1}, {0}));
  const Potential v = rwre_potential(symbol_kernel({{0.5, 0.5}}));
  EXPECT_EQ(v.memory(), 1);
  for (std::size_t z : {0u, 1u}) {
    const std::vector<std::size_t> t{z};
    EXPECT_NEAR(v(env, Point{3}, t), 0.693147, 1e-6);
  }
}

TEST(RwrePotential, UniformKernelGivesLogR) {
  const Environment env(PeriodicEnvironment({1}, {0}));
  const Potential v = rwre_potential(symbol_kernel({{0.25, 0.25, 0.25, 0.25}}));
  for (std::size_t z = 0; z < 4; ++z) {
    const std::vector<std::size_t> t{z};
    EXPECT_DOUBLE_EQ(v(env, Point{0}, t), std::log(4.0));
  }
}

TEST(RwrePotential, PeriodTwoTableHasFourEntries) {
  const double p = 0.3, q = 0.8;
  const Environment env(PeriodicEnvironment({2}, {0, 1}));
  const Potential v = rwre_potential(symbol_kernel({{p, 1 - p}, {q, 1 - q}}));
  const std::vector<std::size_t> up{0}, down{1};
  EXPECT_DOUBLE_EQ(v(env, Point{0}, up), -std::log(p));
  EXPECT_DOUBLE_EQ(v(env, Point{0}, down), -std::log(1 - p));
  EXPECT_DOUBLE_EQ(v(env, Point{1}, up), -std::log(q));
  EXPECT_DOUBLE_EQ(v(env, Point{1}, down), -std::log(1 - q));
}

TEST(RwrePotential, ZeroProbabilityRejected) {
  EXPECT_THROW(symbol_kernel({{1.0, 0.0}}), ZeroProbabilityStepError);
  EXPECT_THROW(symbol_kernel({{0.5, 0.4}}), ValidationError);
  const Environment env(PeriodicEnvironment({1}, {0}));
  const Potential v = rwre_potential([](const Environment&, const Point&) {
    return std::vector<double>{1.0, 0.0};
  });
  const std::vector<std::size_t> t{1};
  EXPECT_THROW(v(env, Point{0}, t), ZeroProbabilityStepError);
}

TEST(Potential, RejectsWrongTupleLengthAndNonFinite) {
  const Environment env(PeriodicEnvironment({1}, {0}));
  const std::vector<std::size_t> one{0};
  EXPECT_THROW(polymer_potential(1.0)(env, Point{0}, one), ValidationError);
  const Potential bad(0, [](const Environment&, const Point&, StepTuple) { return INFINITY; });
  EXPECT_THROW(bad(env, Point{0}, kNoSteps), ValidationError);
}

TEST(Potential, MemoryLiftIgnoresExtraSteps) {
  const Environment env(PeriodicEnvironment({2}, {0, 1}, {0.5, 1.5}));
  const Potential g = polymer_potential(1.0).with_memory(2);
  EXPECT_EQ(g.memory(), 2);
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) {
      const std::vector<std::size_t> t{a, b};
      EXPECT_DOUBLE_EQ(g(env, Point{1}, t), -1.5);
    }
  }
  EXPECT_THROW(g.with_memory(1), ValidationError);
}

TEST(TupleCode, RoundTrip) {
  for (std::size_t c = 0; c < 27; ++c) {
    const auto t = tuple_from_code(c, 3, 3);
    EXPECT_EQ(tuple_code(t, 3), c);
  }
  const std::vector<std::size_t> t{2, 0, 1};
  EXPECT_EQ(tuple_code(t, 3), 19u);
}

TEST(TablePotential, CellAndSymbolLookup) {
  const Environment env(PeriodicEnvironment({2}, {1, 0}));
  const Potential by_cell = cell_table_potential(1, 2, {{1.0, 2.0}, {3.0, 4.0}});
  const Potential by_symbol = symbol_table_potential(1, 2, {{1.0, 2.0}, {3.0, 4.0}});
  const std::vector<std::size_t> t{1};
  EXPECT_DOUBLE_EQ(by_cell(env, Point{0}, t), 2.0);
  EXPECT_DOUBLE_EQ(by_symbol(env, Point{0}, t), 4.0);
  EXPECT_DOUBLE_EQ(by_cell(env.shifted(Point{1}), Point{0}, t), 4.0);
  EXPECT_THROW(cell_table_potential(1, 2, {{1.0}}), ValidationError);
}

TEST(ClassLDiagnostic, ConstantClosedForm) {
  const Environment env(PeriodicEnvironment({1}, {0}));
  const StepSet steps(1, {Point{1}, Point{-1}});
  const double c = -1.7;
  const auto rows = class_L_diagnostic(constant_potential(c, 1), env, steps, 0, {0.0, 0.25, 0.5},
                                       {4, 10, 33});
  ASSERT_EQ(rows.size(), 9u);
  for (const auto& r : rows) {
    EXPECT_NEAR(r.value, (std::floor(r.epsilon * r.n) + 1) * std::abs(c) / r.n, 1e-14);
    EXPECT_FALSE(r.sampled);
  }
}

TEST(ClassLDiagnostic, BoundedPotentialTrendVanishes) {
  const Environment env(IidEnvironment(2, {{-1.0, 0.5}, {1.0, 0.5}}, 3));
  const StepSet steps(2, {Point{1, 0}, Point{0, 1}});
  const double beta = 0.8;
  const std::vector<double> eps{0.5, 0.25, 0.125, 0.0625};
  const auto rows = class_L_diagnostic(polymer_potential(beta), env, steps, 0, eps, {32});
  for (const auto& r : rows) EXPECT_LE(r.value, (r.epsilon * r.n + 1) * beta / r.n + 1e-12);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LE(rows[i].value, rows[i - 1].value);
}

TEST(ClassLDiagnostic, HeavyTailGrowsWithN) {
  // Discretized Pareto tail P(omega > 2^k) ~ 2^-k: index 1 < d = 2.
  std::vector<AlphabetEntry> alphabet;
  double total = 0.0;
  for (int k = 0; k < 40; ++k) {
    alphabet.push_back({std::ldexp(1.0, k), std::ldexp(1.0, -k - 1)});
    total += alphabet.back().probability;
  }
  for (auto& a : alphabet) a.probability /= total;
  const Environment env(IidEnvironment(2, alphabet, 11));
  const StepSet steps(2, {Point{1, 0}, Point{-1, 0}, Point{0, 1}, Point{0, -1}});
  const auto rows = class_L_diagnostic(polymer_potential(1.0), env, steps, 0, {0.25}, {8, 32, 128});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_GT(rows[2].value, rows[0].value);
}

TEST(ClassLDiagnostic, FallsBackToSampling) {
  const Environment env(IidEnvironment(2, {{0.0, 0.5}, {1.0, 0.5}}, 3));
  const StepSet steps(2, {Point{1, 0}, Point{-1, 0}, Point{0, 1}, Point{0, -1}});
  ClassLOptions opts;
  opts.enumeration_limit = 100;
  opts.sample_count = 50;
  const auto rows = class_L_diagnostic(polymer_potential(1.0), env, steps, 0, {0.5}, {20}, opts);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_TRUE(rows[0].sampled);
  EXPECT_EQ(rows[0].points, 50u);
}

TEST(ClassLDiagnostic, ZeroDirectionRejected) {
  const Environment env(PeriodicEnvironment({1}, {0}));
  const StepSet steps(1, {Point{0}, Point{1}});
  EXPECT_THROW(class_L_diagnostic(constant_potential(1.0), env, steps, 0, {0.5}, {4}), ValidationError);
}

}  // namespace
}  // namespace rwrp
