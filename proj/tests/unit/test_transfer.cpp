#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rwrp/errors.hpp"
#include "rwrp/instances.hpp"
#include "rwrp/transfer.hpp"

namespace rwrp {
namespace {

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

const StepSet kSimple(1, {Point{1}, Point{-1}});

RationalVector rv(std::initializer_list<const char*> xs) {
  RationalVector v;
  for (const char* x : xs) v.push_back(parse_rational(x));
  return v;
}

TEST(LogValue, EmptyIsTagged) {
  const LogValue e = LogValue::empty();
  EXPECT_TRUE(e.is_empty());
  EXPECT_THROW(e.value(), NoPathError);
  EXPECT_DOUBLE_EQ(LogValue(-3.0).value(), -3.0);
}

TEST(LogPartition, ConstantPotential) {
  const Environment per(PeriodicEnvironment({3}, {0, 1, 2}));
  const Environment iid(IidEnvironment(1, {{0.0, 0.5}, {1.0, 0.5}}, 1));
  for (int n : {1, 5, 17}) {
    EXPECT_NEAR(log_partition(per, kSimple, constant_potential(0.3, 1), n).value(), 0.3 * n, 1e-12);
    EXPECT_NEAR(log_partition(iid, kSimple, constant_potential(-1.2, 2), n).value(), -1.2 * n, 1e-12);
  }
}

TEST(LogPartition, ForcedPathSumsAlternatingValues) {
  const double a = 0.4, b = -1.3;
  const Environment env(PeriodicEnvironment({2}, {0, 1}, {a, b}));
  const StepSet right(1, {Point{1}});
  const Potential g(0, [](const Environment& e, const Point& x, StepTuple) { return e.value_at(x); });
  EXPECT_NEAR(log_partition(env, right, g, 2).value(), a + b, 1e-14);
  EXPECT_NEAR(log_partition(env, right, g, 2, Point{2}).value(), a + b, 1e-14);
}

TEST(LogPartition, ConstrainedBinomialCount) {
  const Environment env(PeriodicEnvironment({1}, {0}));
  for (int n : {2, 10, 40}) {
    const LogValue z = log_partition(env, kSimple, constant_potential(0.0), n, Point{0});
    EXPECT_NEAR(z.value(), log_binomial(n, n / 2) - n * std::log(2.0), 1e-10);
  }
  EXPECT_TRUE(log_partition(env, kSimple, constant_potential(0.0), 3, Point{0}).is_empty());
}

TEST(LogPartition, StateBudget) {
  const Environment env(IidEnvironment(2, {{0.0, 1.0}}, 1));
  const StepSet steps(2, {Point{1, 0}, Point{-1, 0}, Point{0, 1}, Point{0, -1}});
  TransferOptions opts;
  opts.state_budget = 100;
  EXPECT_THROW(log_partition(env, steps, constant_potential(0.0), 20, std::nullopt, opts), StateBudgetError);
}

TEST(LogPartition, TorusAndLatticeProgramsAgree) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = random_periodic_instance(rng);
    const Environment& env = inst.space.environment();
    const Potential g = cell_table_potential(
        inst.space.memory(), inst.space.step_count(), [&] {
          std::vector<std::vector<double>> t(inst.space.cell_count());
          for (std::size_t c = 0; c < t.size(); ++c) {
            for (std::size_t u = 0; u < inst.space.tuple_count(); ++u) t[c].push_back(inst.g[inst.space.index(c, u)]);
          }
          return t;
        }());
    const int n = 6;
    const double torus = log_partition(env, inst.space.steps(), g, n).value();
    PathDP dp(env, inst.space.steps(), g);
    DPLayer layer = dp.initial();
    for (int k = 0; k < n; ++k) layer = dp.advance(layer);
    EXPECT_NEAR(torus, layer_total(layer).value(), 1e-11) << inst.label;
  }
}

TEST(FreeEnergySequence, ConstantAndAlternating) {
  const Environment env(PeriodicEnvironment({2}, {0, 1}, {0.5, -0.1}));
  for (double v : free_energy_sequence(env, kSimple, constant_potential(0.7), 50)) EXPECT_NEAR(v, 0.7, 1e-12);
  const StepSet right(1, {Point{1}});
  const Potential g(0, [](const Environment& e, const Point& x, StepTuple) { return e.value_at(x); });
  const auto seq = free_energy_sequence(env, right, g, 40);
  for (int n = 2; n <= 40; n += 2) EXPECT_NEAR(seq[static_cast<std::size_t>(n - 1)], 0.2, 1e-13);
}

TEST(FreeEnergySequence, IidMatchesLogPartition) {
  const Environment env(IidEnvironment(2, {{-1.0, 0.5}, {1.0, 0.5}}, 8));
  const StepSet steps(2, {Point{1, 0}, Point{1, 1}});
  const Potential g = polymer_potential(0.7);
  const auto seq = free_energy_sequence(env, steps, g, 30);
  EXPECT_NEAR(seq[29] * 30, log_partition(env, steps, g, 30).value(), 1e-10);
}

TEST(FreeEnergyPeriodic, Constant) {
  const ChainStateSpace space(PeriodicEnvironment({3}, {0, 1, 2}), kSimple, 1);
  EXPECT_NEAR(free_energy_periodic(space, constant_potential(-0.9)).value, -0.9, 1e-12);
}

TEST(FreeEnergyPeriodic, HomogeneousTiltIsLogCosh) {
  const ChainStateSpace space(PeriodicEnvironment({1}, {0}), kSimple, 0);
  for (double t : {-2.0, 0.0, 0.5, 1.0}) {
    const double lam = free_energy_periodic(space, constant_potential(0.0), {t}).value;
    EXPECT_NEAR(lam, std::log(std::cosh(t)), 1e-12);
  }
  EXPECT_NEAR(free_energy_periodic(space, constant_potential(0.0), {1.0}).value, 0.433781, 1e-6);
}

TEST(FreeEnergyPeriodic, PeriodTwoRwreQuadraticRoot) {
  const double p = 0.3, q = 0.85;
  const ChainStateSpace space(PeriodicEnvironment({2}, {0, 1}), kSimple, 1);
  const Potential v = rwre_potential(symbol_kernel({{p, 1 - p}, {q, 1 - q}}));
  const Potential minus_v(1, [v](const Environment& e, const Point& x, StepTuple t) { return -v(e, x, t); });
  const double base = free_energy_periodic(space, minus_v).value;
  EXPECT_NEAR(base, -std::log(2.0), 1e-12);
  for (double t : {-1.5, -0.3, 0.0, 0.7, 2.0}) {
    // Cell-level tilted matrix [[0, a], [b, 0]]: rho^2 - tr rho + det = 0 with tr = 0, det = -ab.
    const double a = p * std::exp(t) + (1 - p) * std::exp(-t);
    const double b = q * std::exp(t) + (1 - q) * std::exp(-t);
    const double tr = 0.0, det = -a * b;
    const double root = 0.5 * (tr + std::sqrt(tr * tr - 4 * det));
    const double lam = free_energy_periodic(space, minus_v, {t}).value - base;
    EXPECT_NEAR(lam, std::log(root), 1e-11) << t;
  }
}

TEST(FreeEnergyPeriodic, RwreNormalization) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = random_periodic_instance(rng);
    const ChainStateSpace space = inst.space.memory() >= 1 ? inst.space : inst.space.with_memory(1);
    std::vector<std::vector<double>> rows;
    for (std::size_t c = 0; c < space.cell_count(); ++c) {
      rows.push_back(random_probability_vector(rng, space.step_count()));
    }
    const Potential v = rwre_potential(symbol_kernel(rows));
    std::vector<double> g = space.tabulate(v);
    for (double& x : g) x = -x;
    EXPECT_NEAR(free_energy_periodic(space, g).value, -std::log(static_cast<double>(space.step_count())), 1e-10)
        << inst.label;
  }
}

TEST(FreeEnergyPeriodic, PropertiesOnRandomInstances) {
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 25; ++trial) {
    const auto inst = random_periodic_instance(rng);
    const auto& s = inst.space;
    const double lam = free_energy_periodic(s, inst.g).value;

    EXPECT_GE(lam, mean_min_lower_bound(s, inst.g) - 1e-9) << inst.label;
    EXPECT_LE(lam, max_cycle_mean_upper_bound(s, inst.g) + 1e-9) << inst.label;

    auto shifted = inst.g;
    for (double& x : shifted) x += 1.25;
    EXPECT_NEAR(free_energy_periodic(s, shifted).value, lam + 1.25, 1e-10);

    std::vector<double> other(inst.g.size());
    for (double& x : other) x = u(rng);
    const double lam2 = free_energy_periodic(s, other).value;
    for (double theta : {0.25, 0.5, 0.75}) {
      std::vector<double> mix(inst.g.size());
      for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = theta * inst.g[i] + (1 - theta) * other[i];
      EXPECT_LE(free_energy_periodic(s, mix).value, theta * lam + (1 - theta) * lam2 + 1e-8);
    }

    const std::vector<double> zero(static_cast<std::size_t>(s.steps().dimension()), 0.0);
    EXPECT_EQ(free_energy_periodic(s, inst.g, zero).value, lam);

    const double gmax = *std::max_element(inst.g.begin(), inst.g.end());
    double prev = -INFINITY;
    for (double c = -2.0; c <= gmax + 0.5; c += 0.25) {
      auto cut = inst.g;
      for (double& x : cut) x = std::min(x, c);
      const double v = free_energy_periodic(s, cut).value;
      EXPECT_GE(v, prev - 1e-12);
      prev = v;
    }
    EXPECT_NEAR(prev, lam, 1e-12);
  }
}

TEST(FreeEnergyPeriodic, SequenceConvergesToPerronRoot) {
  std::mt19937_64 rng(31);
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = random_periodic_instance(rng);
    const auto fe = free_energy_periodic(inst.space, inst.g);
    const int n = 1000;
    const auto seq = free_energy_sequence(inst.space, inst.g, 0, n);
    if (spectral_gap(transfer_matrix(inst.space, inst.g)) >= 0.1) {
      ++checked;
      // Increments log Z_n - log Z_{n-1} converge geometrically to the root.
      const double increment = n * seq[n - 1] - (n - 1) * seq[n - 2];
      EXPECT_NEAR(increment, fe.value, 1e-6) << inst.label;
    }
    // The average carries an O(1/n) boundary term bounded through the eigenvectors.
    const auto [vmin, vmax] = std::minmax_element(fe.right.begin(), fe.right.end());
    const double gmax = *std::max_element(inst.g.begin(), inst.g.end(), [](double a, double b) {
      return std::abs(a) < std::abs(b);
    });
    const double band = (std::abs(fe.value) + std::abs(gmax) + std::log(*vmax / *vmin)) / n;
    EXPECT_LE(std::abs(seq[n - 1] - fe.value), band) << inst.label;
  }
  EXPECT_GT(checked, 5);
}

TEST(FreeEnergyPeriodic, ReducibleOperator) {
  const ChainStateSpace space(PeriodicEnvironment({2, 2}, {0, 1, 2, 3}),
                              StepSet(2, {Point{1, 1}, Point{1, -1}}), 0);
  const std::vector<double> g{0.0, 1.0, 1.0, 0.0};
  EXPECT_FALSE(space.ergodic());
  EXPECT_THROW(free_energy_periodic(space, g), ReducibleOperatorError);
  PerronOptions opts;
  opts.allow_reducible = true;
  const auto r = free_energy_periodic(space, g, {}, opts);
  EXPECT_NEAR(r.value, 1.0, 1e-12);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(FreeEnergyPeriodic, NonConvergenceReportsGap) {
  const ChainStateSpace space(PeriodicEnvironment({3}, {0, 1, 2}), kSimple, 0);
  PerronOptions opts;
  opts.max_iterations = 2;
  try {
    free_energy_periodic(space, std::vector<double>{0.0, 1.0, -1.0}, {}, opts);
    FAIL() << "expected NonConvergenceError";
  } catch (const NonConvergenceError& e) {
    EXPECT_GT(e.gap(), 0.0);
  }
}

TEST(SandwichBounds, HandComputed) {
  // Period 2, R = {+1}: the single cycle has mean (a + b) / 2.
  const ChainStateSpace space(PeriodicEnvironment({2}, {0, 1}), StepSet(1, {Point{1}}), 0);
  const std::vector<double> g{1.0, -3.0};
  EXPECT_DOUBLE_EQ(max_cycle_mean_upper_bound(space, g), -1.0);
  EXPECT_DOUBLE_EQ(mean_min_lower_bound(space, g), -1.0);
  const ChainStateSpace lazy(PeriodicEnvironment({2}, {0, 1}), StepSet(1, {Point{1}, Point{0}}), 0);
  EXPECT_DOUBLE_EQ(max_cycle_mean_upper_bound(lazy, g), 1.0);
}

TEST(ConstrainedFreeEnergy, Examples) {
  const Environment env(PeriodicEnvironment({1}, {0}));
  const StepSet right(1, {Point{1}});
  for (const LogValue& v : constrained_free_energy(env, right, constant_potential(0.0), rv({"1"}), 20)) {
    EXPECT_NEAR(v.value(), 0.0, 1e-14);
  }
  const auto seq = constrained_free_energy(env, kSimple, constant_potential(0.0), rv({"0"}), 60);
  const DirectionPath path = canonical_path(kSimple, rv({"0"}));
  for (int n = 1; n <= 60; ++n) {
    const auto x = path.point_at(n)[0];
    const int ups = static_cast<int>((n + x) / 2);
    EXPECT_NEAR(seq[static_cast<std::size_t>(n - 1)].value(), (log_binomial(n, ups) - n * std::log(2.0)) / n, 1e-12);
  }
  EXPECT_NEAR(seq.back().value(), 0.0, 0.05);
}

TEST(ConstrainedFreeEnergy, BoundedByUnconstrained) {
  const Environment env(PeriodicEnvironment({3}, {0, 1, 2}, {0.3, -0.5, 1.1}));
  const StepSet steps(1, {Point{1}, Point{-1}, Point{0}});
  const Potential g = polymer_potential(1.0);
  const int n = 120;
  const double lam = free_energy_sequence(env, steps, g, n).back();
  double best = -INFINITY;
  for (const char* xi : {"-1", "-2/3", "-1/3", "0", "1/3", "2/3", "1"}) {
    const auto seq = constrained_free_energy(env, steps, g, rv({xi}), n);
    ASSERT_FALSE(seq.back().is_empty());
    EXPECT_LE(seq.back().value(), lam + 1e-12);
    best = std::max(best, seq.back().value());
  }
  EXPECT_GT(best, lam - 0.06);
}

}  // namespace
}  // namespace rwrp
