#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "rwrp/errors.hpp"
#include "rwrp/sampler.hpp"

namespace rwrp {
namespace {

// Exact Q-probability of every (n + l)-step sequence by direct enumeration.
std::map<std::vector<std::size_t>, double> enumerate_q(const Environment& env, const StepSet& R, const Potential& V,
                                                       int n) {
  const int l = V.memory();
  const std::size_t k = R.size();
  const int len = n + l;
  std::map<std::vector<std::size_t>, double> out;
  std::vector<std::size_t> seq(static_cast<std::size_t>(len), 0);
  double total = 0.0;
  for (;;) {
    double logw = 0.0;
    Point x = R.origin();
    for (int t = 0; t < n; ++t) {
      const std::vector<std::size_t> tuple(seq.begin() + t, seq.begin() + t + l);
      logw -= V(env, x, tuple);
      x += R[seq[static_cast<std::size_t>(t)]];
    }
    out[seq] = std::exp(logw);
    total += std::exp(logw);
    int i = len - 1;
    while (i >= 0 && ++seq[static_cast<std::size_t>(i)] == k) seq[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) break;
  }
  for (auto& [s, p] : out) p /= total;
  return out;
}

std::vector<std::size_t> as_vector(std::span<const std::uint8_t> p) { return {p.begin(), p.end()}; }

void expect_within_bands(const std::map<std::vector<std::size_t>, double>& exact,
                         const std::map<std::vector<std::size_t>, std::size_t>& counts, std::size_t total) {
  for (const auto& [seq, p] : exact) {
    const auto it = counts.find(seq);
    const double freq = it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
    const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(total));
    EXPECT_LE(std::abs(freq - p), 3 * sigma + 1e-12);
  }
  for (const auto& [seq, c] : counts) EXPECT_TRUE(exact.count(seq));
}

TEST(Sampler, LogZMatchesPartitionFunction) {
  const Environment env(PeriodicEnvironment({3}, {0, 1, 2}, {0.2, -0.5, 1.0}));
  const StepSet R(1, {Point{1}, Point{-1}, Point{0}});
  const Potential V = polymer_potential(0.7);
  const PolymerSampleBatch b = sample_paths(env, R, V, 6, 10, 1);
  EXPECT_NEAR(b.log_Z, log_partition(env, R, V.negated(), 6).value(), 1e-12);
}

TEST(Sampler, ZeroPotentialIsReferenceWalk) {
  const Environment env(PeriodicEnvironment({2, 2}, {0, 1, 2, 3}));
  const StepSet R(2, {Point{1, 0}, Point{0, 1}, Point{-1, 0}});
  const std::size_t count = 100000;
  const PolymerSampleBatch b = sample_paths(env, R, constant_potential(0.0), 5, count, 7);
  std::vector<std::size_t> freq(3, 0);
  for (std::size_t i = 0; i < count; ++i) {
    for (auto z : b.path(i)) ++freq[z];
  }
  const double total = static_cast<double>(count * 5);
  for (std::size_t f : freq) {
    const double sigma = std::sqrt((1.0 / 3) * (2.0 / 3) / total);
    EXPECT_LE(std::abs(static_cast<double>(f) / total - 1.0 / 3), 3 * sigma);
  }
}

TEST(Sampler, PathFrequenciesMatchEnumeration) {
  const Environment env(PeriodicEnvironment({3}, {0, 1, 2}, {0.9, -0.4, 0.1}));
  const StepSet R(1, {Point{1}, Point{-1}});
  const Potential memory1 = symbol_table_potential(1, 2, {{0.3, -0.8}, {1.1, 0.0}, {-0.5, 0.6}});
  const std::size_t count = 100000;
  for (int n = 1; n <= 3; ++n) {
    for (const Potential& V : {polymer_potential(1.0), memory1}) {
      const PolymerSampleBatch b = sample_paths(env, R, V, n, count, derive_seed(2026, static_cast<std::uint64_t>(n)));
      std::map<std::vector<std::size_t>, std::size_t> counts;
      for (std::size_t i = 0; i < count; ++i) ++counts[as_vector(b.path(i))];
      expect_within_bands(enumerate_q(env, R, V, n), counts, count);
    }
  }
}

TEST(Sampler, EndpointMarginalMatchesDP) {
  const Environment env(IidEnvironment(1, {{1.0, 0.5}, {-1.0, 0.5}}, 42));
  const StepSet R(1, {Point{1}, Point{-1}});
  const Potential V = polymer_potential(0.8);
  const int n = 8;
  const std::size_t count = 50000;
  const PolymerSampleBatch b = sample_paths(env, R, V, n, count, 3);
  std::map<Point, std::size_t> hist;
  for (std::size_t i = 0; i < count; ++i) ++hist[b.position(i, n)];
  for (const auto& [x, p] : endpoint_distribution(env, R, V, n)) {
    const double freq = static_cast<double>(hist[x]) / count;
    EXPECT_LE(std::abs(freq - p), 3 * std::sqrt(p * (1 - p) / count) + 1e-12) << x.to_string();
  }
}

TEST(Sampler, ThreadCountDoesNotChangeSamples) {
  const Environment env(IidEnvironment(2, {{1.0, 0.3}, {-1.0, 0.7}}, 9));
  const StepSet R(2, {Point{1, 0}, Point{1, 1}});
  SamplerOptions one, eight;
  eight.threads = 8;
  const auto a = sample_paths(env, R, polymer_potential(0.5), 20, 5000, 11, one);
  const auto b = sample_paths(env, R, polymer_potential(0.5), 20, 5000, 11, eight);
  EXPECT_EQ(a.flat, b.flat);
  const auto c = sample_paths(env, R, polymer_potential(0.5), 20, 5000, 12, one);
  EXPECT_NE(a.flat, c.flat);
}

TEST(Sampler, DirectedPathsVisitDistinctSites) {
  const Environment env(IidEnvironment(2, {{1.0, 0.5}, {-1.0, 0.5}}, 5));
  const StepSet R(2, {Point{1, 0}, Point{1, 1}, Point{1, -1}});
  const auto b = sample_paths(env, R, polymer_potential(1.0), 30, 200, 4);
  for (std::size_t i = 0; i < b.count; ++i) {
    std::set<Point> seen;
    for (int t = 0; t <= 30; ++t) EXPECT_TRUE(seen.insert(b.position(i, t)).second);
  }
}

TEST(EmpiricalMeasure, SingleStepIsPointMassAtStart) {
  const Environment env(PeriodicEnvironment({3}, {0, 1, 2}));
  const StepSet R(1, {Point{1}, Point{-1}});
  const auto b = sample_paths(env, R, polymer_potential(1.0), 1, 10, 1);
  const EmpiricalMeasure m = empirical_measure(b, 0, 0);
  ASSERT_EQ(m.mass.size(), 3u);
  EXPECT_EQ(m.mass[env.cell_at(Point{0})], 1.0);
}

TEST(EmpiricalMeasure, TotalMassIsOne) {
  const Environment env(IidEnvironment(1, {{1.0, 0.5}, {-1.0, 0.5}}, 2));
  const StepSet R(1, {Point{1}, Point{-1}, Point{0}});
  SamplerOptions opts;
  opts.tail_steps = 2;
  const auto b = sample_paths(env, R, polymer_potential(1.0), 7, 300, 8, opts);
  for (int l : {0, 1, 2}) {
    double total = 0.0;
    for (double v : empirical_measure(b, l).mass) total += v;
    EXPECT_NEAR(total, 1.0, 1e-12);
    double one = 0.0;
    for (double v : empirical_measure(b, 5, l).mass) one += v;
    EXPECT_NEAR(one, 1.0, 1e-12);
  }
  EXPECT_THROW(empirical_measure(b, 3), ValidationError);
}

TEST(EmpiricalMeasure, ReferenceWalkIsProductMeasure) {
  // R = {+-1} on a 2-torus alternates cells, so for even n the site trace is uniform.
  const Environment env(PeriodicEnvironment({2}, {0, 1}));
  const StepSet R(1, {Point{1}, Point{-1}});
  SamplerOptions opts;
  opts.tail_steps = 2;
  const std::size_t count = 20000;
  const auto b = sample_paths(env, R, constant_potential(0.0), 10, count, 21, opts);
  const int l = 2;
  const EmpiricalMeasure avg = empirical_measure(b, l);
  std::vector<double> sq(avg.mass.size(), 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    const auto m = empirical_measure(b, i, l);
    for (std::size_t j = 0; j < sq.size(); ++j) sq[j] += m.mass[j] * m.mass[j];
  }
  const double expected = 0.5 * 0.25;
  for (std::size_t j = 0; j < sq.size(); ++j) {
    const double var = sq[j] / count - avg.mass[j] * avg.mass[j];
    EXPECT_LE(std::abs(avg.mass[j] - expected), 3 * std::sqrt(var / count) + 1e-12);
  }
}

TEST(McFreeEnergy, SingleSymbolIsDeterministic) {
  const IidEnvironment env(1, {{0.7, 1.0}}, 1);
  const StepSet R(1, {Point{1}, Point{2}});
  const McResult r = mc_free_energy(env, R, polymer_potential(0.5), 50, 5, 3);
  for (double v : r.values) EXPECT_NEAR(v, 0.35, 1e-12);
  EXPECT_NEAR(r.stderr_, 0.0, 1e-12);
}

TEST(McFreeEnergy, QuenchedBelowAnnealed) {
  const IidEnvironment env(1, {{1.0, 0.5}, {-1.0, 0.5}}, 1);
  const StepSet R2(2, {Point{1, 0}, Point{1, 1}});
  const IidEnvironment env2(2, env.alphabet(), 1);
  for (double beta : {0.5, 1.0}) {
    const McResult r = mc_free_energy(env2, R2, polymer_potential(beta), 100, 20, 77);
    const double annealed = annealed_free_energy(env2, R2, polymer_potential(beta));
    EXPECT_NEAR(annealed, std::log(std::cosh(beta)), 1e-14);
    EXPECT_LE(r.mean, annealed + 3 * r.stderr_);
  }
  EXPECT_THROW(annealed_free_energy(env, StepSet(1, {Point{1}, Point{-1}}), polymer_potential(1.0)), ValidationError);
}

TEST(McFreeEnergy, ThreadCountDoesNotChangeValues) {
  const IidEnvironment env(2, {{1.0, 0.5}, {-1.0, 0.5}}, 1);
  const StepSet R(2, {Point{1, 0}, Point{1, 1}});
  McOptions eight;
  eight.threads = 8;
  const McResult a = mc_free_energy(env, R, polymer_potential(1.0), 60, 16, 5);
  const McResult b = mc_free_energy(env, R, polymer_potential(1.0), 60, 16, 5, eight);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.mean, b.mean);
}

TEST(McFreeEnergy, UndirectedGuard) {
  const IidEnvironment env(1, {{1.0, 0.5}, {-1.0, 0.5}}, 1);
  const StepSet R(1, {Point{1}, Point{-1}});
  EXPECT_THROW(mc_free_energy(env, R, polymer_potential(1.0), 10, 2, 1), ValidationError);
  McOptions opts;
  opts.allow_undirected = true;
  EXPECT_NO_THROW(mc_free_energy(env, R, polymer_potential(1.0), 10, 2, 1, opts));
  EXPECT_THROW(mc_free_energy(env, R, polymer_potential(1.0), 1001, 2, 1, opts), ValidationError);
}

}  // namespace
}  // namespace rwrp
