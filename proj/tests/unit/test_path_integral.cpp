#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rwrp/errors.hpp"
#include "rwrp/instances.hpp"
#include "rwrp/path_integral.hpp"

namespace rwrp {
namespace {

struct ClosedInstance {
  ChainStateSpace space;
  std::vector<double> h;
  std::vector<double> a;
  CorrectorTable F;
};

// F = grad h + a . increment, which satisfies the closed-loop property.
ClosedInstance random_closed(std::mt19937_64& rng, bool drift) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (;;) {
    PeriodicInstance inst = random_periodic_instance(rng);
    if (!inst.space.steps().generates_full_lattice()) continue;
    const ChainStateSpace& sp = inst.space;
    std::vector<double> h(sp.size()), a(static_cast<std::size_t>(sp.steps().dimension()), 0.0);
    for (double& x : h) x = normal(rng);
    if (drift) {
      for (double& x : a) x = normal(rng);
    }
    const std::size_t k = sp.step_count();
    CorrectorTable F(sp.size() * k);
    for (std::size_t s = 0; s < sp.size(); ++s) {
      for (std::size_t z = 0; z < k; ++z) {
        double v = h[sp.move(s, z)] - h[s];
        const Point& d = sp.displacement(s, z);
        for (std::size_t i = 0; i < a.size(); ++i) v += a[i] * static_cast<double>(d[i]);
        F[s * k + z] = v;
      }
    }
    return {sp, h, a, F};
  }
}

Point random_point(std::mt19937_64& rng, int d, int r = 3) {
  std::uniform_int_distribution<int> u(-r, r);
  Point p(d);
  for (int i = 0; i < d; ++i) p[i] = u(rng);
  return p;
}

LiftedState random_lifted(std::mt19937_64& rng, const ChainStateSpace& sp) {
  return {random_point(rng, sp.steps().dimension()), rng() % sp.tuple_count()};
}

std::vector<std::size_t> random_moves(std::mt19937_64& rng, const ChainStateSpace& sp, int max_len) {
  std::vector<std::size_t> m(rng() % (max_len + 1));
  for (auto& z : m) z = rng() % sp.step_count();
  return m;
}

std::size_t state_at(const ChainStateSpace& sp, const Point& u, const LiftedState& l) {
  return sp.index(sp.periodic().cell_index(l.x + u), l.code);
}

TEST(PathIntegral, RejectsNonGeneratingSteps) {
  const ChainStateSpace sp(PeriodicEnvironment({2, 2}, {0, 1, 2, 3}), StepSet(2, {Point{1, 1}, Point{1, -1}}), 0);
  EXPECT_THROW(PathIntegral(sp, CorrectorTable(8, 0.0)), ValidationError);
}

TEST(PathIntegral, RejectsLoopViolation) {
  const ChainStateSpace sp(PeriodicEnvironment({2}, {0, 1}), StepSet(1, {Point{1}, Point{-1}}), 0);
  EXPECT_THROW(PathIntegral(sp, CorrectorTable{1.0, 0.0, 0.0, 0.0}), NoClosedLoopError);
}

TEST(PathIntegral, EmptyPathIsZero) {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 10; ++rep) {
    const ClosedInstance ci = random_closed(rng, true);
    const PathIntegral pi(ci.space, ci.F);
    const LiftedState s = random_lifted(rng, ci.space);
    EXPECT_EQ(pi.L(random_point(rng, ci.space.steps().dimension()), s, s), 0.0);
  }
}

TEST(PathIntegral, PathReachesTarget) {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 20; ++rep) {
    const ClosedInstance ci = random_closed(rng, false);
    const PathIntegral pi(ci.space, ci.F);
    const LiftedState from = random_lifted(rng, ci.space);
    const LiftedState to = pi.endpoint(from, random_moves(rng, ci.space, 8));
    EXPECT_EQ(pi.endpoint(from, pi.path(from, to)), to);
  }
}

TEST(PathIntegral, GradientTelescopes) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const ClosedInstance ci = random_closed(rng, true);
    const PathIntegral pi(ci.space, ci.F);
    const Point u = random_point(rng, ci.space.steps().dimension());
    const LiftedState from = random_lifted(rng, ci.space);
    const LiftedState to = pi.endpoint(from, random_moves(rng, ci.space, 8));
    double expected = ci.h[state_at(ci.space, u, to)] - ci.h[state_at(ci.space, u, from)];
    for (std::size_t i = 0; i < ci.a.size(); ++i) expected += ci.a[i] * static_cast<double>(to.x[i] - from.x[i]);
    EXPECT_NEAR(pi.L(u, from, to), expected, 1e-12);
  }
}

TEST(PathIntegral, PathIndependence) {
  std::mt19937_64 rng(4);
  int pairs = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const ClosedInstance ci = random_closed(rng, true);
    const PathIntegral pi(ci.space, ci.F);
    for (int j = 0; j < 5; ++j, ++pairs) {
      const Point u = random_point(rng, ci.space.steps().dimension());
      const LiftedState from = random_lifted(rng, ci.space);
      const auto moves = random_moves(rng, ci.space, 10);
      const LiftedState to = pi.endpoint(from, moves);
      EXPECT_NEAR(pi.sum_along(u, from, moves), pi.L(u, from, to), 1e-12);
    }
  }
  EXPECT_EQ(pairs, 100);
}

TEST(PathIntegral, ShiftCovariance) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const ClosedInstance ci = random_closed(rng, true);
    const PathIntegral pi(ci.space, ci.F);
    const Point u = random_point(rng, ci.space.steps().dimension());
    const LiftedState from = random_lifted(rng, ci.space);
    const LiftedState to = pi.endpoint(from, random_moves(rng, ci.space, 8));
    const Point zero = ci.space.steps().origin();
    EXPECT_EQ(pi.L(u, from, to), pi.L(zero, {from.x + u, from.code}, {to.x + u, to.code}));
  }
}

TEST(PathIntegral, Cocycle) {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 20; ++rep) {
    const ClosedInstance ci = random_closed(rng, true);
    const PathIntegral pi(ci.space, ci.F);
    const int d = ci.space.steps().dimension();
    const std::size_t T = ci.space.tuple_count();
    const Point u = random_point(rng, d), x = random_point(rng, d), xb = random_point(rng, d);
    const std::size_t z = rng() % T, zb = rng() % T, zt = rng() % T;
    const double lhs = pi.f(u, z, zt, xb);
    const double rhs = pi.f(u, z, zb, x) + pi.f(u + x, zb, zt, xb - x);
    EXPECT_NEAR(lhs, rhs, 1e-12);
  }
}

TEST(PathIntegral, GradientRecovery) {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    const ClosedInstance ci = random_closed(rng, true);
    const PathIntegral pi(ci.space, ci.F);
    const ChainStateSpace& sp = ci.space;
    const std::size_t k = sp.step_count();
    const std::size_t zbar = rng() % sp.tuple_count();
    const Point zero = sp.steps().origin();
    for (std::size_t s = 0; s < sp.size(); ++s) {
      const Point u = sp.periodic().cell_point(sp.cell_of(s));
      for (std::size_t z = 0; z < k; ++z) {
        const std::size_t next_code = sp.code_of(sp.move(s, z));
        const double rec = pi.f(u, zbar, next_code, sp.displacement(s, z)) - pi.f(u, zbar, sp.code_of(s), zero);
        EXPECT_NEAR(rec, ci.F[s * k + z], 1e-12);
      }
    }
  }
}

TEST(PathIntegral, MeanZeroCorrectionRepairs) {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 10; ++rep) {
    const ClosedInstance ci = random_closed(rng, true);
    const ClassKReport before = check_class_K(ci.space, ci.F);
    EXPECT_TRUE(before.closed_loop);
    EXPECT_FALSE(before.mean_zero);
    const CorrectorTable fixed = mean_zero_correction(ci.space, ci.F);
    const ClassKReport after = check_class_K(ci.space, fixed);
    EXPECT_TRUE(after.passed());
    // The correction removes exactly the linear drift.
    const PathIntegral pi(ci.space, ci.F);
    const auto c = mean_zero_constants(pi);
    for (std::size_t z = 0; z < c.size(); ++z) {
      double expected = 0.0;
      for (std::size_t i = 0; i < ci.a.size(); ++i) expected += ci.a[i] * static_cast<double>(ci.space.steps()[z][i]);
      EXPECT_NEAR(c[z], expected, 1e-12);
    }
  }
}

}  // namespace
}  // namespace rwrp
