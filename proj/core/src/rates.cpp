#include "rwrp/rates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include "detail/parallel.hpp"
#include "rwrp/errors.hpp"
#include "rwrp/transfer.hpp"

namespace rwrp {

LambdaFn level1_lambda(const ChainStateSpace& space, const std::vector<double>& g) {
  const double base = free_energy_periodic(space, g).value;
  return [space, g, base](const std::vector<double>& t) { return free_energy_periodic(space, g, t).value - base; };
}

namespace {

std::vector<double> grid_point(std::size_t flat, int d, int G, double t_max) {
  const double h = 2 * t_max / (G - 1);
  std::vector<double> t(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    t[static_cast<std::size_t>(i)] = -t_max + h * static_cast<double>(flat % static_cast<std::size_t>(G));
    flat /= static_cast<std::size_t>(G);
  }
  return t;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Orthogonal projection of xi onto the affine hull of R, exact in rationals.
RationalVector project_to_affine_hull(const StepSet& steps, const RationalVector& xi) {
  const std::size_t d = xi.size();
  RationalVector base(d), rel(d);
  for (std::size_t i = 0; i < d; ++i) {
    base[i] = Rational(steps[0][static_cast<int>(i)]);
    rel[i] = xi[i] - base[i];
  }
  std::vector<RationalVector> ortho;
  for (std::size_t j = 1; j < steps.size(); ++j) {
    RationalVector e(d);
    for (std::size_t i = 0; i < d; ++i) e[i] = Rational(steps[j][static_cast<int>(i)]) - base[i];
    for (const RationalVector& o : ortho) {
      Rational num = 0, den = 0;
      for (std::size_t i = 0; i < d; ++i) {
        num += e[i] * o[i];
        den += o[i] * o[i];
      }
      const Rational c = num / den;
      for (std::size_t i = 0; i < d; ++i) e[i] -= c * o[i];
    }
    bool nonzero = false;
    for (const Rational& x : e) nonzero = nonzero || x != 0;
    if (nonzero) ortho.push_back(std::move(e));
  }
  RationalVector out = base;
  for (const RationalVector& o : ortho) {
    Rational num = 0, den = 0;
    for (std::size_t i = 0; i < d; ++i) {
      num += rel[i] * o[i];
      den += o[i] * o[i];
    }
    const Rational c = num / den;
    for (std::size_t i = 0; i < d; ++i) out[i] += c * o[i];
  }
  return out;
}

}  // namespace

RateCurve legendre_rate(const LambdaFn& lambda, int dimension, const std::vector<std::vector<double>>& zetas,
                        const LegendreOptions& options, const StepSet* hull) {
  if (dimension < 1) throw ValidationError("dimension must be positive", "dimension");
  if (options.grid_points < 2) throw ValidationError("t grid needs at least two points per axis", "grid_points");
  if (!(options.t_max > 0)) throw ValidationError("t_max must be positive", "t_max");
  const int d = dimension, G = options.grid_points;
  const double T = options.t_max, h = 2 * T / (G - 1);
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(G);

  std::vector<double> values(total);
  detail::parallel_for(total, options.threads, [&](std::size_t j) { values[j] = lambda(grid_point(j, d, G, T)); });

  RateCurve curve;
  curve.points.resize(zetas.size());
  detail::parallel_for(zetas.size(), options.threads, [&](std::size_t q) {
    std::vector<double> zeta = zetas[q];
    if (zeta.size() != static_cast<std::size_t>(d)) throw ValidationError("zeta has the wrong dimension", "zeta");
    RatePoint& pt = curve.points[q];
    pt.zeta = zeta;
    if (hull) {
      RationalVector xi;
      for (double z : zeta) xi.emplace_back(z);
      if (!hull_contains(*hull, xi)) {
        // rounding can push a point of a lower-dimensional hull off its affine span
        const RationalVector snapped = project_to_affine_hull(*hull, xi);
        double off = 0.0;
        for (std::size_t i = 0; i < xi.size(); ++i) off = std::max(off, std::abs(to_double(snapped[i] - xi[i])));
        if (off > options.snap_tolerance || !hull_contains(*hull, snapped)) {
          pt.infinite = true;
          pt.value = std::numeric_limits<double>::infinity();
          return;
        }
        for (std::size_t i = 0; i < xi.size(); ++i) zeta[i] = to_double(snapped[i]);
      }
    }
    std::size_t best = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < total; ++j) {
      const double v = dot(zeta, grid_point(j, d, G, T)) - values[j];
      if (v > best_val) {
        best_val = v;
        best = j;
      }
    }
    std::vector<double> t = grid_point(best, d, G, T);
    double current = best_val;
    for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
      const double before = current;
      for (int i = 0; i < d; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const double lo = std::max(-T, t[ui] - h), hi = std::min(T, t[ui] + h);
        auto neg = [&](double x) {
          std::vector<double> s = t;
          s[ui] = x;
          return -(dot(zeta, s) - lambda(s));
        };
        const auto [x, fx] = boost::math::tools::brent_find_minima(neg, lo, hi, std::numeric_limits<double>::digits / 2);
        if (-fx > current) {
          t[ui] = x;
          current = -fx;
        }
      }
      if (current - before <= options.tolerance) break;
    }
    pt.value = current;
    pt.t = t;
    for (double x : t) {
      if (std::abs(x) >= T - 1e-6 * h) pt.at_boundary = true;
    }
  });
  for (const RatePoint& pt : curve.points) {
    if (pt.at_boundary) {
      std::string z;
      for (double v : pt.zeta) z += (z.empty() ? "" : ",") + std::to_string(v);
      curve.warnings.push_back("maximizer at the t-grid edge for zeta=(" + z + "); rate is a lower bound");
    }
  }
  return curve;
}

std::vector<double> lln_velocity(const LambdaFn& lambda, int dimension, double h) {
  std::vector<double> v(static_cast<std::size_t>(dimension));
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::vector<double> plus(v.size(), 0.0), minus(v.size(), 0.0);
    plus[i] = h;
    minus[i] = -h;
    v[i] = (lambda(plus) - lambda(minus)) / (2 * h);
  }
  return v;
}

namespace {

struct TiltedPerron {
  double log_root;
  PairMeasure nu;
};

TiltedPerron tilted_perron(const ChainStateSpace& space, const std::vector<double>& g) {
  PerronOptions opts;
  opts.refine_vectors = true;
  const PerronResult p = perron(transfer_matrix(space, g), opts);
  TiltedPerron out{p.log_root, PairMeasure(space.size())};
  double total = 0.0;
  for (std::size_t s = 0; s < space.size(); ++s) total += (out.nu[s] = p.left[s] * p.right[s]);
  for (double& x : out.nu) x /= total;
  return out;
}

}  // namespace

PairMeasure tilted_stationary_measure(const ChainStateSpace& space, const std::vector<double>& g) {
  if (g.size() != space.size()) throw ValidationError("potential table has the wrong size", "g");
  return tilted_perron(space, g).nu;
}

PairMeasure project_measure(const ChainStateSpace& longer, const PairMeasure& mu) {
  if (longer.memory() < 1) throw ValidationError("projection needs memory >= 1", "memory");
  validate_pair_measure(longer, mu);
  const std::size_t k = longer.step_count();
  const std::size_t short_tuples = longer.tuple_count() / k;
  PairMeasure out(longer.cell_count() * short_tuples, 0.0);
  for (std::size_t s = 0; s < longer.size(); ++s) {
    out[longer.cell_of(s) * short_tuples + longer.code_of(s) / k] += mu[s];
  }
  return out;
}

Level2Result level2_rate_dual(const ChainStateSpace& space, const std::vector<double>& V, const PairMeasure& mu,
                              const Level2Options& options) {
  const std::size_t n = space.size();
  if (V.size() != n) throw ValidationError("potential table has the wrong size", "V");
  validate_pair_measure(space, mu);
  using Vec = Eigen::VectorXd;
  const Eigen::Map<const Vec> m(mu.data(), static_cast<Eigen::Index>(n));

  std::vector<double> buf(n);
  // f(g) = Lambda(g - V) - mu . g is convex; the rate is Lambda(-V) - min f.
  auto eval = [&](const Vec& g, Vec& grad) {
    for (std::size_t s = 0; s < n; ++s) buf[s] = g[static_cast<Eigen::Index>(s)] - V[s];
    const TiltedPerron tp = tilted_perron(space, buf);
    grad = Eigen::Map<const Vec>(tp.nu.data(), static_cast<Eigen::Index>(n)) - m;
    return tp.log_root - m.dot(g);
  };
  for (std::size_t s = 0; s < n; ++s) buf[s] = -V[s];
  const double base = tilted_perron(space, buf).log_root;

  Level2Result res;
  Vec g = Vec::Zero(static_cast<Eigen::Index>(n)), grad;
  double f = eval(g, grad);
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  int it = 0;
  bool stalled = false;
  for (; it < options.max_iterations; ++it) {
    if (grad.lpNorm<1>() <= options.tolerance) break;
    Vec dir = -H * grad;
    double slope = grad.dot(dir);
    if (slope >= 0) {
      H.setIdentity();
      dir = -grad;
      slope = grad.dot(dir);
    }
    double step = 1.0;
    Vec g_new, grad_new;
    double f_new = f;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      g_new = g + step * dir;
      try {
        f_new = eval(g_new, grad_new);
      } catch (const NonConvergenceError&) {
        step *= 0.5;
        continue;
      }
      if (f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      stalled = true;
      break;
    }
    const Vec s = g_new - g, y = grad_new - grad;
    const double sy = s.dot(y);
    if (sy > 1e-16) {
      const double r = 1.0 / sy;
      const Vec Hy = H * y;
      H += (r * r * y.dot(Hy) + r) * (s * s.transpose()) - r * (Hy * s.transpose() + s * Hy.transpose());
    }
    stalled = !(f_new < f);
    g = std::move(g_new);
    grad = std::move(grad_new);
    f = f_new;
    if (stalled) break;
  }
  res.iterations = it;
  res.gradient_norm = grad.lpNorm<1>();
  res.converged = res.gradient_norm <= options.tolerance ||
                  (stalled && res.gradient_norm <= options.stall_tolerance);
  res.value = base - f;
  res.g.assign(g.data(), g.data() + g.size());
  if (!res.converged && options.require_convergence) {
    char msg[96];
    std::snprintf(msg, sizeof msg, "level-2 dual ascent stopped with gradient norm %.3e", res.gradient_norm);
    throw NonConvergenceError(msg,
                              res.gradient_norm);
  }
  return res;
}

Level2EntropyResult level2_rate_entropy(const ChainStateSpace& space, const std::vector<double>& V,
                                        const PairMeasure& mu, const EntropyOptions& options) {
  if (V.size() != space.size()) throw ValidationError("potential table has the wrong size", "V");
  const EntropyResult h = entropy_H(space, mu, options);
  Level2EntropyResult res;
  if (h.infinite) {
    res.infinite = true;
    res.value = res.entropy = std::numeric_limits<double>::infinity();
    return res;
  }
  std::vector<double> minus_v(V.size());
  double ev = 0.0;
  for (std::size_t s = 0; s < V.size(); ++s) {
    minus_v[s] = -V[s];
    ev += mu[s] * V[s];
  }
  res.entropy = h.value;
  res.value = h.value + ev + free_energy_periodic(space, minus_v).value;
  return res;
}

}  // namespace rwrp
