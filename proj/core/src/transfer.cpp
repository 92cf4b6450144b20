#include "rwrp/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rwrp/errors.hpp"

namespace rwrp {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

LogValue::LogValue(double v) : v_(v), empty_(false) {
  if (std::isnan(v)) throw ValidationError("log value is NaN", "log_value");
}

double LogValue::value() const {
  if (empty_) throw NoPathError("empty sum: no admissible path reaches the endpoint");
  return v_;
}

double log_add(double a, double b) noexcept {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

double log_sum_exp(const std::vector<double>& xs) {
  if (xs.empty()) return kNegInf;
  const double m = *std::max_element(xs.begin(), xs.end());
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

std::size_t DPStateHash::operator()(const DPState& s) const noexcept {
  return PointHash{}(s.pos) ^ mix64(s.code + 0x9e3779b97f4a7c15ULL);
}

PathDP::PathDP(Environment env, StepSet steps, Potential g, std::size_t state_budget)
    : env_(std::move(env)),
      steps_(std::move(steps)),
      g_(std::move(g)),
      budget_(state_budget),
      tuples_(rwrp::tuple_count(g_.memory(), steps_.size())),
      lead_(g_.memory() > 0 ? rwrp::tuple_count(g_.memory() - 1, steps_.size()) : 1),
      log_k_(std::log(static_cast<double>(steps_.size()))) {
  if (env_.dimension() != steps_.dimension()) {
    throw ValidationError("environment and step set dimensions differ", "dimension");
  }
}

void PathDP::charge(std::size_t n) {
  used_ += n;
  if (used_ > budget_) {
    throw StateBudgetError("dynamic program exceeded the state budget of " +
                           std::to_string(budget_) + " state-layers");
  }
}

DPLayer PathDP::initial() {
  DPLayer layer;
  const double w = -static_cast<double>(memory()) * log_k_;
  for (std::size_t c = 0; c < tuples_; ++c) layer.emplace(DPState{steps_.origin(), c}, w);
  charge(layer.size());
  return layer;
}

double PathDP::g_at(const DPState& s) const {
  const auto t = tuple_from_code(s.code, memory(), steps_.size());
  return g_(env_, s.pos, t);
}

DPState PathDP::move(const DPState& s, std::size_t z) const {
  const std::size_t k = steps_.size();
  return {s.pos + steps_[taken_step(s, z)], memory() == 0 ? 0 : (s.code % lead_) * k + z};
}

DPLayer PathDP::advance(const DPLayer& layer, const std::vector<double>& tilt) {
  DPLayer out;
  out.reserve(layer.size() * 2);
  const std::size_t k = steps_.size();
  for (const auto& [s, w] : layer) {
    const double lw = w + log_step_weight(s);
    for (std::size_t z = 0; z < k; ++z) {
      double term = lw;
      if (!tilt.empty()) {
        const Point& x = steps_[taken_step(s, z)];
        for (int i = 0; i < x.dim(); ++i) term += tilt[static_cast<std::size_t>(i)] * static_cast<double>(x[i]);
      }
      auto [it, fresh] = out.try_emplace(move(s, z), term);
      if (!fresh) it->second = log_add(it->second, term);
    }
  }
  charge(out.size());
  return out;
}

LogValue layer_total(const DPLayer& layer, const std::optional<Point>& endpoint) {
  double total = kNegInf;
  bool any = false;
  for (const auto& [s, w] : layer) {
    if (endpoint && s.pos != *endpoint) continue;
    total = log_add(total, w);
    any = true;
  }
  return any ? LogValue(total) : LogValue::empty();
}

SparseMatrix transfer_matrix(const ChainStateSpace& space, const std::vector<double>& g,
                             const std::vector<double>& tilt) {
  if (g.size() != space.size()) throw ValidationError("g table size mismatch", "g");
  if (!tilt.empty() && tilt.size() != static_cast<std::size_t>(space.steps().dimension())) {
    throw ValidationError("tilt dimension mismatch", "tilt");
  }
  const std::size_t k = space.step_count();
  const double log_k = std::log(static_cast<double>(k));
  std::vector<std::size_t> rows, cols;
  std::vector<double> lw;
  rows.reserve(space.size() * k);
  cols.reserve(space.size() * k);
  lw.reserve(space.size() * k);
  for (std::size_t s = 0; s < space.size(); ++s) {
    for (std::size_t z = 0; z < k; ++z) {
      double w = g[s] - log_k;
      if (!tilt.empty()) {
        const Point& x = space.displacement(s, z);
        for (int i = 0; i < x.dim(); ++i) w += tilt[static_cast<std::size_t>(i)] * static_cast<double>(x[i]);
      }
      rows.push_back(s);
      cols.push_back(space.move(s, z));
      lw.push_back(w);
    }
  }
  return SparseMatrix::from_log_triplets(space.size(), rows, cols, lw);
}

FreeEnergyResult free_energy_periodic(const ChainStateSpace& space, const std::vector<double>& g,
                                      const std::vector<double>& tilt,
                                      const PerronOptions& options) {
  const PerronResult p = perron(transfer_matrix(space, g, tilt), options);
  FreeEnergyResult r;
  r.value = p.log_root;
  r.iteration_contraction = p.iteration_contraction;
  r.iterations = p.iterations;
  r.right = p.right;
  r.left = p.left;
  r.warnings = p.warnings;
  if (!space.ergodic()) {
    r.warnings.push_back("shifts by the step group are not transitive on the torus");
  }
  return r;
}

FreeEnergyResult free_energy_periodic(const ChainStateSpace& space, const Potential& g,
                                      const std::vector<double>& tilt,
                                      const PerronOptions& options) {
  return free_energy_periodic(space, space.tabulate(g), tilt, options);
}

std::vector<double> free_energy_sequence(const ChainStateSpace& space, const std::vector<double>& g,
                                         std::size_t start_cell, int n_max) {
  if (g.size() != space.size()) throw ValidationError("g table size mismatch", "g");
  if (n_max < 1) throw ValidationError("n_max must be positive", "n_max");
  const std::size_t k = space.step_count();
  const double gmax = *std::max_element(g.begin(), g.end());
  std::vector<double> w(g.size());
  for (std::size_t s = 0; s < g.size(); ++s) w[s] = std::exp(g[s] - gmax) / static_cast<double>(k);

  std::vector<double> v(space.size(), 0.0), next;
  for (std::size_t c = 0; c < space.tuple_count(); ++c) {
    v[space.index(start_cell, c)] = 1.0 / static_cast<double>(space.tuple_count());
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_max));
  double log_z = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    next.assign(space.size(), 0.0);
    for (std::size_t s = 0; s < space.size(); ++s) {
      if (v[s] == 0.0) continue;
      const double m = v[s] * w[s];
      for (std::size_t z = 0; z < k; ++z) next[space.move(s, z)] += m;
    }
    double total = 0.0;
    for (double x : next) total += x;
    for (double& x : next) x /= total;
    log_z += std::log(total) + gmax;
    v.swap(next);
    out.push_back(log_z / n);
  }
  return out;
}

namespace {

// The chain space tabulates g on base cells; an environment offset only moves the start cell.
ChainStateSpace torus_space(const Environment& env, const StepSet& steps, const Potential& g) {
  return ChainStateSpace(env.periodic(), steps, g.memory());
}

}  // namespace

LogValue log_partition(const Environment& env, const StepSet& steps, const Potential& g, int n,
                       const std::optional<Point>& endpoint, const TransferOptions& options) {
  if (n < 1) throw ValidationError("n must be at least 1", "n");
  if (env.is_periodic() && !endpoint) {
    const ChainStateSpace space = torus_space(env, steps, g);
    const auto seq = free_energy_sequence(space, space.tabulate(g),
                                          env.cell_at(steps.origin()), n);
    return LogValue(seq.back() * n);
  }
  PathDP dp(env, steps, g, options.state_budget);
  DPLayer layer = dp.initial();
  for (int k = 0; k < n; ++k) layer = dp.advance(layer);
  return layer_total(layer, endpoint);
}

std::vector<double> free_energy_sequence(const Environment& env, const StepSet& steps,
                                         const Potential& g, int n_max,
                                         const TransferOptions& options) {
  if (n_max < 1) throw ValidationError("n_max must be positive", "n_max");
  if (env.is_periodic()) {
    const ChainStateSpace space = torus_space(env, steps, g);
    return free_energy_sequence(space, space.tabulate(g), env.cell_at(steps.origin()),
                                n_max);
  }
  PathDP dp(env, steps, g, options.state_budget);
  DPLayer layer = dp.initial();
  std::vector<double> out;
  for (int n = 1; n <= n_max; ++n) {
    layer = dp.advance(layer);
    out.push_back(layer_total(layer).value() / n);
  }
  return out;
}

std::vector<LogValue> constrained_free_energy(const Environment& env, const StepSet& steps,
                                              const Potential& g, const RationalVector& xi,
                                              int n_max, const TransferOptions& options) {
  if (n_max < 1) throw ValidationError("n_max must be positive", "n_max");
  const DirectionPath path = canonical_path(steps, xi);
  PathDP dp(env, steps, g, options.state_budget);
  DPLayer layer = dp.initial();
  std::vector<LogValue> out;
  for (int n = 1; n <= n_max; ++n) {
    layer = dp.advance(layer);
    const LogValue z = layer_total(layer, path.point_at(n));
    out.push_back(z.is_empty() ? z : LogValue(z.value() / n));
  }
  return out;
}

double mean_min_lower_bound(const ChainStateSpace& space, const std::vector<double>& g) {
  if (g.size() != space.size()) throw ValidationError("g table size mismatch", "g");
  double sum = 0.0;
  for (std::size_t c = 0; c < space.cell_count(); ++c) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < space.tuple_count(); ++t) m = std::min(m, g[space.index(c, t)]);
    sum += m;
  }
  return sum / static_cast<double>(space.cell_count());
}

double max_cycle_mean_upper_bound(const ChainStateSpace& space, const std::vector<double>& g) {
  if (g.size() != space.size()) throw ValidationError("g table size mismatch", "g");
  const std::size_t n = space.size();
  constexpr std::size_t kKarpLimit = 2048;
  if (n > kKarpLimit) {
    throw BoundExceededError("max cycle mean needs O(N^2) memory; state space too large",
                             static_cast<long long>(kKarpLimit));
  }
  const std::size_t k = space.step_count();
  // d[j][v]: heaviest j-edge walk ending at v, any start.
  std::vector<std::vector<double>> d(n + 1, std::vector<double>(n, kNegInf));
  std::fill(d[0].begin(), d[0].end(), 0.0);
  for (std::size_t j = 1; j <= n; ++j) {
    for (std::size_t u = 0; u < n; ++u) {
      if (d[j - 1][u] == kNegInf) continue;
      const double w = d[j - 1][u] + g[u];
      for (std::size_t z = 0; z < k; ++z) {
        double& t = d[j][space.move(u, z)];
        t = std::max(t, w);
      }
    }
  }
  double best = kNegInf;
  for (std::size_t v = 0; v < n; ++v) {
    if (d[n][v] == kNegInf) continue;
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (d[j][v] == kNegInf) continue;
      worst = std::min(worst, (d[n][v] - d[j][v]) / static_cast<double>(n - j));
    }
    best = std::max(best, worst);
  }
  return best;
}

}  // namespace rwrp
