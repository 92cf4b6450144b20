#include "rwrp/variational.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_map>

#include <Eigen/Dense>

#include "rwrp/errors.hpp"
#include "rwrp/transfer.hpp"

namespace rwrp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_dense_size(const ChainStateSpace& space) {
  if (space.size() > kDenseSpectrumLimit) {
    throw BoundExceededError("dense solver limited to " + std::to_string(kDenseSpectrumLimit) + " states",
                             static_cast<long long>(kDenseSpectrumLimit));
  }
}

Eigen::MatrixXd kernel_matrix(const ChainStateSpace& space, const StepKernel& q) {
  const auto n = static_cast<Eigen::Index>(space.size());
  const std::size_t k = space.step_count();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t s = 0; s < space.size(); ++s) {
    for (std::size_t z = 0; z < k; ++z) {
      p(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(space.move(s, z))) += q[s * k + z];
    }
  }
  return p;
}

// Max-flow feasibility of a coupling of mu with itself on the move graph (Dinic).
class FlowNetwork {
 public:
  explicit FlowNetwork(std::size_t n) : adj_(n) {}
  void add(std::size_t u, std::size_t v, double cap) {
    adj_[u].push_back(edges_.size());
    edges_.push_back({v, cap});
    adj_[v].push_back(edges_.size());
    edges_.push_back({u, 0.0});
  }
  double max_flow(std::size_t s, std::size_t t) {
    double total = 0.0;
    while (levels(s, t)) {
      next_.assign(adj_.size(), 0);
      for (double f; (f = push(s, t, kInf)) > 1e-15;) total += f;
    }
    return total;
  }

 private:
  struct Edge {
    std::size_t to;
    double cap;
  };
  bool levels(std::size_t s, std::size_t t) {
    level_.assign(adj_.size(), -1);
    std::deque<std::size_t> queue{s};
    level_[s] = 0;
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (std::size_t e : adj_[u]) {
        if (edges_[e].cap > 1e-15 && level_[edges_[e].to] < 0) {
          level_[edges_[e].to] = level_[u] + 1;
          queue.push_back(edges_[e].to);
        }
      }
    }
    return level_[t] >= 0;
  }
  double push(std::size_t u, std::size_t t, double f) {
    if (u == t) return f;
    for (std::size_t& i = next_[u]; i < adj_[u].size(); ++i) {
      const std::size_t e = adj_[u][i];
      Edge& ed = edges_[e];
      if (ed.cap <= 1e-15 || level_[ed.to] != level_[u] + 1) continue;
      const double got = push(ed.to, t, std::min(f, ed.cap));
      if (got > 1e-15) {
        ed.cap -= got;
        edges_[e ^ 1].cap += got;
        return got;
      }
    }
    return 0.0;
  }
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<Edge> edges_;
  std::vector<int> level_;
  std::vector<std::size_t> next_;
};

bool coupling_feasible(const ChainStateSpace& space, const PairMeasure& mu) {
  const std::size_t n = space.size();
  const std::size_t k = space.step_count();
  FlowNetwork net(2 * n + 2);
  const std::size_t src = 2 * n, sink = 2 * n + 1;
  for (std::size_t s = 0; s < n; ++s) {
    if (mu[s] <= 0.0) continue;
    net.add(src, s, mu[s]);
    net.add(n + s, sink, mu[s]);
    for (std::size_t z = 0; z < k; ++z) {
      const std::size_t j = space.move(s, z);
      if (mu[j] > 0.0) net.add(s, n + j, 2.0);
    }
  }
  return net.max_flow(src, sink) >= 1.0 - 1e-9;
}

double log_sum_exp_row(const std::vector<double>& xs) {
  double m = -kInf;
  for (double x : xs) m = std::max(m, x);
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

void validate_pair_measure(const ChainStateSpace& space, const PairMeasure& mu) {
  if (mu.size() != space.size()) {
    throw ValidationError("measure has " + std::to_string(mu.size()) + " entries, expected " +
                              std::to_string(space.size()),
                          "mu");
  }
  double total = 0.0;
  for (double p : mu) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw ValidationError("measure has a negative or non-finite entry", "mu");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ValidationError("measure sums to " + std::to_string(total) + ", expected 1", "mu");
  }
}

void validate_step_kernel(const ChainStateSpace& space, const StepKernel& q) {
  const std::size_t k = space.step_count();
  if (q.size() != space.size() * k) throw ValidationError("kernel table has the wrong size", "q");
  for (std::size_t s = 0; s < space.size(); ++s) {
    double total = 0.0;
    for (std::size_t z = 0; z < k; ++z) {
      const double p = q[s * k + z];
      if (!(p >= 0.0) || !std::isfinite(p)) throw ValidationError("kernel has a negative entry", "q");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw ValidationError("kernel row " + std::to_string(s) + " sums to " + std::to_string(total), "q");
    }
  }
}

StepKernel uniform_kernel(const ChainStateSpace& space) {
  return StepKernel(space.size() * space.step_count(), 1.0 / static_cast<double>(space.step_count()));
}

PairMeasure stationary_measure(const ChainStateSpace& space, const StepKernel& q) {
  validate_step_kernel(space, q);
  check_dense_size(space);
  const auto n = static_cast<Eigen::Index>(space.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - kernel_matrix(space, q).transpose();
  a.row(0).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(0) = 1.0;
  const Eigen::VectorXd pi = a.fullPivLu().solve(rhs);
  PairMeasure mu(space.size());
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) total += (mu[static_cast<std::size_t>(i)] = std::max(0.0, pi(i)));
  for (double& p : mu) p /= total;
  return mu;
}

double relative_entropy(const PairMeasure& mu, const StepKernel& q, std::size_t step_count) {
  if (q.size() != mu.size() * step_count) throw ValidationError("kernel table has the wrong size", "q");
  const double k = static_cast<double>(step_count);
  double total = 0.0;
  for (std::size_t s = 0; s < mu.size(); ++s) {
    if (mu[s] == 0.0) continue;
    double row = 0.0;
    for (std::size_t z = 0; z < step_count; ++z) {
      const double p = q[s * step_count + z];
      if (p > 0.0) row += p * std::log(p * k);
    }
    total += mu[s] * row;
  }
  return total;
}

EntropyResult entropy_H(const ChainStateSpace& space, const PairMeasure& mu, const EntropyOptions& options) {
  validate_pair_measure(space, mu);
  const std::size_t n = space.size();
  const std::size_t k = space.step_count();
  EntropyResult res;
  if (!coupling_feasible(space, mu)) {
    res.infinite = true;
    res.value = kInf;
    return res;
  }
  // alpha(s, z) = (mu_s / |R|) x_s y_{S_z s}
  std::vector<double> x(n, 0.0), y(n, 0.0), inflow(n);
  for (std::size_t s = 0; s < n; ++s) y[s] = mu[s] > 0.0 ? 1.0 : 0.0;
  const double kd = static_cast<double>(k);
  for (int it = 1; it <= options.max_iterations; ++it) {
    for (std::size_t s = 0; s < n; ++s) {
      if (mu[s] == 0.0) continue;
      double sy = 0.0;
      for (std::size_t z = 0; z < k; ++z) sy += y[space.move(s, z)];
      x[s] = kd / sy;
    }
    std::fill(inflow.begin(), inflow.end(), 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      if (mu[s] == 0.0) continue;
      const double a = mu[s] / kd * x[s];
      for (std::size_t z = 0; z < k; ++z) inflow[space.move(s, z)] += a;
    }
    for (std::size_t j = 0; j < n; ++j) y[j] = mu[j] > 0.0 ? mu[j] / inflow[j] : 0.0;
    // Columns now match exactly; measure the row residual.
    double resid = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      if (mu[s] == 0.0) continue;
      double sy = 0.0;
      for (std::size_t z = 0; z < k; ++z) sy += y[space.move(s, z)];
      resid += std::abs(mu[s] / kd * x[s] * sy - mu[s]);
    }
    res.iterations = it;
    res.residual = resid;
    if (resid <= options.tolerance) break;
  }
  if (res.residual > options.tolerance) {
    throw NonConvergenceError("entropy scaling did not reach the marginal tolerance", res.residual);
  }
  res.q.assign(n * k, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    if (mu[s] == 0.0) {
      for (std::size_t z = 0; z < k; ++z) res.q[s * k + z] = 1.0 / kd;
      continue;
    }
    double row = 0.0;
    for (std::size_t z = 0; z < k; ++z) row += (res.q[s * k + z] = x[s] * y[space.move(s, z)] / kd);
    for (std::size_t z = 0; z < k; ++z) res.q[s * k + z] /= row;
  }
  res.value = relative_entropy(mu, res.q, k);
  return res;
}

DualResult dual_Hsharp(const ChainStateSpace& space, const std::vector<double>& g, const DualOptions& options) {
  if (g.size() != space.size()) throw ValidationError("g table size mismatch", "g");
  check_dense_size(space);
  const std::size_t n = space.size();
  const std::size_t k = space.step_count();
  const double log_k = std::log(static_cast<double>(k));
  const auto N = static_cast<Eigen::Index>(n);

  std::vector<double> h(n, 0.0);
  StepKernel q(n * k);
  std::vector<double> row(k);
  DualResult res;
  for (int it = 1; it <= options.max_iterations; ++it) {
    // Improvement: q(s, .) proportional to e^{h(S_z s)}.
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t z = 0; z < k; ++z) row[z] = h[space.move(s, z)];
      const double lse = log_sum_exp_row(row);
      for (std::size_t z = 0; z < k; ++z) q[s * k + z] = std::exp(row[z] - lse);
    }
    // Evaluation: h_s + eta - sum_z q h(S_z s) = g_s - KL(q_s | uniform), h_0 = 0.
    Eigen::MatrixXd b = Eigen::MatrixXd::Identity(N, N) - kernel_matrix(space, q);
    b.col(0).setOnes();
    Eigen::VectorXd r(N);
    for (std::size_t s = 0; s < n; ++s) {
      double kl = 0.0;
      for (std::size_t z = 0; z < k; ++z) {
        const double p = q[s * k + z];
        if (p > 0.0) kl += p * (std::log(p) + log_k);
      }
      r(static_cast<Eigen::Index>(s)) = g[s] - kl;
    }
    const Eigen::VectorXd u = b.partialPivLu().solve(r);
    const double eta = u(0);
    h[0] = 0.0;
    for (std::size_t s = 1; s < n; ++s) h[s] = u(static_cast<Eigen::Index>(s));

    // Soft Bellman bound: eta* <= max_s [g_s + log mean_z e^{h(S_z s)} - h_s].
    double upper = -kInf;
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t z = 0; z < k; ++z) row[z] = h[space.move(s, z)];
      upper = std::max(upper, g[s] + log_sum_exp_row(row) - log_k - h[s]);
    }
    res.iterations = it;
    res.gap = std::max(0.0, upper - eta);
    res.value = eta;
    if (res.gap <= options.tolerance) break;
  }
  if (res.gap > options.tolerance) {
    throw NonConvergenceError("soft policy iteration did not close the duality gap", res.gap);
  }
  res.q = q;
  res.mu = stationary_measure(space, q);
  double eg = 0.0;
  for (std::size_t s = 0; s < n; ++s) eg += res.mu[s] * g[s];
  res.value = eg - relative_entropy(res.mu, q, k);
  return res;
}

CorrectorTable gradient_corrector(const ChainStateSpace& space, const std::vector<double>& h) {
  if (h.size() != space.size()) throw ValidationError("h has the wrong size", "h");
  const std::size_t k = space.step_count();
  CorrectorTable F(space.size() * k);
  for (std::size_t s = 0; s < space.size(); ++s) {
    for (std::size_t z = 0; z < k; ++z) F[s * k + z] = h[space.move(s, z)] - h[s];
  }
  return F;
}

KValue K_functional(const ChainStateSpace& space, const std::vector<double>& g, const CorrectorTable& F) {
  const std::size_t k = space.step_count();
  if (g.size() != space.size()) throw ValidationError("g table size mismatch", "g");
  if (F.size() != space.size() * k) throw ValidationError("corrector table has the wrong size", "F");
  const double log_k = std::log(static_cast<double>(k));
  std::vector<double> row(k);
  KValue best{-kInf, 0};
  for (std::size_t s = 0; s < space.size(); ++s) {
    for (std::size_t z = 0; z < k; ++z) row[z] = g[s] + F[s * k + z];
    const double v = log_sum_exp_row(row) - log_k;
    if (v > best.value) best = {v, s};
  }
  return best;
}

KbarResult Kbar_minimize(const ChainStateSpace& space, const std::vector<double>& g, const KbarOptions& options) {
  const SparseMatrix m = transfer_matrix(space, g);
  if (strongly_connected_components(m).size() != 1) {
    throw ReducibleOperatorError("corrector minimization needs an irreducible operator");
  }
  const std::size_t n = space.size();
  std::vector<double> v(n, 1.0);
  if (options.init == KbarInit::kPerron) {
    PerronOptions po;
    po.left_vector = false;
    v = perron(m, po).right;
  }
  double shift = 0.0;
  {
    double lo = kInf, hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t e = m.row_start[i]; e < m.row_start[i + 1]; ++e) s += m.val[e];
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    shift = 0.5 * (lo + hi);
  }
  // K(log v) = log max_s (M v)_s / v_s. A step v <- (M + sI) v never raises it.
  KbarResult res;
  std::vector<double> mv;
  double lo = 0.0, hi = 0.0;
  for (int it = 0; it <= options.max_iterations; ++it) {
    m.multiply(v, mv);
    lo = kInf;
    hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      lo = std::min(lo, mv[i] / v[i]);
      hi = std::max(hi, mv[i] / v[i]);
    }
    res.iterations = it;
    if (std::log(hi) - std::log(lo) <= options.tolerance) break;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += (v[i] = mv[i] + shift * v[i]);
    for (double& x : v) x /= total;
  }
  res.lower_bound = std::log(lo) + m.log_scale;
  res.h.resize(n);
  for (std::size_t i = 0; i < n; ++i) res.h[i] = std::log(v[i]) - std::log(v[0]);
  const KValue kv = K_functional(space, g, gradient_corrector(space, res.h));
  res.value = kv.value;
  res.argmax_state = kv.argmax_state;
  if (res.value - res.lower_bound > std::max(options.tolerance, 1e-11) * 10) {
    throw NonConvergenceError("corrector minimization stopped at K = " + std::to_string(res.value),
                              res.value - res.lower_bound);
  }
  return res;
}

ClassKReport check_class_K(const ChainStateSpace& space, const CorrectorTable& F, double tolerance) {
  const std::size_t n = space.size();
  const std::size_t k = space.step_count();
  const int d = space.steps().dimension();
  if (F.size() != n * k) throw ValidationError("corrector table has the wrong size", "F");
  ClassKReport rep;
  for (double f : F) {
    if (!std::isfinite(f)) rep.integrable = false;
  }
  if (!rep.integrable) return rep;

  // Undirected spanning tree from state 0: tree sums P and displacements X.
  std::vector<double> P(n, 0.0);
  std::vector<std::vector<double>> X(n, std::vector<double>(static_cast<std::size_t>(d), 0.0));
  std::vector<char> seen(n, 0);
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> incoming(n);  // (source, z)
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t z = 0; z < k; ++z) incoming[space.move(s, z)].emplace_back(s, z);
  }
  std::deque<std::size_t> queue{0};
  seen[0] = 1;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t z = 0; z < k; ++z) {
      const std::size_t v = space.move(u, z);
      if (seen[v]) continue;
      seen[v] = 1;
      P[v] = P[u] + F[u * k + z];
      const Point& dx = space.displacement(u, z);
      for (int i = 0; i < d; ++i) X[v][static_cast<std::size_t>(i)] = X[u][static_cast<std::size_t>(i)] + static_cast<double>(dx[i]);
      queue.push_back(v);
    }
    for (auto [w, z] : incoming[u]) {
      if (seen[w]) continue;
      seen[w] = 1;
      P[w] = P[u] - F[w * k + z];
      const Point& dx = space.displacement(w, z);
      for (int i = 0; i < d; ++i) X[w][static_cast<std::size_t>(i)] = X[u][static_cast<std::size_t>(i)] - static_cast<double>(dx[i]);
      queue.push_back(w);
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw ValidationError("state graph is not connected", "F");
  }
  // Each edge closes a (signed) cycle with sum S_e and displacement D_e; fit S = a . D.
  const auto E = static_cast<Eigen::Index>(n * k);
  Eigen::MatrixXd D(E, d);
  Eigen::VectorXd S(E);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t z = 0; z < k; ++z) {
      const auto e = static_cast<Eigen::Index>(s * k + z);
      const std::size_t v = space.move(s, z);
      S(e) = P[s] + F[s * k + z] - P[v];
      const Point& dx = space.displacement(s, z);
      for (int i = 0; i < d; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        D(e, i) = X[s][ii] + static_cast<double>(dx[i]) - X[v][ii];
      }
    }
  }
  const Eigen::VectorXd a = D.completeOrthogonalDecomposition().solve(S);
  rep.drift.assign(a.data(), a.data() + a.size());
  rep.fit_residual = (S - D * a).cwiseAbs().maxCoeff();
  rep.closed_loop = rep.fit_residual <= tolerance;

  if (!rep.closed_loop) {
    // Breadth-first search on the lift for two paths to one lifted state with different sums.
    struct Node {
      std::size_t parent;
      std::size_t step;
      double sum;
    };
    struct Key {
      Point x;
      std::size_t state;
      bool operator==(const Key&) const = default;
    };
    struct KeyHash {
      std::size_t operator()(const Key& key) const noexcept { return PointHash{}(key.x) ^ mix64(key.state + 1); }
    };
    constexpr std::size_t kBudget = 200'000;
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::size_t budget = kBudget;
    for (std::size_t root = 0; root < n && !rep.loop_witness && budget > 0; ++root) {
      std::vector<Node> nodes{{kNone, 0, 0.0}};
      std::vector<Key> keys{{space.steps().origin(), root}};
      std::unordered_map<Key, std::size_t, KeyHash> index{{keys[0], 0}};
      auto path_to = [&](std::size_t id) {
        std::vector<std::size_t> path;
        for (; nodes[id].parent != kNone; id = nodes[id].parent) path.push_back(nodes[id].step);
        std::reverse(path.begin(), path.end());
        return path;
      };
      for (std::size_t head = 0; head < nodes.size() && !rep.loop_witness && budget > 0; ++head) {
        const Key cur = keys[head];
        for (std::size_t z = 0; z < k; ++z) {
          const Key next{cur.x + space.displacement(cur.state, z), space.move(cur.state, z)};
          const double sum = nodes[head].sum + F[cur.state * k + z];
          auto it = index.find(next);
          if (it == index.end()) {
            index.emplace(next, nodes.size());
            nodes.push_back({head, z, sum});
            keys.push_back(next);
            --budget;
            continue;
          }
          if (std::abs(nodes[it->second].sum - sum) <= tolerance) continue;
          LoopWitness w;
          w.start_state = root;
          w.path_a = path_to(head);
          w.path_a.push_back(z);
          w.sum_a = sum;
          w.path_b = path_to(it->second);
          w.sum_b = nodes[it->second].sum;
          rep.loop_witness = std::move(w);
          break;
        }
      }
    }
  }

  // Mean zero: moves (z, tau_1..tau_l) from (omega, tau) return to tau after a shift.
  rep.mean_zero = true;
  const int l = space.memory();
  for (std::size_t code = 0; code < space.tuple_count() && rep.mean_zero; ++code) {
    const auto tau = tuple_from_code(code, l, k);
    for (std::size_t z = 0; z < k; ++z) {
      std::vector<std::size_t> moves{z};
      moves.insert(moves.end(), tau.begin(), tau.end());
      double mean = 0.0;
      for (std::size_t c = 0; c < space.cell_count(); ++c) {
        std::size_t s = space.index(c, code);
        for (std::size_t a : moves) {
          mean += F[s * k + a];
          s = space.move(s, a);
        }
      }
      mean /= static_cast<double>(space.cell_count());
      if (std::abs(mean) > tolerance) {
        rep.mean_zero = false;
        rep.mean_zero_witness = MeanZeroWitness{code, z, mean};
        break;
      }
    }
  }
  return rep;
}

}  // namespace rwrp
