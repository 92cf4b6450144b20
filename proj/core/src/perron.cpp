#include "rwrp/perron.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "rwrp/errors.hpp"

namespace rwrp {

SparseMatrix SparseMatrix::from_log_triplets(std::size_t n, const std::vector<std::size_t>& rows,
                                             const std::vector<std::size_t>& cols,
                                             const std::vector<double>& log_weights) {
  SparseMatrix m;
  m.n = n;
  m.log_scale = log_weights.empty()
                    ? 0.0
                    : *std::max_element(log_weights.begin(), log_weights.end());
  if (!std::isfinite(m.log_scale)) m.log_scale = 0.0;
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rows[a] != rows[b] ? rows[a] < rows[b] : cols[a] < cols[b];
  });
  m.row_start.assign(n + 1, 0);
  for (std::size_t k : order) {
    m.col.push_back(cols[k]);
    m.val.push_back(std::exp(log_weights[k] - m.log_scale));
    ++m.row_start[rows[k] + 1];
  }
  for (std::size_t i = 0; i < n; ++i) m.row_start[i + 1] += m.row_start[i];
  // Merge duplicates within each row.
  SparseMatrix merged;
  merged.n = n;
  merged.log_scale = m.log_scale;
  merged.row_start.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = m.row_start[i]; k < m.row_start[i + 1]; ++k) {
      if (k > m.row_start[i] && m.col[k] == m.col[k - 1]) {
        merged.val.back() += m.val[k];
      } else {
        merged.col.push_back(m.col[k]);
        merged.val.push_back(m.val[k]);
      }
    }
    merged.row_start[i + 1] = merged.col.size();
  }
  return merged;
}

SparseMatrix SparseMatrix::transposed() const {
  SparseMatrix t;
  t.n = n;
  t.log_scale = log_scale;
  t.row_start.assign(n + 1, 0);
  for (std::size_t c : col) ++t.row_start[c + 1];
  for (std::size_t i = 0; i < n; ++i) t.row_start[i + 1] += t.row_start[i];
  t.col.resize(col.size());
  t.val.resize(val.size());
  std::vector<std::size_t> fill(t.row_start.begin(), t.row_start.end() - 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = row_start[i]; k < row_start[i + 1]; ++k) {
      const std::size_t pos = fill[col[k]]++;
      t.col[pos] = i;
      t.val[pos] = val[k];
    }
  }
  return t;
}

SparseMatrix SparseMatrix::restricted(const std::vector<std::size_t>& keep) const {
  std::vector<std::size_t> map(n, std::numeric_limits<std::size_t>::max());
  for (std::size_t i = 0; i < keep.size(); ++i) map[keep[i]] = i;
  SparseMatrix r;
  r.n = keep.size();
  r.log_scale = log_scale;
  r.row_start.assign(r.n + 1, 0);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    for (std::size_t k = row_start[keep[i]]; k < row_start[keep[i] + 1]; ++k) {
      if (map[col[k]] == std::numeric_limits<std::size_t>::max()) continue;
      r.col.push_back(map[col[k]]);
      r.val.push_back(val[k]);
    }
    r.row_start[i + 1] = r.col.size();
  }
  return r;
}

void SparseMatrix::multiply(const std::vector<double>& x, std::vector<double>& y) const {
  y.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = row_start[i]; k < row_start[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
}

std::vector<std::vector<std::size_t>> strongly_connected_components(const SparseMatrix& m) {
  // Iterative Tarjan.
  const std::size_t n = m.n;
  constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> index(n, kUnset), low(n, 0), stack;
  std::vector<char> on_stack(n, 0);
  std::vector<std::vector<std::size_t>> comps;
  std::size_t counter = 0;
  std::vector<std::pair<std::size_t, std::size_t>> call;  // (node, next edge)
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnset) continue;
    call.emplace_back(root, m.row_start[root]);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& [v, e] = call.back();
      if (e < m.row_start[v + 1]) {
        const std::size_t w = m.col[e++];
        if (m.val[e - 1] <= 0.0) continue;
        if (index[w] == kUnset) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.emplace_back(w, m.row_start[w]);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
      }
      const std::size_t done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
    }
  }
  std::sort(comps.begin(), comps.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return comps;
}

namespace {

struct PowerOutcome {
  double log_lower, log_upper, iteration_contraction;
  int iterations;
  std::vector<double> vec;
  bool converged;
  double rel_gap;
};

// Power iteration on m + s*I. Collatz-Wielandt ratios (m v)_i / v_i bracket rho.
PowerOutcome power_iterate(const SparseMatrix& m, const PerronOptions& opt) {
  const std::size_t n = m.n;
  double min_row = std::numeric_limits<double>::infinity(), max_row = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = m.row_start[i]; k < m.row_start[i + 1]; ++k) s += m.val[k];
    min_row = std::min(min_row, s);
    max_row = std::max(max_row, s);
  }
  const double shift = 0.5 * (min_row + max_row);
  std::vector<double> v(n, 1.0 / static_cast<double>(n)), mv;
  PowerOutcome out{0, 0, 1.0, 0, {}, false, std::numeric_limits<double>::infinity()};
  double prev_gap = std::numeric_limits<double>::infinity();
  double ratio_sum = 0.0;
  int ratio_count = 0;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    m.multiply(v, mv);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = mv[i] / v[i];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    out.iterations = it;
    out.log_lower = std::log(lo);
    out.log_upper = std::log(hi);
    const double gap = hi > 0.0 ? (hi - lo) / hi : 0.0;
    out.rel_gap = gap;
    if (prev_gap < std::numeric_limits<double>::infinity() && prev_gap > 1e-9 && gap > 0.0) {
      // Geometric contraction of the bracket, averaged over a trailing window.
      ratio_sum = 0.9 * ratio_sum + gap / prev_gap;
      ++ratio_count;
    }
    prev_gap = gap;
    if (gap <= opt.tolerance) {
      out.converged = true;
      break;
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = mv[i] + shift * v[i];
      norm += v[i];
    }
    for (double& x : v) x /= norm;
  }
  if (ratio_count > 0) {
    const double weight = (1.0 - std::pow(0.9, ratio_count)) / 0.1;
    out.iteration_contraction = std::clamp(1.0 - ratio_sum / weight, 0.0, 1.0);
  }
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v) x /= total;
  out.vec = std::move(v);
  return out;
}

Eigen::MatrixXd dense_of(const SparseMatrix& m) {
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m.n), static_cast<Eigen::Index>(m.n));
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t k = m.row_start[i]; k < m.row_start[i + 1]; ++k) {
      dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m.col[k])) += m.val[k];
    }
  }
  return dense;
}

// Two steps of inverse iteration with a shift just above the root.
void refine(const SparseMatrix& m, PerronResult& res) {
  const double rho = std::exp(res.log_root - m.log_scale);
  Eigen::MatrixXd a = dense_of(m);
  a.diagonal().array() -= rho * (1.0 + 1e-9);
  auto polish = [](const auto& lu, std::vector<double>& vec) {
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(vec.data(), static_cast<Eigen::Index>(vec.size()));
    for (int k = 0; k < 2; ++k) {
      x = lu.solve(x);
      x /= x.sum();
    }
    if (!x.allFinite() || x.minCoeff() < 0.0) return;
    vec.assign(x.data(), x.data() + x.size());
  };
  polish(Eigen::PartialPivLU<Eigen::MatrixXd>(a), res.right);
  if (res.left.empty()) return;
  polish(Eigen::PartialPivLU<Eigen::MatrixXd>(a.transpose()), res.left);
  // Rayleigh quotient u'Mv / u'v: second-order accurate in the vector errors.
  const Eigen::Map<const Eigen::VectorXd> u(res.left.data(), static_cast<Eigen::Index>(m.n));
  const Eigen::Map<const Eigen::VectorXd> v(res.right.data(), static_cast<Eigen::Index>(m.n));
  std::vector<double> mv;
  m.multiply(res.right, mv);
  const double rq = u.dot(Eigen::Map<const Eigen::VectorXd>(mv.data(), static_cast<Eigen::Index>(m.n))) / u.dot(v);
  const double log_rq = std::log(rq) + m.log_scale;
  if (std::isfinite(log_rq) && log_rq >= res.log_lower - 1e-15 && log_rq <= res.log_upper + 1e-15) res.log_root = log_rq;
}

PerronResult irreducible_perron(const SparseMatrix& m, const PerronOptions& opt) {
  PerronResult res;
  PowerOutcome right = power_iterate(m, opt);
  if (!right.converged) {
    throw NonConvergenceError("power iteration did not reach tolerance after " +
                                  std::to_string(right.iterations) + " iterations",
                              right.rel_gap);
  }
  res.log_lower = right.log_lower + m.log_scale;
  res.log_upper = right.log_upper + m.log_scale;
  res.log_root = 0.5 * (res.log_lower + res.log_upper);
  res.iteration_contraction = right.iteration_contraction;
  res.iterations = right.iterations;
  res.right = std::move(right.vec);
  if (opt.left_vector) {
    PowerOutcome left = power_iterate(m.transposed(), opt);
    if (!left.converged) {
      throw NonConvergenceError("left power iteration did not reach tolerance", left.rel_gap);
    }
    res.left = std::move(left.vec);
  }
  if (opt.refine_vectors && m.n <= kDenseSpectrumLimit) refine(m, res);
  return res;
}

bool has_edge(const SparseMatrix& m) {
  for (double w : m.val) {
    if (w > 0.0) return true;
  }
  return false;
}

}  // namespace

PerronResult perron(const SparseMatrix& m, const PerronOptions& options) {
  if (m.n == 0) throw ValidationError("empty operator", "operator");
  auto comps = strongly_connected_components(m);
  if (comps.size() == 1 && has_edge(m)) return irreducible_perron(m, options);

  std::string which = "states {";
  for (std::size_t i = 0; i < std::min<std::size_t>(comps.front().size(), 8); ++i) {
    which += (i ? "," : "") + std::to_string(comps.front()[i]);
  }
  which += comps.front().size() > 8 ? ",...}" : "}";
  if (!options.allow_reducible) {
    throw ReducibleOperatorError("operator is reducible: " + std::to_string(comps.size()) +
                                 " communicating classes; " + which +
                                 " does not communicate with the rest");
  }
  PerronResult best;
  best.log_root = -std::numeric_limits<double>::infinity();
  best.log_lower = best.log_upper = best.log_root;
  for (const auto& comp : comps) {
    SparseMatrix sub = m.restricted(comp);
    if (!has_edge(sub)) continue;
    PerronResult r = irreducible_perron(sub, options);
    if (r.log_root > best.log_root) {
      std::vector<double> right(m.n, 0.0), left;
      for (std::size_t i = 0; i < comp.size(); ++i) right[comp[i]] = r.right[i];
      if (!r.left.empty()) {
        left.assign(m.n, 0.0);
        for (std::size_t i = 0; i < comp.size(); ++i) left[comp[i]] = r.left[i];
      }
      r.right = std::move(right);
      r.left = std::move(left);
      best = std::move(r);
    }
  }
  best.reducible = true;
  best.warnings.push_back("reducible operator with " + std::to_string(comps.size()) +
                          " classes; reporting the largest class root, which depends on the "
                          "start state's reachable class");
  return best;
}

double spectral_gap(const SparseMatrix& m) {
  if (m.n > kDenseSpectrumLimit) {
    throw BoundExceededError("dense spectrum limited to " + std::to_string(kDenseSpectrumLimit) + " states",
                             static_cast<long long>(kDenseSpectrumLimit));
  }
  if (m.n < 2) return 1.0;
  const Eigen::MatrixXd dense = dense_of(m);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(dense, false);
  std::vector<double> moduli;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) moduli.push_back(std::abs(solver.eigenvalues()[i]));
  std::sort(moduli.begin(), moduli.end(), std::greater<>());
  return moduli[0] > 0.0 ? std::clamp(1.0 - moduli[1] / moduli[0], 0.0, 1.0) : 0.0;
}

}  // namespace rwrp
