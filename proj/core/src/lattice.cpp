#include "rwrp/lattice.hpp"

#include <algorithm>
#include <unordered_set>

#include "rwrp/errors.hpp"

namespace rwrp {

using boost::multiprecision::cpp_int;

namespace {

using Layer = std::unordered_set<Point, PointHash>;

constexpr std::size_t kMaxLayerPoints = 4'000'000;

Layer next_layer(const Layer& cur, const StepSet& steps) {
  Layer out;
  out.reserve(cur.size() * 2);
  for (const auto& p : cur)
    for (const auto& z : steps.steps()) out.insert(p + z);
  if (out.size() > kMaxLayerPoints)
    throw BoundExceededError("reachable layer too large", static_cast<long long>(kMaxLayerPoints));
  return out;
}

cpp_int determinant(std::vector<std::vector<cpp_int>> m) {
  // Bareiss fraction-free elimination
  const std::size_t n = m.size();
  cpp_int sign = 1;
  cpp_int prev = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t swap = k + 1;
      while (swap < n && m[swap][k] == 0) ++swap;
      if (swap == n) return 0;
      std::swap(m[k], m[swap]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

std::vector<RationalVector> hull_system(const StepSet& steps) {
  const int d = steps.dimension();
  std::vector<RationalVector> A(static_cast<std::size_t>(d) + 1, RationalVector(steps.size()));
  for (std::size_t j = 0; j < steps.size(); ++j) {
    for (int i = 0; i < d; ++i) A[static_cast<std::size_t>(i)][j] = Rational(steps[j][i]);
    A[static_cast<std::size_t>(d)][j] = 1;
  }
  return A;
}

void check_xi(const StepSet& steps, const RationalVector& xi) {
  if (static_cast<int>(xi.size()) != steps.dimension())
    throw ValidationError("direction has " + std::to_string(xi.size()) + " coordinates, expected " +
                          std::to_string(steps.dimension()));
}

}  // namespace

StepSet::StepSet(int dimension, std::vector<Point> steps)
    : dimension_(dimension), steps_(std::move(steps)) {
  if (dimension < 1 || dimension > kMaxDimension)
    throw ValidationError("step-set dimension must lie in [1, " + std::to_string(kMaxDimension) + "]");
  if (steps_.empty()) throw ValidationError("step set is empty");
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    if (steps_[i].dim() != dimension)
      throw ValidationError("step " + steps_[i].to_string() + " has wrong dimension");
    for (std::size_t j = 0; j < i; ++j)
      if (steps_[i] == steps_[j]) throw ValidationError("duplicate step " + steps_[i].to_string());
    r_max_ = std::max(r_max_, steps_[i].norm());
  }
}

std::optional<std::size_t> StepSet::index_of(const Point& z) const {
  for (std::size_t i = 0; i < steps_.size(); ++i)
    if (steps_[i] == z) return i;
  return std::nullopt;
}

bool StepSet::has_zero_step() const noexcept {
  return std::any_of(steps_.begin(), steps_.end(), [](const Point& p) { return p.is_zero(); });
}

bool StepSet::generates_full_lattice() const {
  // The lattice spanned by R has index gcd(all d x d minors) when it has rank d.
  const std::size_t d = static_cast<std::size_t>(dimension_);
  const std::size_t n = steps_.size();
  if (n < d) return false;
  cpp_int g = 0;
  std::vector<std::size_t> pick(d);
  for (std::size_t i = 0; i < d; ++i) pick[i] = i;
  while (true) {
    std::vector<std::vector<cpp_int>> m(d, std::vector<cpp_int>(d));
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) m[r][c] = steps_[pick[r]][static_cast<int>(c)];
    g = boost::multiprecision::gcd(g, abs(determinant(std::move(m))));
    if (g == 1) return true;
    std::size_t i = d;
    while (i > 0 && pick[i - 1] == n - d + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < d; ++j) pick[j] = pick[j - 1] + 1;
  }
  return g == 1;
}

bool hull_contains(const StepSet& steps, const RationalVector& xi) {
  check_xi(steps, xi);
  RationalVector b(xi);
  b.push_back(1);
  return find_nonnegative_solution(hull_system(steps), b).has_value();
}

bool hull_contains_zero(const StepSet& steps) {
  return hull_contains(steps, RationalVector(static_cast<std::size_t>(steps.dimension()), Rational(0)));
}

bool zero_in_relative_interior(const StepSet& steps) {
  // For each nonzero z we need -eps*z in conv(R) for some eps > 0, which is the
  // cone condition -z = sum beta_w w with beta >= 0.
  const int d = steps.dimension();
  std::vector<RationalVector> A(static_cast<std::size_t>(d), RationalVector(steps.size()));
  for (std::size_t j = 0; j < steps.size(); ++j)
    for (int i = 0; i < d; ++i) A[static_cast<std::size_t>(i)][j] = Rational(steps[j][i]);
  bool any_nonzero = false;
  for (const auto& z : steps.steps()) {
    if (z.is_zero()) continue;
    any_nonzero = true;
    RationalVector b(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) b[static_cast<std::size_t>(i)] = Rational(-z[i]);
    if (!find_nonnegative_solution(A, b)) return false;
  }
  // R = {0}: conv(R) is the point 0 itself
  return any_nonzero || steps.has_zero_step();
}

RationalVector rational_convex_combination(const StepSet& steps, const RationalVector& xi) {
  check_xi(steps, xi);
  RationalVector b(xi);
  b.push_back(1);
  auto x = find_nonnegative_solution(hull_system(steps), b);
  if (!x) {
    std::string s;
    for (const auto& v : xi) s += (s.empty() ? "" : ",") + to_string(v);
    throw InfeasiblePointError("point (" + s + ") is not in the convex hull of the step set");
  }
  return *x;
}

std::set<Point> reachable_set(const StepSet& steps, int n, int cap) {
  if (n < 0) throw ValidationError("reachable_set needs n >= 0");
  if (n > cap) throw BoundExceededError("reachable_set step count " + std::to_string(n) + " exceeds cap", cap);
  Layer layer{steps.origin()};
  for (int k = 0; k < n; ++k) layer = next_layer(layer, steps);
  return {layer.begin(), layer.end()};
}

namespace {

struct PeriodSearch {
  std::int64_t period;
  Point target;
  std::vector<Layer> layers;  // D_0 .. D_period
};

PeriodSearch search_period(const StepSet& steps, const RationalVector& xi,
                           std::optional<std::int64_t> bound) {
  check_xi(steps, xi);
  if (!hull_contains(steps, xi)) {
    std::string s;
    for (const auto& v : xi) s += (s.empty() ? "" : ",") + to_string(v);
    throw InfeasiblePointError("direction (" + s + ") is not in the convex hull of the step set");
  }
  const cpp_int den = common_denominator(xi);
  const std::int64_t den64 = den.convert_to<std::int64_t>();
  const std::int64_t limit = bound.value_or(10 * den64);
  PeriodSearch out{0, Point(steps.dimension()), {Layer{steps.origin()}}};
  for (std::int64_t b = 1; b <= limit; ++b) {
    out.layers.push_back(next_layer(out.layers.back(), steps));
    if (b % den64 != 0) continue;
    Point target(steps.dimension());
    for (int i = 0; i < steps.dimension(); ++i) {
      Rational v = xi[static_cast<std::size_t>(i)] * b;
      target[i] = boost::multiprecision::numerator(v).convert_to<std::int64_t>();
    }
    if (out.layers.back().count(target)) {
      out.period = b;
      out.target = target;
      return out;
    }
  }
  throw BoundExceededError("no period b with b*xi in D_b found", limit);
}

}  // namespace

std::int64_t direction_period(const StepSet& steps, const RationalVector& xi,
                              std::optional<std::int64_t> bound) {
  return search_period(steps, xi, bound).period;
}

DirectionPath::DirectionPath(RationalVector xi, std::int64_t period, std::vector<std::size_t> block,
                             const StepSet& steps)
    : xi_(std::move(xi)), period_(period), block_(std::move(block)) {
  if (period_ < 1 || static_cast<std::int64_t>(block_.size()) != period_)
    throw ValidationError("direction path block length must equal the period");
  partial_.push_back(steps.origin());
  for (auto idx : block_) partial_.push_back(partial_.back() + steps[idx]);
  for (int i = 0; i < steps.dimension(); ++i) {
    if (Rational(partial_.back()[i]) != xi_[static_cast<std::size_t>(i)] * period_)
      throw ValidationError("direction path block does not sum to period * xi");
  }
}

Point DirectionPath::point_at(std::int64_t k) const {
  const std::int64_t j = k / period_;
  const std::int64_t r = k % period_;
  return j * partial_.back() + partial_[static_cast<std::size_t>(r)];
}

std::vector<Point> DirectionPath::prefix(std::int64_t n) const {
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(n + 1));
  for (std::int64_t k = 0; k <= n; ++k) out.push_back(point_at(k));
  return out;
}

DirectionPath canonical_path(const StepSet& steps, const RationalVector& xi,
                             std::optional<std::int64_t> bound) {
  auto search = search_period(steps, xi, bound);
  const auto b = search.period;
  // Backtrack one admissible decomposition, preferring earlier steps.
  std::vector<std::int64_t> counts(steps.size(), 0);
  Point p = search.target;
  for (std::int64_t k = b; k > 0; --k) {
    const auto& prev = search.layers[static_cast<std::size_t>(k - 1)];
    bool found = false;
    for (std::size_t s = 0; s < steps.size(); ++s) {
      if (prev.count(p - steps[s])) {
        ++counts[s];
        p -= steps[s];
        found = true;
        break;
      }
    }
    if (!found) throw NoPathError("internal: reachable-set backtrack failed");
  }

  std::vector<std::size_t> nonzero;
  std::int64_t zeros = 0;
  for (std::size_t s = 0; s < steps.size(); ++s) {
    if (steps[s].is_zero()) {
      zeros = counts[s];
      continue;
    }
    for (std::int64_t c = 0; c < counts[s]; ++c) nonzero.push_back(s);
  }
  std::vector<std::size_t> block;
  if (nonzero.empty()) {
    block.assign(static_cast<std::size_t>(zeros), *steps.index_of(steps.origin()));
  } else {
    const auto gaps = static_cast<std::int64_t>(nonzero.size());
    const std::size_t zero_idx = zeros ? *steps.index_of(steps.origin()) : 0;
    for (std::int64_t i = 0; i < gaps; ++i) {
      block.push_back(nonzero[static_cast<std::size_t>(i)]);
      const std::int64_t run = zeros / gaps + (i < zeros % gaps ? 1 : 0);
      for (std::int64_t c = 0; c < run; ++c) block.push_back(zero_idx);
    }
  }
  return DirectionPath(xi, b, std::move(block), steps);
}

}  // namespace rwrp
