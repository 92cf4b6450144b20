#include "rwrp/path_integral.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <unordered_map>

#include "rwrp/errors.hpp"

namespace rwrp {

namespace {
constexpr std::size_t kSearchBudget = 1'000'000;
}

PathIntegral::PathIntegral(const ChainStateSpace& space, CorrectorTable F, double tolerance)
    : space_(space), F_(std::move(F)) {
  if (!space_.steps().generates_full_lattice()) {
    throw ValidationError("path integrals need a step set that generates Z^d", "steps");
  }
  const ClassKReport rep = check_class_K(space_, F_, tolerance);
  if (!rep.closed_loop) {
    throw NoClosedLoopError("corrector violates the closed-loop property (fit residual " +
                            std::to_string(rep.fit_residual) + ")");
  }
}

Point PathIntegral::tuple_sum(std::size_t code) const {
  Point s = space_.steps().origin();
  for (std::size_t z : tuple_from_code(code, space_.memory(), space_.step_count())) s += space_.steps()[z];
  return s;
}

std::vector<std::size_t> PathIntegral::steps_summing_to(const Point& w) const {
  // Shortest step sequence by breadth-first search over lattice points.
  const StepSet& R = space_.steps();
  std::unordered_map<Point, std::pair<Point, std::size_t>, PointHash> parent;
  const Point origin = R.origin();
  parent.emplace(origin, std::make_pair(origin, std::size_t{0}));
  std::deque<Point> queue{origin};
  while (!queue.empty() && parent.size() < kSearchBudget) {
    const Point p = queue.front();
    queue.pop_front();
    if (p == w) break;
    for (std::size_t z = 0; z < R.size(); ++z) {
      const Point q = p + R[z];
      if (parent.emplace(q, std::make_pair(p, z)).second) queue.push_back(q);
    }
  }
  if (!parent.count(w)) throw NoPathError("no admissible step sequence sums to " + w.to_string());
  std::vector<std::size_t> seq;
  for (Point p = w; p != origin;) {
    const auto& [prev, z] = parent.at(p);
    seq.push_back(z);
    p = prev;
  }
  std::reverse(seq.begin(), seq.end());
  return seq;
}

std::vector<std::size_t> PathIntegral::path(const LiftedState& from, const LiftedState& to) const {
  // Paths shorter than the memory keep part of the old tuple.
  const std::size_t l = static_cast<std::size_t>(space_.memory());
  const auto head = tuple_from_code(from.code, space_.memory(), space_.step_count());
  const auto tail = tuple_from_code(to.code, space_.memory(), space_.step_count());
  if (from == to) return {};
  Point advanced = from.x;
  for (std::size_t m = 1; m < l; ++m) {
    advanced += space_.steps()[head[m - 1]];
    if (advanced == to.x && std::equal(head.begin() + m, head.end(), tail.begin())) {
      return std::vector<std::size_t>(tail.begin() + (l - m), tail.end());
    }
  }
  std::vector<std::size_t> moves = steps_summing_to(to.x - from.x - tuple_sum(from.code));
  moves.insert(moves.end(), tail.begin(), tail.end());
  return moves;
}

LiftedState PathIntegral::endpoint(const LiftedState& from, const std::vector<std::size_t>& moves) const {
  const std::size_t k = space_.step_count();
  const int l = space_.memory();
  std::vector<std::size_t> tuple = tuple_from_code(from.code, l, k);
  Point x = from.x;
  for (std::size_t a : moves) {
    if (l == 0) {
      x += space_.steps()[a];
      continue;
    }
    x += space_.steps()[tuple.front()];
    tuple.erase(tuple.begin());
    tuple.push_back(a);
  }
  return {x, tuple_code(tuple, k)};
}

double PathIntegral::sum_along(const Point& u, const LiftedState& from, const std::vector<std::size_t>& moves) const {
  const std::size_t k = space_.step_count();
  std::size_t s = space_.index(space_.periodic().cell_index(from.x + u), from.code);
  double total = 0.0;
  for (std::size_t a : moves) {
    total += F_[s * k + a];
    s = space_.move(s, a);
  }
  return total;
}

double PathIntegral::L(const Point& u, const LiftedState& from, const LiftedState& to) const {
  const auto moves = path(from, to);
  return sum_along(u, from, moves);
}

LiftedState PathIntegral::common_ancestor(const LiftedState& a, const LiftedState& b, std::size_t tilde_code) const {
  // Need step sums p, q with q - p = b.x - a.x; then y' = a.x - p reaches both.
  const StepSet& R = space_.steps();
  const Point gap = b.x - a.x;
  std::unordered_map<Point, std::size_t, PointHash> seen;
  std::vector<Point> order;
  auto found = [&](const Point& p) -> LiftedState { return {a.x - p - tuple_sum(tilde_code), tilde_code}; };
  auto add = [&](const Point& q) -> std::optional<LiftedState> {
    if (!seen.emplace(q, order.size()).second) return std::nullopt;
    order.push_back(q);
    if (seen.count(q + gap)) return found(q);
    if (seen.count(q - gap)) return found(q - gap);
    return std::nullopt;
  };
  if (auto hit = add(R.origin())) return *hit;
  for (std::size_t head = 0; head < order.size() && order.size() < kSearchBudget; ++head) {
    const Point p = order[head];
    for (std::size_t z = 0; z < R.size(); ++z) {
      if (auto hit = add(p + R[z])) return *hit;
    }
  }
  throw NoPathError("no common ancestor found for " + a.x.to_string() + " and " + b.x.to_string());
}

double PathIntegral::f(const Point& u, std::size_t z_code, std::size_t zbar_code, const Point& x) const {
  const LiftedState zero{space_.steps().origin(), z_code};
  const LiftedState target{x, zbar_code};
  const LiftedState anc = common_ancestor(zero, target, z_code);
  return L(u, anc, target) - L(u, anc, zero);
}

std::vector<double> mean_zero_constants(const PathIntegral& pi) {
  const ChainStateSpace& space = pi.space();
  const std::size_t k = space.step_count();
  std::vector<double> c(k, 0.0);
  for (std::size_t z = 0; z < k; ++z) {
    const std::vector<std::size_t> hat(static_cast<std::size_t>(space.memory()), z);
    const std::size_t code = tuple_code(hat, k);
    double total = 0.0;
    for (std::size_t cell = 0; cell < space.cell_count(); ++cell) {
      total += pi.f(space.periodic().cell_point(cell), code, code, space.steps()[z]);
    }
    c[z] = total / static_cast<double>(space.cell_count());
  }
  return c;
}

CorrectorTable mean_zero_correction(const ChainStateSpace& space, const CorrectorTable& F) {
  const PathIntegral pi(space, F);
  const std::vector<double> c = mean_zero_constants(pi);
  const std::size_t k = space.step_count();
  CorrectorTable out = F;
  for (std::size_t s = 0; s < space.size(); ++s) {
    for (std::size_t z = 0; z < k; ++z) out[s * k + z] -= c[space.taken_step(s, z)];
  }
  return out;
}

}  // namespace rwrp
