#include "rwrp/potential.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "rwrp/errors.hpp"

namespace rwrp {

std::string to_string(ClassLCondition c) {
  switch (c) {
    case ClassLCondition::kNone: return "none";
    case ClassLCondition::kBounded: return "bounded";
    case ClassLCondition::kD1L1: return "d1_L1";
    case ClassLCondition::kIidMoment: return "iid_moment";
    case ClassLCondition::kMixingMoment: return "mixing_moment";
  }
  return "none";
}

ClassLCondition parse_class_L_condition(const std::string& name) {
  for (auto c : {ClassLCondition::kNone, ClassLCondition::kBounded, ClassLCondition::kD1L1,
                 ClassLCondition::kIidMoment, ClassLCondition::kMixingMoment}) {
    if (to_string(c) == name) return c;
  }
  throw ValidationError("unknown class-L condition '" + name + "'", "class_L");
}

Potential::Potential(int memory, PotentialFn fn, std::string name, ClassLCondition declared)
    : memory_(memory), fn_(std::move(fn)), name_(std::move(name)), declared_(declared) {
  if (memory_ < 0) throw ValidationError("potential memory must be nonnegative", "memory");
  if (!fn_) throw ValidationError("potential evaluator is empty", "potential");
}

double Potential::operator()(const Environment& env, const Point& x, StepTuple tuple) const {
  if (tuple.size() != static_cast<std::size_t>(memory_)) {
    throw ValidationError("potential '" + name_ + "' expects " + std::to_string(memory_) +
                              " steps, got " + std::to_string(tuple.size()),
                          "memory");
  }
  const double v = fn_(env, x, tuple);
  if (!std::isfinite(v)) {
    throw ValidationError("potential '" + name_ + "' is not finite at " + x.to_string(),
                          "potential");
  }
  return v;
}

Potential Potential::negated() const {
  auto fn = fn_;
  return Potential(memory_, [fn](const Environment& env, const Point& x, StepTuple t) { return -fn(env, x, t); },
                   "-" + name_, declared_);
}

Potential Potential::with_memory(int memory) const {
  if (memory < memory_) {
    throw ValidationError("cannot shorten potential memory from " + std::to_string(memory_) +
                              " to " + std::to_string(memory),
                          "memory");
  }
  if (memory == memory_) return *this;
  auto fn = fn_;
  const auto keep = static_cast<std::size_t>(memory_);
  return Potential(
      memory,
      [fn, keep](const Environment& env, const Point& x, StepTuple t) {
        return fn(env, x, t.first(keep));
      },
      name_, declared_);
}

Potential Potential::with_declared(ClassLCondition c) const {
  Potential p = *this;
  p.declared_ = c;
  return p;
}

Potential constant_potential(double c, int memory) {
  if (!std::isfinite(c)) throw ValidationError("constant potential must be finite", "value");
  return Potential(
      memory, [c](const Environment&, const Point&, StepTuple) { return c; }, "constant",
      ClassLCondition::kBounded);
}

Potential polymer_potential(double beta) {
  if (!std::isfinite(beta)) throw ValidationError("beta must be finite", "beta");
  return Potential(
      0, [beta](const Environment& env, const Point& x, StepTuple) { return -beta * env.value_at(x); },
      "polymer");
}

void validate_kernel_rows(const std::vector<std::vector<double>>& rows, std::size_t width) {
  if (rows.empty()) throw ValidationError("kernel has no rows", "kernel");
  for (std::size_t s = 0; s < rows.size(); ++s) {
    const std::string field = "kernel[" + std::to_string(s) + "]";
    if (rows[s].size() != width) {
      throw ValidationError(field + " has " + std::to_string(rows[s].size()) +
                                " entries, expected " + std::to_string(width),
                            field);
    }
    double sum = 0.0;
    for (double p : rows[s]) {
      if (!(p > 0.0) || !std::isfinite(p)) {
        throw ZeroProbabilityStepError(field + " has a non-positive step probability");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw ValidationError(field + " sums to " + std::to_string(sum) + ", expected 1", field);
    }
  }
}

KernelFn symbol_kernel(std::vector<std::vector<double>> rows) {
  if (rows.empty()) throw ValidationError("kernel has no rows", "kernel");
  validate_kernel_rows(rows, rows.front().size());
  return [rows = std::move(rows)](const Environment& env, const Point& x) {
    const auto s = static_cast<std::size_t>(env.symbol_at(x));
    if (s >= rows.size()) {
      throw ValidationError("no kernel row for symbol " + std::to_string(s), "kernel");
    }
    return rows[s];
  };
}

Potential rwre_potential(KernelFn kernel) {
  if (!kernel) throw ValidationError("kernel is empty", "kernel");
  return Potential(
      1,
      [kernel = std::move(kernel)](const Environment& env, const Point& x, StepTuple t) {
        const std::vector<double> pi = kernel(env, x);
        if (t[0] >= pi.size()) throw ValidationError("kernel row too short", "kernel");
        const double p = pi[t[0]];
        if (!(p > 0.0)) {
          throw ZeroProbabilityStepError("step " + std::to_string(t[0]) + " has probability 0 at " +
                                         x.to_string());
        }
        return -std::log(p);
      },
      "rwre");
}

std::size_t tuple_count(int memory, std::size_t step_count) {
  std::size_t n = 1;
  for (int i = 0; i < memory; ++i) {
    if (n > std::size_t{1} << 40) throw BoundExceededError("step-tuple space too large", memory);
    n *= step_count;
  }
  return n;
}

std::size_t tuple_code(StepTuple tuple, std::size_t step_count) {
  std::size_t code = 0;
  for (std::size_t z : tuple) code = code * step_count + z;
  return code;
}

std::vector<std::size_t> tuple_from_code(std::size_t code, int memory, std::size_t step_count) {
  std::vector<std::size_t> t(static_cast<std::size_t>(memory));
  for (int i = memory - 1; i >= 0; --i) {
    t[static_cast<std::size_t>(i)] = code % step_count;
    code /= step_count;
  }
  return t;
}

namespace {

void check_table(const std::vector<std::vector<double>>& table, std::size_t width) {
  if (table.empty()) throw ValidationError("potential table is empty", "table");
  for (std::size_t r = 0; r < table.size(); ++r) {
    const std::string field = "table[" + std::to_string(r) + "]";
    if (table[r].size() != width) {
      throw ValidationError(field + " has " + std::to_string(table[r].size()) +
                                " entries, expected " + std::to_string(width),
                            field);
    }
    for (double v : table[r]) {
      if (!std::isfinite(v)) throw ValidationError(field + " has a non-finite entry", field);
    }
  }
}

}  // namespace

Potential symbol_table_potential(int memory, std::size_t step_count,
                                 std::vector<std::vector<double>> table) {
  check_table(table, tuple_count(memory, step_count));
  return Potential(
      memory,
      [table = std::move(table), step_count](const Environment& env, const Point& x, StepTuple t) {
        const auto s = static_cast<std::size_t>(env.symbol_at(x));
        if (s >= table.size()) throw ValidationError("no table row for symbol", "table");
        return table[s][tuple_code(t, step_count)];
      },
      "symbol-table");
}

Potential cell_table_potential(int memory, std::size_t step_count,
                               std::vector<std::vector<double>> table) {
  check_table(table, tuple_count(memory, step_count));
  return Potential(
      memory,
      [table = std::move(table), step_count](const Environment& env, const Point& x, StepTuple t) {
        const std::size_t c = env.cell_at(x);
        if (c >= table.size()) throw ValidationError("no table row for cell", "table");
        return table[c][tuple_code(t, step_count)];
      },
      "cell-table");
}

std::vector<ClassLRow> class_L_diagnostic(const Potential& g, const Environment& env,
                                          const StepSet& steps, std::size_t step_index,
                                          const std::vector<double>& eps_list,
                                          const std::vector<int>& n_list,
                                          const ClassLOptions& options) {
  if (step_index >= steps.size()) throw ValidationError("step index out of range", "z");
  const Point z = steps[step_index];
  if (z.is_zero()) throw ValidationError("class-L direction must be a nonzero step", "z");
  for (double e : eps_list) {
    if (!(e >= 0.0)) throw ValidationError("epsilon must be nonnegative", "eps");
  }

  const std::size_t k = steps.size();
  const std::size_t tuples = tuple_count(g.memory(), k);
  std::unordered_map<Point, double, PointHash> site_max;
  auto max_abs_at = [&](const Point& y) {
    auto it = site_max.find(y);
    if (it != site_max.end()) return it->second;
    double m = 0.0;
    for (std::size_t c = 0; c < tuples; ++c) {
      const auto t = tuple_from_code(c, g.memory(), k);
      m = std::max(m, std::abs(g(env, y, t)));
    }
    site_max.emplace(y, m);
    return m;
  };

  std::vector<ClassLRow> rows;
  for (int n : n_list) {
    if (n < 1) throw ValidationError("n must be positive", "n");
    // Enumerate D_0 u ... u D_n while it stays small, else sample path endpoints.
    std::vector<Point> base;
    bool sampled = false;
    {
      std::unordered_set<Point, PointHash> seen{steps.origin()};
      std::vector<Point> layer{steps.origin()};
      for (int j = 1; j <= n && !sampled; ++j) {
        std::unordered_set<Point, PointHash> next;
        for (const Point& p : layer) {
          for (const Point& s : steps.steps()) next.insert(p + s);
        }
        layer.assign(next.begin(), next.end());
        seen.insert(next.begin(), next.end());
        if (seen.size() > options.enumeration_limit) sampled = true;
      }
      if (!sampled) {
        base.assign(seen.begin(), seen.end());
      } else {
        std::mt19937_64 rng(derive_seed(options.seed, static_cast<std::uint64_t>(n)));
        std::uniform_int_distribution<int> len(0, n);
        std::uniform_int_distribution<std::size_t> pick(0, k - 1);
        base.reserve(options.sample_count);
        for (std::size_t s = 0; s < options.sample_count; ++s) {
          Point p = steps.origin();
          for (int j = len(rng); j > 0; --j) p += steps[pick(rng)];
          base.push_back(p);
        }
      }
    }
    for (double eps : eps_list) {
      const auto m = static_cast<std::int64_t>(std::floor(eps * n + 1e-12));
      double best = 0.0;
      for (const Point& x : base) {
        double sum = 0.0;
        Point y = x;
        for (std::int64_t i = 0; i <= m; ++i, y += z) sum += max_abs_at(y);
        best = std::max(best, sum / n);
      }
      rows.push_back({eps, n, best, base.size(), sampled});
    }
  }
  return rows;
}

}  // namespace rwrp
