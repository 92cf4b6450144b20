#include "rwrp/chain.hpp"

#include "rwrp/errors.hpp"

namespace rwrp {

ChainStateSpace::ChainStateSpace(PeriodicEnvironment env, StepSet steps, int memory)
    : env_(std::move(env)),
      view_(env_),
      steps_(std::move(steps)),
      memory_(memory),
      cells_(env_.site_count()),
      tuples_(rwrp::tuple_count(memory, steps_.size())),
      lead_(memory > 0 ? rwrp::tuple_count(memory - 1, steps_.size()) : 1) {
  if (memory < 0) throw ValidationError("memory must be nonnegative", "memory");
  if (env_.dimension() != steps_.dimension()) {
    throw ValidationError("environment and step set dimensions differ", "dimension");
  }
  const std::size_t k = steps_.size();
  next_.resize(size() * k);
  for (std::size_t s = 0; s < size(); ++s) {
    const Point base = env_.cell_point(cell_of(s));
    for (std::size_t z = 0; z < k; ++z) {
      const std::size_t cell = env_.cell_index(base + steps_[taken_step(s, z)]);
      const std::size_t code = memory_ == 0 ? 0 : (code_of(s) % lead_) * k + z;
      next_[s * k + z] = index(cell, code);
    }
  }
  ergodic_ = env_.shift_orbit_transitive(steps_);
}

std::vector<std::size_t> ChainStateSpace::tuple_of(std::size_t state) const {
  return tuple_from_code(code_of(state), memory_, steps_.size());
}

std::vector<double> ChainStateSpace::tabulate(const Potential& g) const {
  if (g.memory() > memory_) {
    throw ValidationError("potential memory " + std::to_string(g.memory()) +
                              " exceeds chain memory " + std::to_string(memory_),
                          "memory");
  }
  const Potential lifted = g.with_memory(memory_);
  std::vector<double> out(size());
  for (std::size_t s = 0; s < size(); ++s) {
    const auto t = tuple_of(s);
    out[s] = lifted(view_, env_.cell_point(cell_of(s)), t);
  }
  return out;
}

std::string ChainStateSpace::describe(std::size_t state) const {
  std::string out = "(" + env_.cell_point(cell_of(state)).to_string() + ";";
  const auto t = tuple_of(state);
  for (std::size_t i = 0; i < t.size(); ++i) {
    out += (i ? "," : "") + steps_[t[i]].to_string();
  }
  return out + ")";
}

}  // namespace rwrp
