#include "rwrp/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>

#include "detail/parallel.hpp"
#include "rwrp/errors.hpp"

namespace rwrp {

namespace {

double u01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t pick(const double* cdf, std::size_t width, double u) {
  for (std::size_t z = 0; z + 1 < width; ++z) {
    if (u < cdf[z]) return z;
  }
  return width - 1;
}

// One DP layer in indexed form: for state i, cdf[i*k + z] is the cumulative
// probability of choosing move z and next[i*k + z] the successor index.
struct Layer {
  std::vector<DPState> states;
  std::vector<double> cdf;
  std::vector<std::uint32_t> next;
};

struct SamplingTable {
  std::vector<double> start_cdf;  // over layer-0 states
  std::vector<Layer> layers;      // layers[0..n-1]
  double log_Z = 0.0;
};

SamplingTable build_table(PathDP& dp, int n) {
  const std::size_t k = dp.steps().size();
  std::vector<DPLayer> fwd;
  fwd.push_back(dp.initial());
  for (int i = 0; i < n; ++i) fwd.push_back(dp.advance(fwd.back()));

  // Backward log continuation weights beta_i(s), with beta_n = 0.
  std::vector<std::unordered_map<DPState, std::uint32_t, DPStateHash>> index(fwd.size());
  std::vector<std::vector<DPState>> states(fwd.size());
  for (std::size_t i = 0; i < fwd.size(); ++i) {
    states[i].reserve(fwd[i].size());
    for (const auto& [s, w] : fwd[i]) states[i].push_back(s);
    // Hash order is not portable; sort so sampling does not depend on the library.
    std::sort(states[i].begin(), states[i].end(), [](const DPState& a, const DPState& b) {
      if (a.code != b.code) return a.code < b.code;
      return a.pos < b.pos;
    });
    for (std::uint32_t j = 0; j < states[i].size(); ++j) index[i].emplace(states[i][j], j);
  }
  fwd.clear();

  SamplingTable table;
  table.layers.resize(static_cast<std::size_t>(n));
  std::vector<double> beta_next(states[static_cast<std::size_t>(n)].size(), 0.0);
  std::vector<double> logs(k);
  for (int i = n - 1; i >= 0; --i) {
    const auto ui = static_cast<std::size_t>(i);
    Layer& layer = table.layers[ui];
    layer.states = states[ui];
    layer.cdf.resize(layer.states.size() * k);
    layer.next.resize(layer.states.size() * k);
    std::vector<double> beta(layer.states.size());
    for (std::size_t j = 0; j < layer.states.size(); ++j) {
      const DPState& s = layer.states[j];
      for (std::size_t z = 0; z < k; ++z) {
        const std::uint32_t t = index[ui + 1].at(dp.move(s, z));
        layer.next[j * k + z] = t;
        logs[z] = beta_next[t];
      }
      const double lse = log_sum_exp(logs);
      double acc = 0.0;
      for (std::size_t z = 0; z < k; ++z) {
        acc += std::exp(logs[z] - lse);
        layer.cdf[j * k + z] = acc;
      }
      beta[j] = dp.log_step_weight(s) + lse;
    }
    beta_next = std::move(beta);
  }
  const double lse0 = log_sum_exp(beta_next);
  table.log_Z = lse0 - static_cast<double>(dp.memory()) * std::log(static_cast<double>(k));
  double acc = 0.0;
  for (double b : beta_next) table.start_cdf.push_back(acc += std::exp(b - lse0));
  table.layers.insert(table.layers.begin(), Layer{});  // placeholder for start states
  table.layers.front().states = states[0];
  return table;
}

}  // namespace

Point PolymerSampleBatch::position(std::size_t i, int k) const {
  if (k < 0 || k > n + tail_steps) throw ValidationError("position index out of range", "k");
  Point x = steps.origin();
  const auto p = path(i);
  for (int j = 0; j < k; ++j) x += steps[p[static_cast<std::size_t>(j)]];
  return x;
}

PolymerSampleBatch sample_paths(const Environment& env, const StepSet& steps, const Potential& V, int n,
                                std::size_t count, std::uint64_t seed, const SamplerOptions& options) {
  if (n < 0) throw ValidationError("path length must be nonnegative", "n");
  if (options.tail_steps < 0) throw ValidationError("tail length must be nonnegative", "tail_steps");
  if (steps.size() > 255) throw ValidationError("sampler supports at most 255 steps", "steps");
  const std::size_t k = steps.size();
  const int l = V.memory();
  PathDP dp(env, steps, V.negated(), options.state_budget);
  const SamplingTable table = build_table(dp, n);

  PolymerSampleBatch batch{seed, n, l, options.tail_steps, steps, env, 0.0, 0, {}};
  batch.log_Z = table.log_Z;
  batch.count = count;
  const std::size_t len = batch.path_length();
  batch.flat.assign(count * len, 0);

  const std::size_t chunks = (count + kSampleChunk - 1) / kSampleChunk;
  detail::parallel_for(chunks, options.threads, [&](std::size_t c) {
    std::mt19937_64 rng(derive_seed(seed, c));
    const std::size_t end = std::min(count, (c + 1) * kSampleChunk);
    for (std::size_t i = c * kSampleChunk; i < end; ++i) {
      std::uint8_t* out = batch.flat.data() + i * len;
      std::size_t j = pick(table.start_cdf.data(), table.start_cdf.size(), u01(rng));
      for (std::size_t z : tuple_from_code(table.layers[0].states[j].code, l, k)) *out++ = static_cast<std::uint8_t>(z);
      for (int t = 0; t < n; ++t) {
        const Layer& layer = table.layers[static_cast<std::size_t>(t) + 1];
        const std::size_t z = pick(layer.cdf.data() + j * k, k, u01(rng));
        *out++ = static_cast<std::uint8_t>(z);
        j = layer.next[j * k + z];
      }
      for (int t = 0; t < options.tail_steps; ++t) {
        *out++ = static_cast<std::uint8_t>(std::min<std::size_t>(k - 1, static_cast<std::size_t>(u01(rng) * static_cast<double>(k))));
      }
    }
  });
  return batch;
}

std::vector<std::pair<Point, double>> endpoint_distribution(const Environment& env, const StepSet& steps,
                                                            const Potential& V, int n,
                                                            const TransferOptions& options) {
  if (n < 0) throw ValidationError("path length must be nonnegative", "n");
  PathDP dp(env, steps, V.negated(), options.state_budget);
  DPLayer layer = dp.initial();
  for (int i = 0; i < n; ++i) layer = dp.advance(layer);
  std::unordered_map<Point, double, PointHash> acc;
  const double log_Z = layer_total(layer).value();
  for (const auto& [s, w] : layer) acc[s.pos] += std::exp(w - log_Z);
  std::vector<std::pair<Point, double>> out(acc.begin(), acc.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

namespace {

std::size_t pattern_count(const Environment& env) {
  return env.is_periodic() ? env.periodic().site_count() : env.iid().alphabet_size();
}

void accumulate(const PolymerSampleBatch& b, std::size_t path, int memory, double weight, std::vector<double>& mass) {
  const std::size_t k = b.steps.size();
  const auto p = b.path(path);
  Point x = b.steps.origin();
  for (int t = 0; t < b.n; ++t) {
    const std::size_t pattern = b.env.is_periodic() ? b.env.cell_at(x) : static_cast<std::size_t>(b.env.symbol_at(x));
    std::size_t code = 0;
    for (int j = 0; j < memory; ++j) code = code * k + p[static_cast<std::size_t>(t + j)];
    mass[pattern * tuple_count(memory, k) + code] += weight;
    x += b.steps[p[static_cast<std::size_t>(t)]];
  }
}

EmpiricalMeasure empty_measure(const PolymerSampleBatch& b, int memory) {
  if (memory < 0 || memory > b.memory + b.tail_steps) {
    throw ValidationError("empirical memory exceeds the sampled path margin", "memory");
  }
  if (b.n == 0) throw ValidationError("empirical measure needs n >= 1", "n");
  EmpiricalMeasure m;
  m.pattern_count = pattern_count(b.env);
  m.step_count = b.steps.size();
  m.memory = memory;
  m.mass.assign(m.pattern_count * tuple_count(memory, m.step_count), 0.0);
  return m;
}

}  // namespace

EmpiricalMeasure empirical_measure(const PolymerSampleBatch& batch, std::size_t path, int memory) {
  EmpiricalMeasure m = empty_measure(batch, memory);
  if (path >= batch.count) throw ValidationError("path index out of range", "path");
  accumulate(batch, path, memory, 1.0 / batch.n, m.mass);
  return m;
}

EmpiricalMeasure empirical_measure(const PolymerSampleBatch& batch, int memory) {
  EmpiricalMeasure m = empty_measure(batch, memory);
  if (batch.count == 0) throw ValidationError("empty sample batch", "count");
  const double w = 1.0 / (static_cast<double>(batch.n) * static_cast<double>(batch.count));
  for (std::size_t i = 0; i < batch.count; ++i) accumulate(batch, i, memory, w, m.mass);
  return m;
}

McResult mc_free_energy(const IidEnvironment& env, const StepSet& steps, const Potential& V, int n,
                        std::size_t replicas, std::uint64_t seed, const McOptions& options) {
  if (n < 1) throw ValidationError("path length must be positive", "n");
  if (replicas == 0) throw ValidationError("at least one replica is required", "replicas");
  if (!strictly_directed(steps)) {
    if (n > 1000) throw ValidationError("i.i.d. Monte Carlo beyond n = 1000 needs a strictly directed step set", "steps");
    if (!options.allow_undirected) {
      throw ValidationError("step set is not strictly directed; set allow_undirected for small n", "steps");
    }
  }
  McResult res;
  res.values.resize(replicas);
  res.seeds.resize(replicas);
  for (std::size_t r = 0; r < replicas; ++r) res.seeds[r] = derive_seed(seed, r);
  const Potential g = V.negated();
  TransferOptions topts;
  topts.state_budget = options.state_budget;
  detail::parallel_for(replicas, options.threads, [&](std::size_t r) {
    const Environment e(env.with_seed(res.seeds[r]));
    res.values[r] = log_partition(e, steps, g, n, std::nullopt, topts).value() / n;
  });
  double sum = 0.0;
  for (double v : res.values) sum += v;
  res.mean = sum / static_cast<double>(replicas);
  if (replicas > 1) {
    double ss = 0.0;
    for (double v : res.values) ss += (v - res.mean) * (v - res.mean);
    res.stderr_ = std::sqrt(ss / static_cast<double>(replicas - 1) / static_cast<double>(replicas));
  }
  return res;
}

double annealed_free_energy(const IidEnvironment& env, const StepSet& steps, const Potential& V) {
  if (V.memory() != 0) throw ValidationError("annealed closed form needs a site potential (memory 0)", "memory");
  if (!strictly_directed(steps)) {
    throw ValidationError("annealed closed form needs a strictly directed step set", "steps");
  }
  const int d = env.dimension();
  std::vector<double> terms;
  std::vector<double> values;
  for (const auto& a : env.alphabet()) values.push_back(a.value);
  for (std::size_t i = 0; i < env.alphabet_size(); ++i) {
    if (env.alphabet()[i].probability <= 0.0) continue;
    const Environment single(PeriodicEnvironment(std::vector<std::int64_t>(static_cast<std::size_t>(d), 1),
                                                 {static_cast<int>(i)}, values));
    terms.push_back(std::log(env.alphabet()[i].probability) - V(single, Point(d), {}));
  }
  return log_sum_exp(terms);
}

}  // namespace rwrp
