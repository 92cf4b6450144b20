#include "tasks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>

#include <rwrp/chain.hpp>
#include <rwrp/errors.hpp>
#include <rwrp/path_integral.hpp>
#include <rwrp/perron.hpp>
#include <rwrp/rates.hpp>
#include <rwrp/sampler.hpp>
#include <rwrp/suites.hpp>
#include <rwrp/transfer.hpp>
#include <rwrp/variational.hpp>

namespace rwrp::cli {

namespace {

enum class Need { kNo, kOptional, kYes };

struct Model {
  StepSet steps;
  std::optional<Environment> env;
  std::optional<PotentialPair> pot;
};

Model read_model(Reader& root, Need env, Need pot, Common& common) {
  Reader m = root.child("model");
  Model out{read_steps(m), std::nullopt, std::nullopt};
  if (env == Need::kYes || (env == Need::kOptional && m.has("environment"))) {
    out.env = read_environment(m, out.steps.dimension(), common.seed);
    if (!out.env->is_periodic() && out.env->iid().seed() != common.seed) common.seeds.push_back(out.env->iid().seed());
  }
  if (pot == Need::kYes || (pot == Need::kOptional && (m.has("g") || m.has("V"))))
    out.pot = read_potentials(m, out.steps.size());
  m.finish();
  return out;
}

ChainStateSpace periodic_space(const Model& m, int memory, const std::string& task) {
  if (!m.env->is_periodic())
    throw ValidationError(task + " needs a periodic environment", "model.environment.type");
  if (memory < 0) throw ValidationError("memory must be nonnegative", "task.memory");
  return at_field("model", [&] { return ChainStateSpace(m.env->periodic(), m.steps, memory); });
}

void require_iid(const Model& m, const std::string& task) {
  if (m.env->is_periodic()) throw ValidationError(task + " needs an iid environment", "model.environment.type");
}

json list_or_empty(Reader& r, const std::string& key) {
  json j = r.get_or<json>(key, json::array());
  if (!j.is_array()) throw ValidationError("field " + r.field(key) + " must be a list", r.field(key));
  return j;
}

PerronOptions read_perron(Reader& num) {
  PerronOptions p;
  p.tolerance = num.get_or<double>("perron_tolerance", p.tolerance);
  p.max_iterations = num.get_or<int>("perron_max_iterations", p.max_iterations);
  return p;
}

TransferOptions read_transfer(Reader& num) {
  TransferOptions t;
  t.perron = read_perron(num);
  t.state_budget = num.get_or<std::size_t>("state_budget", t.state_budget);
  return t;
}

int positive(Reader& num, const std::string& key, std::optional<int> fallback) {
  const int v = fallback ? num.get_or<int>(key, *fallback) : num.get<int>(key);
  if (v < 1) throw ValidationError(key + " must be positive", num.field(key));
  return v;
}

std::vector<std::string> coordinate_columns(const std::string& stem, int d) {
  std::vector<std::string> out;
  for (int i = 1; i <= d; ++i) out.push_back(stem + "_" + std::to_string(i));
  return out;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

void put_point(Artifacts::Csv& csv, const Point& p) {
  for (int i = 0; i < p.dim(); ++i) csv.integer(p[i]);
}

json point_json(const Point& p) {
  json out = json::array();
  for (int i = 0; i < p.dim(); ++i) out.push_back(p[i]);
  return out;
}

json rational_json(const RationalVector& v) {
  json out = json::array();
  for (const Rational& r : v) out.push_back(to_string(r));
  return out;
}

std::string tuple_text(std::size_t code, int memory, std::size_t k) {
  std::string out;
  for (std::size_t z : tuple_from_code(code, memory, k)) out += (out.empty() ? "" : " ") + std::to_string(z);
  return out;
}

// ------------------------------------------------------------- free-energy

Plan plan_free_energy(Reader& root, Reader& task, Reader& num, Common& c) {
  (void)task;
  const Model m = read_model(root, Need::kYes, Need::kYes, c);
  const int d = m.steps.dimension();
  const int n_max = positive(num, "n_max", 100);
  const TransferOptions topts = read_transfer(num);
  std::vector<RationalVector> xis;
  for (const json& item : list_or_empty(num, "xi")) xis.push_back(read_rational_vector(num, "xi", item, d));
  std::vector<std::vector<double>> tilts;
  for (const json& item : list_or_empty(num, "tilts"))
    tilts.push_back(read_real_vector(item, num.field("tilts"), static_cast<std::size_t>(d)));
  if (!tilts.empty() && !m.env->is_periodic())
    throw ValidationError("tilt grids need a periodic environment", num.field("tilts"));
  for (std::size_t i = 0; i < xis.size(); ++i) {
    if (!hull_contains(m.steps, xis[i]))
      throw ValidationError("direction is outside the convex hull of the steps", num.field("xi") + "[" + std::to_string(i) + "]");
  }

  return [m, d, n_max, topts, xis, tilts](const Artifacts& art) {
    const Potential& g = m.pot->g;
    const auto seq = free_energy_sequence(*m.env, m.steps, g, n_max, topts);
    {
      auto csv = art.csv("free_energy.csv", {"n", "log_Z", "free_energy_estimate"});
      for (std::size_t i = 0; i < seq.size(); ++i) {
        const auto n = static_cast<double>(i + 1);
        csv.integer(static_cast<long long>(i + 1)) << seq[i] * n << seq[i];
        csv.end_row();
      }
    }
    json summary = {{"n_max", n_max}, {"final_estimate", seq.back()}, {"perron", nullptr}};
    if (m.env->is_periodic()) {
      const ChainStateSpace sp(m.env->periodic(), m.steps, g.memory());
      const auto table = sp.tabulate(g);
      const FreeEnergyResult fe = free_energy_periodic(sp, table, {}, topts.perron);
      json gap = nullptr;
      if (sp.size() <= 2048) gap = spectral_gap(transfer_matrix(sp, table));
      summary["perron"] = {{"value", fe.value},           {"spectral_gap", gap},
                           {"iterations", fe.iterations}, {"contraction", fe.iteration_contraction},
                           {"warnings", fe.warnings},     {"states", sp.size()}};
      if (!tilts.empty()) {
        auto csv = art.csv("tilt.csv", concat(coordinate_columns("t", d), {"lambda"}));
        for (const auto& t : tilts) {
          for (double x : t) csv << x;
          csv << free_energy_periodic(sp, table, t, topts.perron).value;
          csv.end_row();
        }
      }
    }
    if (!xis.empty()) {
      auto csv = art.csv("xi.csv", concat(coordinate_columns("xi", d), {"n", "free_energy_estimate"}));
      for (const auto& xi : xis) {
        const auto vals = constrained_free_energy(*m.env, m.steps, g, xi, n_max, topts);
        for (std::size_t i = 0; i < vals.size(); ++i) {
          for (const Rational& r : xi) csv << to_string(r);
          csv.integer(static_cast<long long>(i + 1));
          csv << (vals[i].is_empty() ? -INFINITY : vals[i].value());
          csv.end_row();
        }
      }
    }
    art.write_json("free_energy.json", summary);
    return 0;
  };
}

// ---------------------------------------------------------- verify-duality

Plan plan_verify_duality(Reader& root, Reader& task, Reader& num, Common& c) {
  const Model m = read_model(root, Need::kYes, Need::kYes, c);
  const int memory = task.get_or<int>("memory", m.pot->g.memory());
  const double tol = num.get_or<double>("duality_tolerance", 1e-6);
  const PerronOptions popts = read_perron(num);
  const ChainStateSpace sp = periodic_space(m, memory, "verify-duality");
  if (m.pot->g.memory() > memory) throw ValidationError("memory is below the potential's memory", task.field("memory"));

  return [m, sp, tol, popts](const Artifacts& art) {
    const auto g = sp.tabulate(m.pot->g);
    const FreeEnergyResult fe = free_energy_periodic(sp, g, {}, popts);
    const KbarResult kb = Kbar_minimize(sp, g);
    const DualResult hs = dual_Hsharp(sp, g);
    const double gap =
        std::max({std::abs(fe.value - kb.value), std::abs(fe.value - hs.value), std::abs(kb.value - hs.value)});
    json upper = nullptr;
    if (sp.size() <= 2048) upper = max_cycle_mean_upper_bound(sp, g);
    const json report = {
        {"lambda", fe.value},
        {"kbar", kb.value},
        {"hsharp", hs.value},
        {"max_pairwise_gap", gap},
        {"tolerance", tol},
        {"within_tolerance", gap <= tol},
        {"states", sp.size()},
        {"iterations", {{"perron", fe.iterations}, {"kbar", kb.iterations}, {"hsharp", hs.iterations}}},
        {"witnesses",
         {{"kbar_argmax_state", sp.describe(kb.argmax_state)},
          {"kbar_lower_bound", kb.lower_bound},
          {"hsharp_certified_gap", hs.gap}}},
        {"bounds", {{"mean_min_lower", mean_min_lower_bound(sp, g)}, {"max_cycle_upper", upper}}},
    };
    art.write_json("verify_duality.json", report);
    {
      const std::size_t k = sp.step_count();
      auto csv = art.csv("duality_witnesses.csv", {"state", "label", "corrector_h", "maximizer_mass"});
      for (std::size_t s = 0; s < sp.size(); ++s) {
        double mass = 0.0;
        for (std::size_t z = 0; z < k; ++z) mass += hs.mu[s * k + z];
        csv.integer(static_cast<long long>(s)) << sp.describe(s) << kb.h[s] << mass;
        csv.end_row();
      }
    }
    if (!(gap <= tol)) throw NonConvergenceError("pairwise gap " + cli::num(gap) + " exceeds tolerance " + cli::num(tol), gap);
    return 0;
  };
}

// ------------------------------------------------------------------ sample

Plan plan_sample(Reader& root, Reader& task, Reader& num, Common& c) {
  const Model m = read_model(root, Need::kYes, Need::kYes, c);
  const Potential& V = m.pot->V;
  const int n = num.get<int>("n");
  if (n < 0) throw ValidationError("n must be nonnegative", num.field("n"));
  const auto count = static_cast<std::size_t>(positive(num, "count", 10000));
  const int memory = task.get_or<int>("memory", V.memory());
  if (memory < 0) throw ValidationError("memory must be nonnegative", task.field("memory"));
  SamplerOptions so;
  so.threads = c.threads;
  so.tail_steps = num.get_or<int>("tail_steps", std::max(0, memory - V.memory()));
  so.state_budget = num.get_or<std::size_t>("state_budget", so.state_budget);
  if (memory > V.memory() + so.tail_steps)
    throw ValidationError("memory exceeds potential memory plus tail_steps", task.field("memory"));
  const bool write_paths = task.get_or<bool>("write_paths", false);
  TransferOptions topts;
  topts.state_budget = so.state_budget;
  const std::uint64_t seed = c.seed;

  return [m, n, count, memory, so, write_paths, topts, seed](const Artifacts& art) {
    const Potential& V = m.pot->V;
    const int d = m.steps.dimension();
    const PolymerSampleBatch batch = sample_paths(*m.env, m.steps, V, n, count, seed, so);
    std::map<Point, std::pair<std::size_t, double>> endpoints;
    for (std::size_t i = 0; i < batch.count; ++i) ++endpoints[batch.position(i, n)].first;
    for (const auto& [x, p] : endpoint_distribution(*m.env, m.steps, V, n, topts)) endpoints[x].second = p;
    double tv = 0.0;
    {
      auto csv = art.csv("endpoints.csv", concat(coordinate_columns("x", d), {"count", "empirical", "exact"}));
      for (const auto& [x, e] : endpoints) {
        const double emp = static_cast<double>(e.first) / static_cast<double>(batch.count);
        tv += 0.5 * std::abs(emp - e.second);
        put_point(csv, x);
        csv.integer(static_cast<long long>(e.first)) << emp << e.second;
        csv.end_row();
      }
    }
    if (n >= 1) {
      const EmpiricalMeasure em = empirical_measure(batch, memory);
      auto csv = art.csv("empirical_measure.csv", {"pattern", "tuple_code", "steps", "mass"});
      const std::size_t tuples = tuple_count(memory, em.step_count);
      for (std::size_t i = 0; i < em.mass.size(); ++i) {
        csv.integer(static_cast<long long>(i / tuples)).integer(static_cast<long long>(i % tuples));
        csv << tuple_text(i % tuples, memory, em.step_count) << em.mass[i];
        csv.end_row();
      }
    }
    if (write_paths) {
      auto csv = art.csv("paths.csv", concat({"path", "k", "step"}, coordinate_columns("x", d)));
      for (std::size_t i = 0; i < batch.count; ++i) {
        const auto path = batch.path(i);
        Point x = m.steps.origin();
        for (std::size_t k = 0; k < path.size(); ++k) {
          x += m.steps[path[k]];
          csv.integer(static_cast<long long>(i)).integer(static_cast<long long>(k + 1)).integer(path[k]);
          put_point(csv, x);
          csv.end_row();
        }
      }
    }
    art.write_json("sample.json", {{"n", n},
                                   {"count", batch.count},
                                   {"memory", memory},
                                   {"tail_steps", batch.tail_steps},
                                   {"log_Z", batch.log_Z},
                                   {"distinct_endpoints", endpoints.size()},
                                   {"endpoint_total_variation", tv}});
    return 0;
  };
}

// --------------------------------------------------------- mc-free-energy

Plan plan_mc(Reader& root, Reader& task, Reader& num, Common& c) {
  const Model m = read_model(root, Need::kYes, Need::kYes, c);
  require_iid(m, "mc-free-energy");
  const int n = positive(num, "n", std::nullopt);
  const auto replicas = static_cast<std::size_t>(positive(num, "replicas", 100));
  McOptions mo;
  mo.threads = c.threads;
  mo.allow_undirected = task.get_or<bool>("allow_undirected", false);
  mo.state_budget = num.get_or<std::size_t>("state_budget", mo.state_budget);
  const std::uint64_t seed = c.seed;

  return [m, n, replicas, mo, seed](const Artifacts& art) {
    const IidEnvironment& env = m.env->iid();
    const Potential& V = m.pot->V;
    const McResult r = mc_free_energy(env, m.steps, V, n, replicas, seed, mo);
    {
      auto csv = art.csv("replicas.csv", {"replica", "environment_seed", "free_energy"});
      for (std::size_t i = 0; i < r.values.size(); ++i) {
        csv.integer(static_cast<long long>(i)) << std::to_string(r.seeds[i]) << r.values[i];
        csv.end_row();
      }
    }
    json annealed = nullptr, below = nullptr;
    if (V.memory() == 0 && strictly_directed(m.steps)) {
      const double a = annealed_free_energy(env, m.steps, V);
      annealed = a;
      below = r.mean <= a + 3 * r.stderr_;
    }
    art.write_json("mc_free_energy.json", {{"n", n},
                                           {"replicas", replicas},
                                           {"mean", r.mean},
                                           {"stderr", r.stderr_},
                                           {"annealed", annealed},
                                           {"mean_below_annealed_plus_3se", below}});
    return 0;
  };
}

// -------------------------------------------------------------------- rate

struct MeasureEntry {
  std::string id;
  std::string type;
  std::vector<double> data;  // kernel or measure, flattened by state then step
};

Plan plan_rate(Reader& root, Reader& task, Reader& num, Common& c) {
  const Model m = read_model(root, Need::kYes, Need::kYes, c);
  const int d = m.steps.dimension();
  const ChainStateSpace sp1 = periodic_space(m, m.pot->g.memory(), "rate");
  const int memory2 = task.get_or<int>("level2_memory", m.pot->V.memory());
  if (memory2 < m.pot->V.memory())
    throw ValidationError("level2_memory is below the potential's memory", task.field("level2_memory"));
  const ChainStateSpace sp2 = periodic_space(m, memory2, "rate");
  const bool lln = task.get_or<bool>("lln", true);

  std::vector<std::vector<double>> zetas;
  for (const json& item : list_or_empty(num, "zetas"))
    zetas.push_back(read_real_vector(item, num.field("zetas"), static_cast<std::size_t>(d)));
  LegendreOptions lo;
  lo.t_max = num.get_or<double>("t_max", lo.t_max);
  lo.grid_points = num.get_or<int>("grid_points", lo.grid_points);
  lo.threads = c.threads;
  Level2Options l2;
  l2.tolerance = num.get_or<double>("level2_tolerance", l2.tolerance);
  l2.max_iterations = num.get_or<int>("level2_max_iterations", l2.max_iterations);
  l2.require_convergence = false;

  std::vector<MeasureEntry> measures;
  if (task.has("measures")) {
    for (Reader& r : task.children("measures")) {
      MeasureEntry ms{r.get_or<std::string>("id", "mu" + std::to_string(measures.size())), r.get<std::string>("type"), {}};
      if (ms.type == "kernel" || ms.type == "measure") {
        const std::string key = ms.type == "kernel" ? "kernel" : "mu";
        const auto rows = r.get<std::vector<std::vector<double>>>(key);
        if (rows.size() != sp2.size())
          throw ValidationError(key + " needs one row per chain state (" + std::to_string(sp2.size()) + ")", r.field(key));
        for (const auto& row : rows) ms.data.insert(ms.data.end(), row.begin(), row.end());
        at_field(r.field(key), [&] {
          if (ms.type == "kernel") {
            validate_step_kernel(sp2, ms.data);
          } else {
            validate_pair_measure(sp2, ms.data);
          }
        });
      } else if (ms.type != "tilted" && ms.type != "reference") {
        throw ValidationError("unknown measure type '" + ms.type + "' (tilted, reference, kernel, measure)", r.field("type"));
      }
      r.finish();
      measures.push_back(std::move(ms));
    }
  }
  if (zetas.empty() && !lln && measures.empty())
    throw ValidationError("rate task has nothing to compute", num.field("zetas"));

  return [m, d, sp1, sp2, lln, zetas, lo, l2, measures](const Artifacts& art) {
    json summary = {{"warnings", json::array()}, {"lln", nullptr}, {"level2", json::array()}};
    if (!zetas.empty() || lln) {
      const LambdaFn lambda = level1_lambda(sp1, sp1.tabulate(m.pot->g));
      std::vector<std::vector<double>> points = zetas;
      if (lln) points.push_back(lln_velocity(lambda, d));
      const RateCurve curve = legendre_rate(lambda, d, points, lo, &m.steps);
      summary["warnings"] = curve.warnings;
      auto csv = art.csv("rate_level1.csv", concat(concat({"kind"}, coordinate_columns("zeta", d)),
                                                   concat(concat({"lambda_star"}, coordinate_columns("t", d)),
                                                          {"at_boundary", "infinite"})));
      for (std::size_t q = 0; q < curve.points.size(); ++q) {
        const RatePoint& p = curve.points[q];
        csv << (q < zetas.size() ? "grid" : "lln");
        for (double z : p.zeta) csv << z;
        csv << p.value;
        for (int i = 0; i < d; ++i) csv << (p.infinite ? NAN : p.t[static_cast<std::size_t>(i)]);
        csv.integer(p.at_boundary).integer(p.infinite);
        csv.end_row();
      }
      if (lln) summary["lln"] = {{"velocity", points.back()}, {"lambda_star", jnum(curve.points.back().value)}};
    }
    double worst = 0.0;
    bool all_converged = true;
    if (!measures.empty()) {
      const auto V = sp2.tabulate(m.pot->V);
      std::vector<double> g(V.size());
      for (std::size_t i = 0; i < V.size(); ++i) g[i] = -V[i];
      auto csv = art.csv("rate_level2.csv", {"mu_id", "I_dual", "I_entropy", "dual_converged", "gradient_norm"});
      for (const MeasureEntry& ms : measures) {
        PairMeasure mu;
        if (ms.type == "tilted") {
          mu = tilted_stationary_measure(sp2, g);
        } else if (ms.type == "reference") {
          mu = stationary_measure(sp2, uniform_kernel(sp2));
        } else if (ms.type == "kernel") {
          mu = stationary_measure(sp2, ms.data);
        } else {
          mu = ms.data;
        }
        const Level2Result dual = level2_rate_dual(sp2, V, mu, l2);
        const Level2EntropyResult ent = level2_rate_entropy(sp2, V, mu);
        const double e = ent.infinite ? INFINITY : ent.value;
        csv << ms.id << dual.value << e;
        csv.integer(dual.converged) << dual.gradient_norm;
        csv.end_row();
        summary["level2"].push_back({{"id", ms.id},
                                     {"I_dual", jnum(dual.value)},
                                     {"I_entropy", jnum(e)},
                                     {"converged", dual.converged},
                                     {"gradient_norm", dual.gradient_norm},
                                     {"iterations", dual.iterations}});
        all_converged = all_converged && dual.converged;
        worst = std::max(worst, dual.gradient_norm);
      }
    }
    art.write_json("rate.json", summary);
    if (!all_converged) throw NonConvergenceError("level-2 dual ascent stopped before its tolerance", worst);
    return 0;
  };
}

// ----------------------------------------------------------------- lattice

Plan plan_lattice(Reader& root, Reader& task, Reader& num, Common& c) {
  const Model m = read_model(root, Need::kOptional, Need::kOptional, c);
  const int d = m.steps.dimension();
  const int reach_n = num.get_or<int>("reach_n", 3);
  if (reach_n < 0 || reach_n > kDefaultReachableCap)
    throw ValidationError("reach_n must lie in [0, " + std::to_string(kDefaultReachableCap) + "]", num.field("reach_n"));
  const int path_length = num.get_or<int>("path_length", 20);
  if (path_length < 0) throw ValidationError("path_length must be nonnegative", num.field("path_length"));
  std::vector<RationalVector> dirs;
  for (const json& item : list_or_empty(task, "directions")) {
    dirs.push_back(read_rational_vector(task, "directions", item, d));
    if (!hull_contains(m.steps, dirs.back()))
      throw ValidationError("direction is outside the convex hull of the steps",
                            task.field("directions") + "[" + std::to_string(dirs.size() - 1) + "]");
  }

  return [m, d, reach_n, path_length, dirs](const Artifacts& art) {
    const StepSet& R = m.steps;
    json steps = json::array();
    for (const Point& z : R.steps()) steps.push_back(point_json(z));
    json report = {{"dimension", d},
                   {"steps", steps},
                   {"r_max", R.r_max()},
                   {"hull_contains_zero", hull_contains_zero(R)},
                   {"zero_in_relative_interior", zero_in_relative_interior(R)},
                   {"strictly_directed", strictly_directed(R)},
                   {"generates_full_lattice", R.generates_full_lattice()},
                   {"reachable_sizes", json::array()},
                   {"directions", json::array()}};
    {
      auto csv = art.csv("reachable.csv", concat({"n"}, coordinate_columns("x", d)));
      for (int n = 0; n <= reach_n; ++n) {
        const auto D = reachable_set(R, n);
        report["reachable_sizes"].push_back(D.size());
        for (const Point& x : D) {
          csv.integer(n);
          put_point(csv, x);
          csv.end_row();
        }
      }
    }
    auto csv = art.csv("canonical_path.csv", concat({"direction", "k"}, coordinate_columns("x", d)));
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      const DirectionPath path = canonical_path(R, dirs[i]);
      report["directions"].push_back({{"xi", rational_json(dirs[i])},
                                      {"period", path.period()},
                                      {"block", path.block()},
                                      {"convex_combination", rational_json(rational_convex_combination(R, dirs[i]))}});
      const auto pts = path.prefix(path_length);
      for (std::size_t k = 0; k < pts.size(); ++k) {
        csv.integer(static_cast<long long>(i)).integer(static_cast<long long>(k));
        put_point(csv, pts[k]);
        csv.end_row();
      }
    }
    art.write_json("lattice.json", report);
    return 0;
  };
}

// ----------------------------------------------------------------- class-k

Plan plan_class_k(Reader& root, Reader& task, Reader& num, Common& c) {
  const Model m = read_model(root, Need::kYes, Need::kOptional, c);
  const int memory = task.get_or<int>("memory", m.pot ? m.pot->g.memory() : 0);
  const ChainStateSpace sp = periodic_space(m, memory, "class-k");
  const bool repair = task.get_or<bool>("repair", false);
  const double tol = num.get_or<double>("class_k_tolerance", kClassKTolerance);
  Reader corr = task.child("corrector");
  const auto source = corr.get<std::string>("source");
  const std::size_t k = sp.step_count();
  CorrectorTable F;
  if (source == "gradient") {
    F = gradient_corrector(sp, read_real_vector(corr.raw("h"), corr.field("h"), sp.size()));
  } else if (source == "table") {
    const auto rows = corr.get<std::vector<std::vector<double>>>("F");
    if (rows.size() != sp.size())
      throw ValidationError("F needs one row per chain state (" + std::to_string(sp.size()) + ")", corr.field("F"));
    for (std::size_t s = 0; s < rows.size(); ++s) {
      if (rows[s].size() != k)
        throw ValidationError("F rows need one entry per step", corr.field("F") + "[" + std::to_string(s) + "]");
      F.insert(F.end(), rows[s].begin(), rows[s].end());
    }
  } else if (source == "kbar") {
    if (!m.pot) throw ValidationError("corrector source 'kbar' needs a potential in the model", corr.field("source"));
    if (m.pot->g.memory() > memory) throw ValidationError("memory is below the potential's memory", task.field("memory"));
  } else {
    throw ValidationError("unknown corrector source '" + source + "' (gradient, table, kbar)", corr.field("source"));
  }
  corr.finish();

  return [m, sp, repair, tol, F, k](const Artifacts& art) {
    CorrectorTable table = F;
    if (table.empty()) table = gradient_corrector(sp, Kbar_minimize(sp, sp.tabulate(m.pot->g)).h);
    auto describe = [&](const ClassKReport& r) {
      json out = {{"passed", r.passed()},
                  {"integrable", r.integrable},
                  {"mean_zero", r.mean_zero},
                  {"closed_loop", r.closed_loop},
                  {"drift", r.drift},
                  {"fit_residual", r.fit_residual},
                  {"loop_witness", nullptr},
                  {"mean_zero_witness", nullptr}};
      if (r.loop_witness) {
        const LoopWitness& w = *r.loop_witness;
        out["loop_witness"] = {{"start_state", sp.describe(w.start_state)},
                               {"path_a", w.path_a},
                               {"path_b", w.path_b},
                               {"sum_a", w.sum_a},
                               {"sum_b", w.sum_b}};
      }
      if (r.mean_zero_witness) {
        const MeanZeroWitness& w = *r.mean_zero_witness;
        out["mean_zero_witness"] = {{"tuple", tuple_text(w.tuple_code, sp.memory(), k)}, {"step", w.step}, {"mean", w.mean}};
      }
      return out;
    };
    const ClassKReport report = check_class_K(sp, table, tol);
    json body = {{"report", describe(report)}, {"repaired", nullptr}};
    CorrectorTable fixed;
    if (repair && report.integrable && report.closed_loop && sp.steps().generates_full_lattice()) {
      fixed = mean_zero_correction(sp, table);
      body["repaired"] = describe(check_class_K(sp, fixed, tol));
    } else if (repair) {
      body["repaired"] = "not available: the mean-zero repair needs an integrable, closed-loop corrector and steps generating Z^d";
    }
    std::vector<std::string> header = {"state", "label", "step", "F"};
    if (!fixed.empty()) header.push_back("F_repaired");
    auto csv = art.csv("corrector.csv", header);
    for (std::size_t s = 0; s < sp.size(); ++s) {
      for (std::size_t z = 0; z < k; ++z) {
        csv.integer(static_cast<long long>(s)) << sp.describe(s);
        csv.integer(static_cast<long long>(z)) << table[s * k + z];
        if (!fixed.empty()) csv << fixed[s * k + z];
        csv.end_row();
      }
    }
    art.write_json("class_k.json", body);
    return 0;
  };
}

// ------------------------------------------------------------------- suite

Plan plan_suite(Reader& root, Reader& task, Reader& num, Common& c) {
  (void)root;
  (void)num;
  const auto name = task.get<std::string>("suite");
  const auto names = suite_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    std::string all;
    for (const auto& n : names) all += (all.empty() ? "" : ", ") + n;
    throw ValidationError("unknown suite '" + name + "' (" + all + ")", "task.suite");
  }
  const SuiteOptions opts{c.seed, c.threads};
  return [name, opts](const Artifacts& art) {
    const SuiteReport rep = run_suite(name, opts);
    json checks = json::array();
    auto csv = art.csv("suite_" + name + ".csv", {"criterion", "check", "passed", "detail"});
    for (const SuiteCheck& ch : rep.checks) {
      std::printf("[%d] %s %s: %s\n", ch.criterion, ch.passed ? "PASS" : "FAIL", ch.name.c_str(), ch.detail.c_str());
      csv.integer(ch.criterion) << ch.name;
      csv.integer(ch.passed) << ch.detail;
      csv.end_row();
      checks.push_back({{"criterion", ch.criterion}, {"name", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}});
    }
    art.write_json("suite_" + name + ".json", {{"suite", name}, {"passed", rep.passed()}, {"checks", checks}});
    std::printf("suite %s: %s\n", name.c_str(), rep.passed() ? "PASS" : "FAIL");
    return rep.passed() ? 0 : 1;
  };
}

// ---------------------------------------------------------------- execute

int exit_code_for(const Error& e) {
  const std::string& k = e.kind();
  if (k == "nonconvergence" || k == "state_budget" || k == "bound_exceeded") return 3;
  if (k == "validation" || k == "infeasible_point" || k == "reducible_operator" || k == "zero_probability_step" ||
      k == "no_closed_loop" || k == "no_path")
    return 2;
  return 1;
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file " + path, "config");
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ValidationError("config is not valid JSON: " + std::string(e.what()), "config");
  }
}

std::filesystem::path out_dir(const Invocation& inv) {
  if (inv.out_dir) return *inv.out_dir;
  if (const char* env = std::getenv("RWRP_OUT_DIR"); env && *env) return env;
  return "rwrp-out";
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names = {"free-energy", "verify-duality", "sample", "mc-free-energy",
                                                 "rate",        "lattice",        "class-k"};
  return names;
}

Plan plan_task(const std::string& task, Reader& root, Reader& task_block, Reader& numeric, Common& common) {
  if (task == "free-energy") return plan_free_energy(root, task_block, numeric, common);
  if (task == "verify-duality") return plan_verify_duality(root, task_block, numeric, common);
  if (task == "sample") return plan_sample(root, task_block, numeric, common);
  if (task == "mc-free-energy") return plan_mc(root, task_block, numeric, common);
  if (task == "rate") return plan_rate(root, task_block, numeric, common);
  if (task == "lattice") return plan_lattice(root, task_block, numeric, common);
  if (task == "class-k") return plan_class_k(root, task_block, numeric, common);
  if (task == "suite") return plan_suite(root, task_block, numeric, common);
  throw ValidationError("unknown task '" + task + "'", "task.name");
}

int execute(const Invocation& inv) {
  const auto start = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  std::optional<Artifacts> art;
  std::size_t threads = 1;
  int code = 0;
  json error = nullptr;
  try {
    json config = inv.config_path ? load_config(*inv.config_path) : json::object();
    if (!config.is_object()) throw ValidationError("config root must be an object", "config");
    for (const char* block : {"task", "numeric"}) {
      if (!config.contains(block)) config[block] = json::object();
    }
    json& tnode = config["task"];
    if (!tnode.is_object()) throw ValidationError("field task must be an object", "task");
    std::string task = inv.command;
    if (tnode.contains("name")) {
      if (!tnode["name"].is_string()) throw ValidationError("field task.name must be a string", "task.name");
      const auto named = tnode["name"].get<std::string>();
      if (inv.command != "run" && named != inv.command)
        throw ValidationError("config task '" + named + "' does not match command '" + inv.command + "'", "task.name");
      task = named;
    } else if (inv.command == "run") {
      throw ValidationError("missing required field task.name", "task.name");
    } else {
      tnode["name"] = task;
    }
    if (inv.suite) {
      if (task != "suite") throw ValidationError("--suite only applies to the suite command", "suite");
      tnode["suite"] = *inv.suite;
    }
    if (inv.seed) config["numeric"]["seed"] = *inv.seed;
    if (inv.threads) config["numeric"]["threads"] = *inv.threads;

    Reader root(config, "");
    Reader tb = root.child("task");
    tb.get<std::string>("name");
    Reader num = root.child("numeric");
    Common common;
    common.seed = num.get_or<std::uint64_t>("seed", kDefaultSeed);
    common.threads = num.get_or<std::size_t>("threads", 1);
    if (common.threads == 0) throw ValidationError("threads must be positive", "numeric.threads");
    threads = common.threads;
    common.seeds.push_back(common.seed);
    const Plan plan = plan_task(task, root, tb, num, common);
    tb.finish();
    num.finish();
    root.finish();

    json resolved = config;
    resolved["numeric"].erase("threads");  // results do not depend on it
    const std::string hash = hex64(fnv1a64(resolved.dump()));
    art.emplace(out_dir(inv), task, hash, common.seeds);
    art->write_json("resolved_config.json", {{"config", resolved}});
    code = plan(*art);
  } catch (const Error& e) {
    code = exit_code_for(e);
    error = {{"kind", e.kind()}, {"message", e.what()}};
    std::string line = "rwrp: error kind=" + e.kind();
    if (const auto* v = dynamic_cast<const ValidationError*>(&e); v && !v->field().empty()) {
      error["field"] = v->field();
      line += " field=" + v->field();
    }
    if (const auto* n = dynamic_cast<const NonConvergenceError*>(&e)) {
      error["gap"] = jnum(n->gap());
      line += " gap=" + cli::num(n->gap());
    }
    std::cerr << line << " exit=" << code << " message=" << json(std::string(e.what())).dump() << std::endl;
  } catch (const std::exception& e) {
    code = 1;
    error = {{"kind", "internal"}, {"message", e.what()}};
    std::cerr << "rwrp: error kind=internal exit=1 message=" << json(std::string(e.what())).dump() << std::endl;
  }
  if (art) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char* status = code == 0 ? "ok" : code == 2 ? "validation" : code == 3 ? "nonconvergence" : "failed";
    try {
      art->write_json("run.json", {{"status", status},
                                   {"exit_code", code},
                                   {"error", error},
                                   {"started_utc", started},
                                   {"wall_clock_seconds", secs},
                                   {"threads", threads}});
    } catch (const std::exception& e) {
      std::cerr << "rwrp: error kind=internal exit=1 message=" << json(std::string(e.what())).dump() << std::endl;
      if (code == 0) code = 1;
    }
  }
  return code;
}

}  // namespace rwrp::cli
