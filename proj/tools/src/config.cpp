#include "config.hpp"

#include <rwrp/errors.hpp>

namespace rwrp::cli {

Reader::Reader(json& node, std::string path) : node_(&node), path_(std::move(path)) {
  if (!node_->is_object()) throw ValidationError("field " + (path_.empty() ? "<root>" : path_) + " must be an object", path_);
}

bool Reader::has(const std::string& key) const { return node_->contains(key); }

json& Reader::raw(const std::string& key) {
  if (!has(key)) throw ValidationError("missing required field " + field(key), field(key));
  used_.insert(key);
  return (*node_)[key];
}

Reader Reader::child(const std::string& key) { return Reader(raw(key), field(key)); }

std::vector<Reader> Reader::children(const std::string& key) {
  json& arr = raw(key);
  if (!arr.is_array()) throw ValidationError("field " + field(key) + " must be a list", field(key));
  std::vector<Reader> out;
  for (std::size_t i = 0; i < arr.size(); ++i) out.emplace_back(arr[i], field(key) + "[" + std::to_string(i) + "]");
  return out;
}

void Reader::finish() const {
  for (const auto& [key, value] : node_->items()) {
    if (!used_.count(key)) throw ValidationError("unknown field " + field(key), field(key));
  }
}

StepSet read_steps(Reader& model) {
  const int d = model.get<int>("dimension");
  const auto raw = model.get<std::vector<std::vector<std::int64_t>>>("steps");
  std::vector<Point> pts;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i].size() != static_cast<std::size_t>(d)) {
      const std::string f = model.field("steps") + "[" + std::to_string(i) + "]";
      throw ValidationError(f + " has " + std::to_string(raw[i].size()) + " coordinates, expected " + std::to_string(d), f);
    }
    Point p(d);
    for (int j = 0; j < d; ++j) p[j] = raw[i][static_cast<std::size_t>(j)];
    pts.push_back(p);
  }
  return at_field(model.path(), [&] { return StepSet(d, std::move(pts)); });
}

Environment read_environment(Reader& model, int dimension, std::uint64_t default_seed) {
  Reader env = model.child("environment");
  const auto type = env.get<std::string>("type");
  Environment out = [&]() -> Environment {
    if (type == "periodic") {
      auto period = env.get<std::vector<std::int64_t>>("period");
      if (period.size() != static_cast<std::size_t>(dimension))
        throw ValidationError("period has the wrong dimension", env.field("period"));
      auto cells = env.get<std::vector<int>>("cells");
      auto values = env.get_or<std::vector<double>>("values", {});
      return at_field(env.path(), [&] { return PeriodicEnvironment(period, cells, values); });
    }
    if (type == "iid") {
      std::vector<AlphabetEntry> alphabet;
      for (Reader& a : env.children("alphabet")) {
        alphabet.push_back({a.get<double>("value"), a.get<double>("prob")});
        a.finish();
      }
      const auto seed = env.get_or<std::uint64_t>("seed", default_seed);
      return at_field(env.path(), [&] { return IidEnvironment(dimension, alphabet, seed); });
    }
    throw ValidationError("unknown environment type '" + type + "' (periodic, iid)", env.field("type"));
  }();
  env.finish();
  return out;
}

Potential read_potential(Reader& block, std::size_t step_count) {
  const auto type = block.get<std::string>("type");
  Potential p = [&]() -> Potential {
    if (type == "zero") return constant_potential(0.0, block.get_or<int>("memory", 0));
    if (type == "constant") return constant_potential(block.get<double>("value"), block.get_or<int>("memory", 0));
    if (type == "polymer") return polymer_potential(block.get<double>("beta"));
    if (type == "rwre") {
      auto rows = block.get<std::vector<std::vector<double>>>("kernel");
      return at_field(block.path(), [&] {
        validate_kernel_rows(rows, step_count);
        return rwre_potential(symbol_kernel(std::move(rows)));
      });
    }
    if (type == "symbol-table" || type == "cell-table") {
      const int memory = block.get_or<int>("memory", 0);
      auto table = block.get<std::vector<std::vector<double>>>("table");
      return at_field(block.path(), [&] {
        return type == "symbol-table" ? symbol_table_potential(memory, step_count, std::move(table))
                                      : cell_table_potential(memory, step_count, std::move(table));
      });
    }
    throw ValidationError("unknown potential type '" + type + "' (zero, constant, polymer, rwre, symbol-table, cell-table)",
                          block.field("type"));
  }();
  block.finish();
  return p;
}

PotentialPair read_potentials(Reader& model, std::size_t step_count) {
  const bool g = model.has("g"), v = model.has("V");
  if (g == v) throw ValidationError("model needs exactly one of 'g' or 'V'", model.field("g"));
  Reader block = model.child(g ? "g" : "V");
  const Potential p = read_potential(block, step_count);
  return g ? PotentialPair{p, p.negated()} : PotentialPair{p.negated(), p};
}

RationalVector read_rational_vector(Reader& r, const std::string& key, const json& item, int dimension) {
  const std::string f = r.field(key);
  if (!item.is_array() || item.size() != static_cast<std::size_t>(dimension))
    throw ValidationError(f + " entries must be lists of " + std::to_string(dimension) + " rationals", f);
  RationalVector out;
  for (const json& x : item) {
    if (x.is_string()) {
      out.push_back(at_field(f, [&] { return parse_rational(x.get<std::string>()); }));
    } else if (x.is_number_integer()) {
      out.emplace_back(x.get<std::int64_t>());
    } else {
      throw ValidationError(f + " entries must be integers or \"p/q\" strings", f);
    }
  }
  return out;
}

std::vector<double> read_real_vector(const json& item, const std::string& field, std::size_t size) {
  if (!item.is_array() || item.size() != size)
    throw ValidationError(field + " must be a list of " + std::to_string(size) + " numbers", field);
  std::vector<double> out;
  for (const json& x : item) {
    if (!x.is_number()) throw ValidationError(field + " must contain numbers", field);
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace rwrp::cli
