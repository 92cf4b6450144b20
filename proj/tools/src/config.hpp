#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include <rwrp/environment.hpp>
#include <rwrp/errors.hpp>
#include <rwrp/lattice.hpp>
#include <rwrp/potential.hpp>
#include <rwrp/rational.hpp>

namespace rwrp::cli {

using nlohmann::json;

/// Typed view of one object in the config. Reads are recorded so that
/// finish() can reject keys nobody asked for. Defaults are written back into
/// the node, which turns the parsed document into the resolved config.
class Reader {
 public:
  Reader(json& node, std::string path);

  const std::string& path() const noexcept { return path_; }
  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const;

  json& raw(const std::string& key);
  Reader child(const std::string& key);
  std::vector<Reader> children(const std::string& key);

  template <class T>
  T get(const std::string& key);
  template <class T>
  T get_or(const std::string& key, T fallback);

  /// Throws ValidationError naming the first key that was never read.
  void finish() const;

 private:
  json* node_;
  std::string path_;
  std::set<std::string> used_;
};

template <class T>
T Reader::get(const std::string& key) {
  const json& j = raw(key);
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ValidationError("field " + field(key) + " has the wrong type", field(key));
  }
}

template <class T>
T Reader::get_or(const std::string& key, T fallback) {
  if (!has(key)) {
    (*node_)[key] = fallback;
    used_.insert(key);
    return fallback;
  }
  return get<T>(key);
}

/// Runs fn and prefixes the field of any ValidationError with `path`.
template <class Fn>
auto at_field(const std::string& path, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    throw ValidationError(e.what(), e.field().empty() ? path : path + "." + e.field());
  }
}

StepSet read_steps(Reader& model);
Environment read_environment(Reader& model, int dimension, std::uint64_t default_seed);
Potential read_potential(Reader& block, std::size_t step_count);

/// The model carries exactly one of a "g" or a "V" block; g = -V.
struct PotentialPair {
  Potential g;
  Potential V;
};
PotentialPair read_potentials(Reader& model, std::size_t step_count);
RationalVector read_rational_vector(Reader& r, const std::string& key, const json& item, int dimension);
std::vector<double> read_real_vector(const json& item, const std::string& field, std::size_t size);

}  // namespace rwrp::cli
