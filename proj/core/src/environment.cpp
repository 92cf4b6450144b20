#include "rwrp/environment.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "rwrp/errors.hpp"

namespace rwrp {

PeriodicEnvironment::PeriodicEnvironment(std::vector<std::int64_t> period, std::vector<int> cells,
                                         std::vector<double> values)
    : period_(std::move(period)), cells_(std::move(cells)), values_(std::move(values)) {
  if (period_.empty() || static_cast<int>(period_.size()) > kMaxDimension)
    throw ValidationError("period must have between 1 and " + std::to_string(kMaxDimension) +
                              " coordinates",
                          "period");
  std::size_t sites = 1;
  for (auto L : period_) {
    if (L < 1) throw ValidationError("period entries must be positive", "period");
    sites *= static_cast<std::size_t>(L);
  }
  if (cells_.size() != sites)
    throw ValidationError("cell table has " + std::to_string(cells_.size()) + " entries, period needs " +
                              std::to_string(sites),
                          "cells");
  int max_symbol = 0;
  for (int s : cells_) {
    if (s < 0) throw ValidationError("negative symbol index", "cells");
    max_symbol = std::max(max_symbol, s);
  }
  if (values_.empty()) {
    for (int s = 0; s <= max_symbol; ++s) values_.push_back(static_cast<double>(s));
  }
  if (static_cast<std::size_t>(max_symbol) >= values_.size())
    throw ValidationError("symbol index " + std::to_string(max_symbol) + " exceeds alphabet size " +
                              std::to_string(values_.size()),
                          "cells");
  for (double v : values_)
    if (!std::isfinite(v)) throw ValidationError("alphabet values must be finite", "alphabet");
}

std::size_t PeriodicEnvironment::cell_index(const Point& x) const {
  std::size_t idx = 0;
  std::size_t stride = 1;
  for (std::size_t i = 0; i < period_.size(); ++i) {
    const std::int64_t L = period_[i];
    std::int64_t r = x[static_cast<int>(i)] % L;
    if (r < 0) r += L;
    idx += static_cast<std::size_t>(r) * stride;
    stride *= static_cast<std::size_t>(L);
  }
  return idx;
}

Point PeriodicEnvironment::cell_point(std::size_t cell) const {
  Point p(dimension());
  for (std::size_t i = 0; i < period_.size(); ++i) {
    const auto L = static_cast<std::size_t>(period_[i]);
    p[static_cast<int>(i)] = static_cast<std::int64_t>(cell % L);
    cell /= L;
  }
  return p;
}

std::vector<double> PeriodicEnvironment::stationary_site_measure() const {
  return std::vector<double>(site_count(), 1.0 / static_cast<double>(site_count()));
}

bool PeriodicEnvironment::shift_orbit_transitive(const StepSet& steps) const {
  if (steps.dimension() != dimension())
    throw ValidationError("step set and environment dimensions differ");
  std::vector<char> seen(site_count(), 0);
  std::queue<std::size_t> q;
  q.push(0);
  seen[0] = 1;
  std::size_t count = 1;
  while (!q.empty()) {
    const Point p = cell_point(q.front());
    q.pop();
    for (const auto& z : steps.steps()) {
      for (const Point& n : {p + z, p - z}) {
        const auto c = cell_index(n);
        if (!seen[c]) {
          seen[c] = 1;
          ++count;
          q.push(c);
        }
      }
    }
  }
  return count == site_count();
}

IidEnvironment::IidEnvironment(int dimension, std::vector<AlphabetEntry> alphabet, std::uint64_t seed)
    : dimension_(dimension), alphabet_(std::move(alphabet)), seed_(seed) {
  if (dimension < 1 || dimension > kMaxDimension)
    throw ValidationError("dimension outside supported range", "dimension");
  if (alphabet_.empty()) throw ValidationError("alphabet is empty", "alphabet");
  double total = 0.0;
  for (std::size_t i = 0; i < alphabet_.size(); ++i) {
    const auto& a = alphabet_[i];
    if (!std::isfinite(a.value))
      throw ValidationError("alphabet value must be finite", "alphabet[" + std::to_string(i) + "].value");
    if (!(a.probability >= 0.0))
      throw ValidationError("alphabet probability must be nonnegative",
                            "alphabet[" + std::to_string(i) + "].prob");
    total += a.probability;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ValidationError("alphabet probabilities sum to " + std::to_string(total) + ", expected 1",
                          "alphabet");
  double acc = 0.0;
  for (auto& a : alphabet_) {
    a.probability /= total;
    acc += a.probability;
    cumulative_.push_back(acc);
  }
  cumulative_.back() = 1.0;
}

double IidEnvironment::uniform_at(const Point& x) const noexcept {
  std::uint64_t h = mix64(seed_);
  for (int i = 0; i < dimension_; ++i) h = mix64(h ^ static_cast<std::uint64_t>(x[i]));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

int IidEnvironment::symbol_at(const Point& x) const noexcept {
  const double u = uniform_at(x);
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return static_cast<int>(it - cumulative_.begin());
}

IidEnvironment IidEnvironment::with_seed(std::uint64_t seed) const {
  IidEnvironment copy = *this;
  copy.seed_ = seed;
  return copy;
}

Environment::Environment(PeriodicEnvironment env)
    : model_(std::move(env)), offset_(std::get<PeriodicEnvironment>(model_).dimension()) {}

Environment::Environment(IidEnvironment env)
    : model_(std::move(env)), offset_(std::get<IidEnvironment>(model_).dimension()) {}

int Environment::dimension() const noexcept {
  return std::visit([](const auto& m) { return m.dimension(); }, model_);
}

const PeriodicEnvironment& Environment::periodic() const {
  if (!is_periodic()) throw ValidationError("operation needs a periodic environment");
  return std::get<PeriodicEnvironment>(model_);
}

const IidEnvironment& Environment::iid() const {
  if (is_periodic()) throw ValidationError("operation needs an i.i.d. environment");
  return std::get<IidEnvironment>(model_);
}

int Environment::symbol_at(const Point& x) const {
  const Point y = x + offset_;
  return std::visit([&](const auto& m) { return m.symbol_at(y); }, model_);
}

double Environment::value_at(const Point& x) const {
  const Point y = x + offset_;
  return std::visit([&](const auto& m) { return m.value_at(y); }, model_);
}

std::size_t Environment::cell_at(const Point& x) const { return periodic().cell_index(x + offset_); }

Environment Environment::shifted(const Point& y) const {
  Environment copy = *this;
  copy.offset_ += y;
  return copy;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

}  // namespace rwrp
