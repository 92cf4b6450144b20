#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "rwrp/lattice.hpp"
#include "rwrp/point.hpp"

namespace rwrp {

/// Environment that repeats with period L along each axis. The quenched
/// environment space is the finite orbit of this table under lattice shifts,
/// carrying the uniform measure.
class PeriodicEnvironment {
 public:
  /// `cells` lists one symbol index per fundamental-domain site, first
  /// coordinate fastest. `values` gives the real value of each symbol; when
  /// empty, symbol i has value i.
  PeriodicEnvironment(std::vector<std::int64_t> period, std::vector<int> cells,
                      std::vector<double> values = {});

  int dimension() const noexcept { return static_cast<int>(period_.size()); }
  const std::vector<std::int64_t>& period() const noexcept { return period_; }
  std::size_t site_count() const noexcept { return cells_.size(); }
  std::size_t alphabet_size() const noexcept { return values_.size(); }
  const std::vector<int>& cells() const noexcept { return cells_; }
  const std::vector<double>& symbol_values() const noexcept { return values_; }

  /// Index of x mod L in the fundamental domain.
  std::size_t cell_index(const Point& x) const;
  /// Representative of a cell inside [0, L).
  Point cell_point(std::size_t cell) const;

  int symbol_at(const Point& x) const { return cells_[cell_index(x)]; }
  double value_at(const Point& x) const { return values_[static_cast<std::size_t>(symbol_at(x))]; }

  /// Uniform probability over the fundamental-domain sites.
  std::vector<double> stationary_site_measure() const;

  /// True when shifts by the group generated by `steps` act transitively on the
  /// torus, which is what ergodicity of the orbit measure needs.
  bool shift_orbit_transitive(const StepSet& steps) const;

 private:
  std::vector<std::int64_t> period_;
  std::vector<int> cells_;
  std::vector<double> values_;
};

struct AlphabetEntry {
  double value = 0.0;
  double probability = 0.0;
};

/// I.i.d. field over a finite alphabet. The symbol at x is a pure function of
/// (seed, x) through a counter-based hash, so the field needs no storage and
/// is reproducible across runs and thread counts.
class IidEnvironment {
 public:
  IidEnvironment(int dimension, std::vector<AlphabetEntry> alphabet, std::uint64_t seed);

  int dimension() const noexcept { return dimension_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const std::vector<AlphabetEntry>& alphabet() const noexcept { return alphabet_; }
  std::size_t alphabet_size() const noexcept { return alphabet_.size(); }

  /// Uniform variate in [0, 1) attached to site x.
  double uniform_at(const Point& x) const noexcept;
  int symbol_at(const Point& x) const noexcept;
  double value_at(const Point& x) const noexcept {
    return alphabet_[static_cast<std::size_t>(symbol_at(x))].value;
  }

  /// Same alphabet, different seed.
  IidEnvironment with_seed(std::uint64_t seed) const;

 private:
  int dimension_;
  std::vector<AlphabetEntry> alphabet_;
  std::vector<double> cumulative_;
  std::uint64_t seed_;
};

/// A quenched environment omega seen from an offset: value_at(x) is the base
/// model at x + offset, which realizes T_offset omega.
class Environment {
 public:
  Environment(PeriodicEnvironment env);  // NOLINT(google-explicit-constructor)
  Environment(IidEnvironment env);       // NOLINT(google-explicit-constructor)

  int dimension() const noexcept;
  bool is_periodic() const noexcept { return std::holds_alternative<PeriodicEnvironment>(model_); }
  const PeriodicEnvironment& periodic() const;
  const IidEnvironment& iid() const;
  const Point& offset() const noexcept { return offset_; }

  int symbol_at(const Point& x) const;
  double value_at(const Point& x) const;
  /// Fundamental-domain cell of x (periodic environments only).
  std::size_t cell_at(const Point& x) const;

  /// The environment T_y omega.
  Environment shifted(const Point& y) const;

 private:
  std::variant<PeriodicEnvironment, IidEnvironment> model_;
  Point offset_;
};

/// Mixes a master seed with an index into an independent 64-bit seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

}  // namespace rwrp
