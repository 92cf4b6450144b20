#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>

namespace rwrp {

inline constexpr int kMaxDimension = 4;

/// Integer lattice point in Z^d, d <= kMaxDimension. Unused coordinates stay zero.
class Point {
 public:
  Point() = default;
  explicit Point(int dim);
  Point(std::initializer_list<std::int64_t> coords);
  static Point from(std::span<const std::int64_t> coords);

  int dim() const noexcept { return dim_; }
  std::int64_t operator[](int i) const noexcept { return c_[static_cast<std::size_t>(i)]; }
  std::int64_t& operator[](int i) noexcept { return c_[static_cast<std::size_t>(i)]; }

  bool is_zero() const noexcept;
  double norm() const noexcept;
  std::int64_t sup_norm() const noexcept;
  std::int64_t dot(const Point& o) const noexcept;

  Point& operator+=(const Point& o) noexcept;
  Point& operator-=(const Point& o) noexcept;
  friend Point operator+(Point a, const Point& b) noexcept { return a += b; }
  friend Point operator-(Point a, const Point& b) noexcept { return a -= b; }
  friend Point operator-(Point a) noexcept;
  friend Point operator*(std::int64_t k, Point a) noexcept;

  auto operator<=>(const Point&) const = default;
  bool operator==(const Point&) const = default;

  std::string to_string() const;

 private:
  int dim_ = 0;
  std::array<std::int64_t, kMaxDimension> c_{};
};

std::uint64_t mix64(std::uint64_t x) noexcept;

struct PointHash {
  std::size_t operator()(const Point& p) const noexcept;
};

}  // namespace rwrp
