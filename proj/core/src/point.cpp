#include "rwrp/point.hpp"

#include <cmath>
#include <cstdlib>

#include "rwrp/errors.hpp"

namespace rwrp {

Point::Point(int dim) : dim_(dim) {
  if (dim < 0 || dim > kMaxDimension) {
    throw ValidationError("dimension " + std::to_string(dim) + " outside [0, " +
                          std::to_string(kMaxDimension) + "]");
  }
}

Point::Point(std::initializer_list<std::int64_t> coords)
    : Point(static_cast<int>(coords.size())) {
  int i = 0;
  for (auto v : coords) c_[static_cast<std::size_t>(i++)] = v;
}

Point Point::from(std::span<const std::int64_t> coords) {
  Point p(static_cast<int>(coords.size()));
  for (std::size_t i = 0; i < coords.size(); ++i) p.c_[i] = coords[i];
  return p;
}

bool Point::is_zero() const noexcept {
  for (int i = 0; i < dim_; ++i)
    if ((*this)[i] != 0) return false;
  return true;
}

double Point::norm() const noexcept {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) s += static_cast<double>((*this)[i]) * static_cast<double>((*this)[i]);
  return std::sqrt(s);
}

std::int64_t Point::sup_norm() const noexcept {
  std::int64_t m = 0;
  for (int i = 0; i < dim_; ++i) m = std::max<std::int64_t>(m, std::llabs((*this)[i]));
  return m;
}

std::int64_t Point::dot(const Point& o) const noexcept {
  std::int64_t s = 0;
  for (int i = 0; i < dim_; ++i) s += (*this)[i] * o[i];
  return s;
}

Point& Point::operator+=(const Point& o) noexcept {
  for (int i = 0; i < kMaxDimension; ++i) c_[static_cast<std::size_t>(i)] += o.c_[static_cast<std::size_t>(i)];
  if (dim_ == 0) dim_ = o.dim_;
  return *this;
}

Point& Point::operator-=(const Point& o) noexcept {
  for (int i = 0; i < kMaxDimension; ++i) c_[static_cast<std::size_t>(i)] -= o.c_[static_cast<std::size_t>(i)];
  if (dim_ == 0) dim_ = o.dim_;
  return *this;
}

Point operator-(Point a) noexcept {
  for (auto& v : a.c_) v = -v;
  return a;
}

Point operator*(std::int64_t k, Point a) noexcept {
  for (auto& v : a.c_) v *= k;
  return a;
}

std::string Point::to_string() const {
  std::string s = "(";
  for (int i = 0; i < dim_; ++i) {
    if (i) s += ",";
    s += std::to_string((*this)[i]);
  }
  return s + ")";
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::size_t PointHash::operator()(const Point& p) const noexcept {
  std::uint64_t h = static_cast<std::uint64_t>(p.dim());
  for (int i = 0; i < p.dim(); ++i) h = mix64(h ^ static_cast<std::uint64_t>(p[i]));
  return static_cast<std::size_t>(h);
}

}  // namespace rwrp
