#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "rwrp/errors.hpp"
#include "rwrp/rational.hpp"

namespace rwrp {
namespace {

__extension__ using i128 = __int128;

struct FractionOverflow : std::overflow_error {
  FractionOverflow() : std::overflow_error("fraction overflow") {}
};

// int64 fraction with overflow detection; the fast path for the tiny
// tableaus that step-set geometry produces.
class Fraction {
 public:
  Fraction() = default;
  Fraction(std::int64_t n) : n_(n) {}  // NOLINT(google-explicit-constructor)
  Fraction(i128 n, i128 d) { assign(n, d); }

  static Fraction from(const Rational& r) {
    using boost::multiprecision::cpp_int;
    const cpp_int& num = boost::multiprecision::numerator(r);
    const cpp_int& den = boost::multiprecision::denominator(r);
    const cpp_int lim = std::numeric_limits<std::int64_t>::max();
    if (abs(num) > lim || den > lim) throw FractionOverflow();
    return Fraction(static_cast<i128>(num.convert_to<std::int64_t>()),
                    static_cast<i128>(den.convert_to<std::int64_t>()));
  }

  Rational to_rational() const { return Rational(n_) / Rational(d_); }

  friend Fraction operator+(const Fraction& a, const Fraction& b) {
    return Fraction(static_cast<i128>(a.n_) * b.d_ + static_cast<i128>(b.n_) * a.d_,
                    static_cast<i128>(a.d_) * b.d_);
  }
  friend Fraction operator-(const Fraction& a, const Fraction& b) {
    return Fraction(static_cast<i128>(a.n_) * b.d_ - static_cast<i128>(b.n_) * a.d_,
                    static_cast<i128>(a.d_) * b.d_);
  }
  friend Fraction operator*(const Fraction& a, const Fraction& b) {
    return Fraction(static_cast<i128>(a.n_) * b.n_, static_cast<i128>(a.d_) * b.d_);
  }
  friend Fraction operator/(const Fraction& a, const Fraction& b) {
    if (b.n_ == 0) throw std::domain_error("division by zero");
    return Fraction(static_cast<i128>(a.n_) * b.d_, static_cast<i128>(a.d_) * b.n_);
  }
  friend Fraction operator-(const Fraction& a) { return Fraction(-static_cast<i128>(a.n_), a.d_); }
  friend bool operator<(const Fraction& a, const Fraction& b) {
    return static_cast<i128>(a.n_) * b.d_ < static_cast<i128>(b.n_) * a.d_;
  }
  friend bool operator>(const Fraction& a, const Fraction& b) { return b < a; }
  friend bool operator==(const Fraction& a, const Fraction& b) = default;

  bool is_zero() const { return n_ == 0; }

 private:
  void assign(i128 n, i128 d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    i128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    constexpr i128 lim = std::numeric_limits<std::int64_t>::max();
    if (n > lim || -n > lim || d > lim) throw FractionOverflow();
    n_ = static_cast<std::int64_t>(n);
    d_ = static_cast<std::int64_t>(d);
  }
  static i128 gcd128(i128 a, i128 b) {
    while (b != 0) {
      i128 t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }

  std::int64_t n_ = 0;
  std::int64_t d_ = 1;
};

bool is_zero(const Fraction& f) { return f.is_zero(); }
bool is_zero(const Rational& r) { return r == 0; }

template <class T>
std::optional<std::vector<T>> phase_one(const std::vector<std::vector<T>>& A, std::vector<T> b) {
  const std::size_t m = A.size();
  const std::size_t n = m ? A[0].size() : 0;
  const std::size_t cols = n + m;  // originals then artificials
  std::vector<std::vector<T>> tab(m + 1, std::vector<T>(cols + 1, T(0)));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    const bool flip = b[i] < T(0);
    for (std::size_t j = 0; j < n; ++j) tab[i][j] = flip ? -A[i][j] : A[i][j];
    tab[i][n + i] = T(1);
    tab[i][cols] = flip ? -b[i] : b[i];
    basis[i] = n + i;
  }
  // objective row: reduced costs for minimizing the sum of artificials
  for (std::size_t j = 0; j <= cols; ++j) {
    if (j >= n && j < cols) continue;
    T s(0);
    for (std::size_t i = 0; i < m; ++i) s = s - tab[i][j];
    tab[m][j] = s;
  }

  for (std::size_t iter = 0; iter < 10000; ++iter) {
    std::size_t enter = cols;
    for (std::size_t j = 0; j < cols; ++j) {
      if (tab[m][j] < T(0)) {
        enter = j;
        break;
      }
    }
    if (enter == cols) break;
    std::size_t leave = m;
    T best(0);
    for (std::size_t i = 0; i < m; ++i) {
      if (!(tab[i][enter] > T(0))) continue;
      T ratio = tab[i][cols] / tab[i][enter];
      if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == m) break;  // unbounded cannot happen in phase I
    const T piv = tab[leave][enter];
    for (auto& v : tab[leave]) v = v / piv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave || is_zero(tab[i][enter])) continue;
      const T factor = tab[i][enter];
      for (std::size_t j = 0; j <= cols; ++j) tab[i][j] = tab[i][j] - factor * tab[leave][j];
    }
    basis[leave] = enter;
  }
  if (!is_zero(tab[m][cols])) return std::nullopt;
  std::vector<T> x(n, T(0));
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) x[basis[i]] = tab[i][cols];
  return x;
}

}  // namespace

std::optional<RationalVector> find_nonnegative_solution(const std::vector<RationalVector>& A,
                                                        const RationalVector& b) {
  if (A.size() != b.size()) throw ValidationError("row count of A differs from length of b");
  for (const auto& row : A)
    if (!A.empty() && row.size() != A[0].size()) throw ValidationError("ragged constraint matrix");
  try {
    std::vector<std::vector<Fraction>> Af(A.size());
    std::vector<Fraction> bf(b.size());
    for (std::size_t i = 0; i < A.size(); ++i) {
      for (const auto& v : A[i]) Af[i].push_back(Fraction::from(v));
      bf[i] = Fraction::from(b[i]);
    }
    auto x = phase_one(Af, bf);
    if (!x) return std::nullopt;
    RationalVector out;
    out.reserve(x->size());
    for (const auto& v : *x) out.push_back(v.to_rational());
    return out;
  } catch (const FractionOverflow&) {
    return phase_one(A, b);
  }
}

Rational parse_rational(std::string_view text) {
  auto parse_int = [&](std::string_view s) -> boost::multiprecision::cpp_int {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    std::size_t i = 0;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) i = 1;
    if (i >= s.size()) throw ValidationError("malformed rational '" + std::string(text) + "'");
    for (std::size_t k = i; k < s.size(); ++k)
      if (s[k] < '0' || s[k] > '9')
        throw ValidationError("malformed rational '" + std::string(text) + "'");
    return boost::multiprecision::cpp_int(std::string(s));
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  auto num = parse_int(text.substr(0, slash));
  auto den = parse_int(text.substr(slash + 1));
  if (den == 0) throw ValidationError("zero denominator in '" + std::string(text) + "'");
  return Rational(num, den);
}

std::string to_string(const Rational& r) {
  if (boost::multiprecision::denominator(r) == 1) return boost::multiprecision::numerator(r).str();
  return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

boost::multiprecision::cpp_int common_denominator(const RationalVector& v) {
  boost::multiprecision::cpp_int l = 1;
  for (const auto& x : v) l = boost::multiprecision::lcm(l, boost::multiprecision::denominator(x));
  return l;
}

}  // namespace rwrp
