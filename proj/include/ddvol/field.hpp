#pragma once

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <optional>
#include <string>

#include "ddvol/error.hpp"

namespace ddvol {

using Q = mpq_class;
using cd = std::complex<double>;

inline const double kPi = std::acos(-1.0);

// Parses "p", "p/q" or a decimal literal such as "-1.25e-3" into an exact rational.
inline std::optional<Q> parse_rational(const std::string& s) {
  if (s.empty()) return std::nullopt;
  if (s.find('/') != std::string::npos) {
    Q q;
    if (q.set_str(s, 10) != 0) return std::nullopt;
    if (q.get_den() == 0) return std::nullopt;
    q.canonicalize();
    return q;
  }
  size_t i = 0;
  bool neg = false;
  if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
  std::string digits;
  long exp10 = 0;
  bool seen_digit = false, seen_dot = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c >= '0' && c <= '9') {
      digits.push_back(c);
      seen_digit = true;
      if (seen_dot) --exp10;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else if (c == 'e' || c == 'E') {
      break;
    } else {
      return std::nullopt;
    }
  }
  if (!seen_digit) return std::nullopt;
  if (i < s.size()) {
    std::string e = s.substr(i + 1);
    if (e.empty()) return std::nullopt;
    size_t used = 0;
    long ev;
    try {
      ev = std::stol(e, &used);
    } catch (...) {
      return std::nullopt;
    }
    if (used != e.size() || ev > 10000 || ev < -10000) return std::nullopt;
    exp10 += ev;
  }
  mpz_class num(digits, 10);
  mpz_class pow10;
  mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
  Q q = exp10 < 0 ? Q(num, pow10) : Q(num * pow10);
  q.canonicalize();
  if (neg) q = -q;
  return q;
}

inline std::string rational_string(const Q& q) { return q.get_str(10); }

// Exact complex rational, used for geometry over Q(i).
struct QC {
  Q re, im;
  QC() = default;
  QC(Q r, Q i) : re(std::move(r)), im(std::move(i)) {}
  friend QC operator+(const QC& x, const QC& y) { return {x.re + y.re, x.im + y.im}; }
  friend QC operator-(const QC& x, const QC& y) { return {x.re - y.re, x.im - y.im}; }
  friend QC operator-(const QC& x) { return {-x.re, -x.im}; }
  friend QC operator*(const QC& x, const QC& y) {
    return {x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re};
  }
  friend bool operator==(const QC& x, const QC& y) { return x.re == y.re && x.im == y.im; }
  QC conj() const { return {re, -im}; }
  Q norm2() const { return re * re + im * im; }
  cd to_cd() const { return {re.get_d(), im.get_d()}; }
  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
};

// Im(conj(x)*y): twice the signed area of the triangle spanned by x, y.
inline Q cross(const QC& x, const QC& y) { return x.re * y.im - x.im * y.re; }
inline Q dot(const QC& x, const QC& y) { return x.re * y.re + x.im * y.im; }
inline double cross(cd x, cd y) { return x.real() * y.imag() - x.imag() * y.real(); }
inline double dot(cd x, cd y) { return x.real() * y.real() + x.imag() * y.imag(); }

// i^j for the exact quarter-turn roots.
inline QC quarter_turn(int j) {
  switch (((j % 4) + 4) % 4) {
    case 0: return {Q(1), Q(0)};
    case 1: return {Q(0), Q(1)};
    case 2: return {Q(-1), Q(0)};
    default: return {Q(0), Q(-1)};
  }
}

// Elements a + b*w of Q(i) (w = i) or Q(omega) (w = omega = e^{2 pi i/3}).
// Rational elements carry kind Rational and combine with either field.
enum class CycKind : unsigned char { Rational, Gauss, Eisen };

inline bool exact_supported(int d) { return d == 1 || d == 2 || d == 3 || d == 4 || d == 6; }
inline CycKind kind_for(int d) {
  if (d == 3 || d == 6) return CycKind::Eisen;
  if (d == 1 || d == 2 || d == 4) return CycKind::Gauss;
  fail(ErrorCode::UnsupportedD, "no exact cyclotomic field for d=" + std::to_string(d));
}

class Cyc {
 public:
  Cyc() = default;
  Cyc(long v) : a_(v) {}  // NOLINT
  Cyc(Q a) : a_(std::move(a)) {}  // NOLINT
  Cyc(Q a, Q b, CycKind k) : a_(std::move(a)), b_(std::move(b)), kind_(k) { normalize(); }

  const Q& a() const { return a_; }
  const Q& b() const { return b_; }
  CycKind kind() const { return kind_; }

  static Cyc w(CycKind k) { return Cyc(Q(0), Q(1), k); }
  // Square root of a negative integer used as the imaginary unit substitute: i or sqrt(-3).
  static Cyc iota(CycKind k) {
    return k == CycKind::Eisen ? Cyc(Q(1), Q(2), k) : Cyc(Q(0), Q(1), CycKind::Gauss);
  }
  static Cyc zeta(int d, long j) {
    long m = ((j % d) + d) % d;
    switch (d) {
      case 1: return Cyc(1);
      case 2: return Cyc(m == 0 ? 1 : -1);
      case 4: {
        static const long re[4] = {1, 0, -1, 0}, im[4] = {0, 1, 0, -1};
        return Cyc(Q(re[m]), Q(im[m]), CycKind::Gauss);
      }
      case 3: {
        static const long aa[3] = {1, 0, -1}, bb[3] = {0, 1, -1};
        return Cyc(Q(aa[m]), Q(bb[m]), CycKind::Eisen);
      }
      case 6: {
        // zeta_6 = 1 + omega
        static const long aa[6] = {1, 1, 0, -1, -1, 0}, bb[6] = {0, 1, 1, 0, -1, -1};
        return Cyc(Q(aa[m]), Q(bb[m]), CycKind::Eisen);
      }
      default:
        fail(ErrorCode::UnsupportedD, "no exact d-th roots of unity for d=" + std::to_string(d));
    }
  }

  bool is_zero() const { return sgn(a_) == 0 && sgn(b_) == 0; }
  bool is_rational() const { return sgn(b_) == 0; }

  Cyc conj() const {
    if (kind_ == CycKind::Eisen) return Cyc(a_ - b_, -b_, kind_);
    return Cyc(a_, -b_, kind_);
  }
  Q norm() const {
    if (kind_ == CycKind::Eisen) return a_ * a_ - a_ * b_ + b_ * b_;
    return a_ * a_ + b_ * b_;
  }
  Cyc inverse() const {
    if (is_zero()) throw std::domain_error("Cyc: division by zero");
    Q n = norm();
    Cyc c = conj();
    return Cyc(c.a_ / n, c.b_ / n, kind_);
  }
  cd to_cd() const {
    if (kind_ == CycKind::Eisen) {
      double b = b_.get_d();
      return {a_.get_d() - 0.5 * b, b * std::sqrt(3.0) / 2.0};
    }
    return {a_.get_d(), b_.get_d()};
  }
  // Real and imaginary parts as x + y*sqrt(-m) with m = 1 (Gauss) or 3 (Eisen).
  std::pair<Q, Q> split() const {
    if (kind_ == CycKind::Eisen) return {a_ - b_ / 2, b_ / 2};
    return {a_, b_};
  }
  std::string str() const {
    auto [x, y] = split();
    const char* unit = kind_ == CycKind::Eisen ? "*sqrt(-3)" : "*i";
    if (sgn(y) == 0) return rational_string(x);
    std::string ys = rational_string(y) + unit;
    if (sgn(x) == 0) return ys;
    return rational_string(x) + (sgn(y) > 0 ? "+" : "") + ys;
  }

  friend Cyc operator+(const Cyc& x, const Cyc& y) { return Cyc(x.a_ + y.a_, x.b_ + y.b_, merge(x, y)); }
  friend Cyc operator-(const Cyc& x, const Cyc& y) { return Cyc(x.a_ - y.a_, x.b_ - y.b_, merge(x, y)); }
  friend Cyc operator-(const Cyc& x) { return Cyc(-x.a_, -x.b_, x.kind_); }
  friend Cyc operator*(const Cyc& x, const Cyc& y) {
    CycKind k = merge(x, y);
    if (sgn(x.b_) == 0) return Cyc(x.a_ * y.a_, x.a_ * y.b_, k);
    if (sgn(y.b_) == 0) return Cyc(x.a_ * y.a_, x.b_ * y.a_, k);
    Q bd = x.b_ * y.b_;
    if (k == CycKind::Eisen) return Cyc(x.a_ * y.a_ - bd, x.a_ * y.b_ + x.b_ * y.a_ - bd, k);
    return Cyc(x.a_ * y.a_ - bd, x.a_ * y.b_ + x.b_ * y.a_, k);
  }
  friend Cyc operator/(const Cyc& x, const Cyc& y) { return x * y.inverse(); }
  Cyc& operator+=(const Cyc& y) { return *this = *this + y; }
  Cyc& operator-=(const Cyc& y) { return *this = *this - y; }
  Cyc& operator*=(const Cyc& y) { return *this = *this * y; }
  friend bool operator==(const Cyc& x, const Cyc& y) { return x.a_ == y.a_ && x.b_ == y.b_; }
  friend bool operator!=(const Cyc& x, const Cyc& y) { return !(x == y); }

 private:
  static CycKind merge(const Cyc& x, const Cyc& y) {
    if (x.kind_ == CycKind::Rational) return y.kind_;
    if (y.kind_ == CycKind::Rational || x.kind_ == y.kind_) return x.kind_;
    throw std::logic_error("Cyc: mixing Q(i) and Q(omega)");
  }
  void normalize() {
    if (kind_ == CycKind::Rational && sgn(b_) != 0) throw std::logic_error("Cyc: rational kind with w part");
  }

  Q a_{0}, b_{0};
  CycKind kind_ = CycKind::Rational;
};

// Exact positive reals of the form q * sqrt(3)^s, s in {0, 1}.
struct QSqrt3 {
  Q q{0};
  int s = 0;
  QSqrt3() = default;
  QSqrt3(Q v, int sq) : q(std::move(v)), s(sq & 1) {
    for (int t = 0; t < sq / 2; ++t) q *= 3;
  }
  friend QSqrt3 operator*(const QSqrt3& x, const QSqrt3& y) {
    QSqrt3 r;
    r.q = x.q * y.q;
    if (x.s == 1 && y.s == 1) {
      r.q *= 3;
      r.s = 0;
    } else {
      r.s = x.s + y.s;
    }
    return r;
  }
  QSqrt3 operator/(const Q& v) const { return QSqrt3(q / v, s); }
  friend bool operator==(const QSqrt3& x, const QSqrt3& y) {
    if (sgn(x.q) == 0 && sgn(y.q) == 0) return true;
    return x.q == y.q && x.s == y.s;
  }
  QSqrt3 abs() const { return QSqrt3(::abs(q), s); }
  double to_double() const { return q.get_d() * (s ? std::sqrt(3.0) : 1.0); }
  std::string str() const { return rational_string(q) + (s ? "*sqrt(3)" : ""); }
};

// Exact absolute value of a real or purely imaginary element of Q(zeta).
inline std::optional<QSqrt3> abs_real_or_imaginary(const Cyc& x) {
  auto [re, im] = x.split();
  if (sgn(im) == 0) return QSqrt3(::abs(re), 0);
  if (sgn(re) != 0) return std::nullopt;
  return QSqrt3(::abs(im), x.kind() == CycKind::Eisen ? 1 : 0);
}

// |1 - zeta_d^k|^2 as an exact rational for d in {1,2,3,4,6}; 0 when zeta = 1.
inline Q one_minus_zeta_sq(int d, int k) {
  Cyc z = Cyc::zeta(d, k);
  Cyc u = Cyc(1) - z;
  if (u.kind() == CycKind::Rational) return u.a() * u.a();
  return u.norm();
}

inline cd zeta_cd(int d, long j) {
  long m = ((j % d) + d) % d;
  double t = 2.0 * kPi * static_cast<double>(m) / d;
  return {std::cos(t), std::sin(t)};
}

}  // namespace ddvol
