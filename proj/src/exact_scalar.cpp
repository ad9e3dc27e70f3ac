#include "susyqm/exact_scalar.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace susyqm {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

bool fits64(__int128 v) {
  return v >= std::numeric_limits<std::int64_t>::min() &&
         v <= std::numeric_limits<std::int64_t>::max();
}

}  // namespace

Rational::Rational(std::int64_t n) : num_(n), den_(1) {}

Rational::Rational(std::int64_t n, std::int64_t d) {
  *this = from_wide(n, d);
}

Rational Rational::from_wide(__int128 n, __int128 d) {
  if (d == 0) throw std::domain_error("Rational: zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  if (n == 0) return Rational{};
  const __int128 g = gcd128(n, d);
  n /= g;
  d /= g;
  if (!fits64(n) || !fits64(d)) throw std::overflow_error("Rational: int64 overflow");
  Rational r;
  r.num_ = static_cast<std::int64_t>(n);
  r.den_ = static_cast<std::int64_t>(d);
  return r;
}

Rational Rational::operator-() const {
  Rational r = *this;
  if (num_ == std::numeric_limits<std::int64_t>::min()) throw std::overflow_error("Rational: negate");
  r.num_ = -num_;
  return r;
}

Rational& Rational::operator+=(const Rational& o) {
  if (den_ == o.den_) {
    *this = from_wide(static_cast<__int128>(num_) + o.num_, den_);
  } else {
    *this = from_wide(static_cast<__int128>(num_) * o.den_ + static_cast<__int128>(o.num_) * den_,
                      static_cast<__int128>(den_) * o.den_);
  }
  return *this;
}

Rational& Rational::operator-=(const Rational& o) { return *this += -o; }

Rational& Rational::operator*=(const Rational& o) {
  if (num_ == 0 || o.num_ == 0) return *this = Rational{};
  *this = from_wide(static_cast<__int128>(num_) * o.num_, static_cast<__int128>(den_) * o.den_);
  return *this;
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.num_ == 0) throw std::domain_error("Rational: division by zero");
  *this = from_wide(static_cast<__int128>(num_) * o.den_, static_cast<__int128>(den_) * o.num_);
  return *this;
}

bool operator<(const Rational& a, const Rational& b) {
  return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

GaussianRational& GaussianRational::operator+=(const GaussianRational& o) {
  re_ += o.re_;
  im_ += o.im_;
  return *this;
}

GaussianRational& GaussianRational::operator-=(const GaussianRational& o) {
  re_ -= o.re_;
  im_ -= o.im_;
  return *this;
}

GaussianRational& GaussianRational::operator*=(const GaussianRational& o) {
  if (im_.is_zero() && o.im_.is_zero()) {
    re_ *= o.re_;
    return *this;
  }
  Rational re = re_ * o.re_ - im_ * o.im_;
  Rational im = re_ * o.im_ + im_ * o.re_;
  re_ = re;
  im_ = im;
  return *this;
}

GaussianRational& GaussianRational::operator/=(const GaussianRational& o) {
  const Rational n2 = o.norm2();
  if (n2.is_zero()) throw std::domain_error("GaussianRational: division by zero");
  *this *= o.conj();
  re_ /= n2;
  im_ /= n2;
  return *this;
}

std::string GaussianRational::to_string() const {
  if (im_.is_zero()) return re_.to_string();
  if (re_.is_zero()) return "(" + im_.to_string() + ")i";
  return "(" + re_.to_string() + (im_.sign() < 0 ? "" : "+") + im_.to_string() + "i)";
}

ExactScalar& ExactScalar::operator+=(const ExactScalar& o) {
  rat_ += o.rat_;
  sqrt2_ += o.sqrt2_;
  return *this;
}

ExactScalar& ExactScalar::operator-=(const ExactScalar& o) {
  rat_ -= o.rat_;
  sqrt2_ -= o.sqrt2_;
  return *this;
}

ExactScalar& ExactScalar::operator*=(const ExactScalar& o) {
  // (a + b r)(c + d r) = (ac + 2bd) + (ad + bc) r, r = sqrt2
  if (sqrt2_.is_zero() && o.sqrt2_.is_zero()) {
    rat_ *= o.rat_;
    return *this;
  }
  GaussianRational a = rat_ * o.rat_ + GaussianRational(2) * sqrt2_ * o.sqrt2_;
  GaussianRational b = rat_ * o.sqrt2_ + sqrt2_ * o.rat_;
  rat_ = a;
  sqrt2_ = b;
  return *this;
}

ExactScalar& ExactScalar::operator/=(const ExactScalar& o) {
  if (o.is_zero()) throw std::domain_error("ExactScalar: division by zero");
  // 1/(c + d r) = (c - d r)/(c^2 - 2 d^2); the denominator is nonzero because
  // sqrt2 is not in Q(i).
  const GaussianRational den = o.rat_ * o.rat_ - GaussianRational(2) * o.sqrt2_ * o.sqrt2_;
  *this *= ExactScalar(o.rat_, -o.sqrt2_);
  rat_ /= den;
  sqrt2_ /= den;
  return *this;
}

std::complex<double> ExactScalar::to_complex() const {
  return rat_.to_complex() + std::sqrt(2.0) * sqrt2_.to_complex();
}

std::string ExactScalar::to_string() const {
  if (sqrt2_.is_zero()) return rat_.to_string();
  if (rat_.is_zero()) return sqrt2_.to_string() + "*sqrt2";
  return rat_.to_string() + "+" + sqrt2_.to_string() + "*sqrt2";
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }
std::ostream& operator<<(std::ostream& os, const ExactScalar& s) { return os << s.to_string(); }

}  // namespace susyqm
