#pragma once

// Exact arithmetic in the field Q(i, sqrt2).
//
// Rational holds a normalized int64 fraction; every intermediate product is
// formed in 128 bits and an overflow of the normalized result throws
// std::overflow_error rather than wrapping.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace susyqm {

class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t n);  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t n, std::int64_t d);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  int sign() const { return (num_ > 0) - (num_ < 0); }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  Rational operator-() const;
  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator<(const Rational& a, const Rational& b);

  std::string to_string() const;

 private:
  static Rational from_wide(__int128 n, __int128 d);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// re + i*im with rational parts.
class GaussianRational {
 public:
  GaussianRational() = default;
  GaussianRational(Rational re) : re_(re) {}  // NOLINT(google-explicit-constructor)
  GaussianRational(std::int64_t re) : re_(re) {}  // NOLINT(google-explicit-constructor)
  GaussianRational(Rational re, Rational im) : re_(re), im_(im) {}

  const Rational& re() const { return re_; }
  const Rational& im() const { return im_; }

  bool is_zero() const { return re_.is_zero() && im_.is_zero(); }
  GaussianRational conj() const { return {re_, -im_}; }
  Rational norm2() const { return re_ * re_ + im_ * im_; }

  GaussianRational operator-() const { return {-re_, -im_}; }
  GaussianRational& operator+=(const GaussianRational& o);
  GaussianRational& operator-=(const GaussianRational& o);
  GaussianRational& operator*=(const GaussianRational& o);
  GaussianRational& operator/=(const GaussianRational& o);

  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
  friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

  std::complex<double> to_complex() const { return {re_.to_double(), im_.to_double()}; }
  std::string to_string() const;

 private:
  Rational re_;
  Rational im_;
};

/// Exact number rational_part + sqrt2_part * sqrt(2), both parts Gaussian rationals.
class ExactScalar {
 public:
  ExactScalar() = default;
  ExactScalar(std::int64_t v) : rat_(v) {}  // NOLINT(google-explicit-constructor)
  ExactScalar(Rational v) : rat_(v) {}  // NOLINT(google-explicit-constructor)
  ExactScalar(GaussianRational v) : rat_(v) {}  // NOLINT(google-explicit-constructor)
  ExactScalar(GaussianRational rational_part, GaussianRational sqrt2_part)
      : rat_(rational_part), sqrt2_(sqrt2_part) {}

  static ExactScalar i() { return GaussianRational(0, 1); }
  static ExactScalar sqrt2() { return {GaussianRational(0), GaussianRational(1)}; }
  static ExactScalar inv_sqrt2() { return {GaussianRational(0), GaussianRational(Rational(1, 2))}; }
  static ExactScalar half() { return Rational(1, 2); }

  const GaussianRational& rational_part() const { return rat_; }
  const GaussianRational& sqrt2_part() const { return sqrt2_; }

  bool is_zero() const { return rat_.is_zero() && sqrt2_.is_zero(); }
  bool is_real() const { return rat_.im().is_zero() && sqrt2_.im().is_zero(); }
  ExactScalar conj() const { return {rat_.conj(), sqrt2_.conj()}; }

  ExactScalar operator-() const { return {-rat_, -sqrt2_}; }
  ExactScalar& operator+=(const ExactScalar& o);
  ExactScalar& operator-=(const ExactScalar& o);
  ExactScalar& operator*=(const ExactScalar& o);
  /// Throws std::domain_error on division by zero.
  ExactScalar& operator/=(const ExactScalar& o);

  friend ExactScalar operator+(ExactScalar a, const ExactScalar& b) { return a += b; }
  friend ExactScalar operator-(ExactScalar a, const ExactScalar& b) { return a -= b; }
  friend ExactScalar operator*(ExactScalar a, const ExactScalar& b) { return a *= b; }
  friend ExactScalar operator/(ExactScalar a, const ExactScalar& b) { return a /= b; }
  friend bool operator==(const ExactScalar& a, const ExactScalar& b) {
    return a.rat_ == b.rat_ && a.sqrt2_ == b.sqrt2_;
  }

  std::complex<double> to_complex() const;
  std::string to_string() const;

 private:
  GaussianRational rat_;
  GaussianRational sqrt2_;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);
std::ostream& operator<<(std::ostream& os, const ExactScalar& s);

// Scalar traits shared by the exact and floating code paths.
template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<ExactScalar> {
  static ExactScalar half() { return ExactScalar::half(); }
  static ExactScalar i() { return ExactScalar::i(); }
  static ExactScalar inv_sqrt2() { return ExactScalar::inv_sqrt2(); }
  static ExactScalar conj(const ExactScalar& s) { return s.conj(); }
  static bool is_zero(const ExactScalar& s) { return s.is_zero(); }
  static std::complex<double> to_complex(const ExactScalar& s) { return s.to_complex(); }
};

template <>
struct ScalarTraits<std::complex<double>> {
  static std::complex<double> half() { return 0.5; }
  static std::complex<double> i() { return {0.0, 1.0}; }
  static std::complex<double> inv_sqrt2() { return 0.70710678118654752440; }
  static std::complex<double> conj(const std::complex<double>& s) { return std::conj(s); }
  static bool is_zero(const std::complex<double>& s) { return s == 0.0; }
  static std::complex<double> to_complex(const std::complex<double>& s) { return s; }
};

}  // namespace susyqm
