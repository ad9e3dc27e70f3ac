#pragma once

// Normal-ordered polynomials in the bosonic canonical pairs (q_j, p_j),
// (x^mu, p^mu) with Clifford-algebra coefficients, plus a formal commuting
// parameter k.
//
// Normal order puts all positions to the left of all momenta. Variables are
// numbered 0..3 for q_1..q_4 and 4..8 for x^1..x^5.

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "susyqm/clifford.hpp"

namespace susyqm {

inline constexpr int kNumBosons = 9;
inline constexpr int q_var(int j) { return j; }       // j = 0..3
inline constexpr int x_var(int mu) { return 4 + mu; }  // mu = 0..4

struct WeylMonomial {
  std::array<std::uint8_t, kNumBosons> pos{};
  std::array<std::uint8_t, kNumBosons> mom{};
  std::uint8_t k = 0;

  auto operator<=>(const WeylMonomial&) const = default;

  int degree() const;
  std::string to_string() const;
};

class OperatorPolynomial {
 public:
  using Terms = std::map<WeylMonomial, ExactClifford>;

  OperatorPolynomial() = default;
  OperatorPolynomial(const ExactScalar& s);  // NOLINT(google-explicit-constructor)
  OperatorPolynomial(const ExactClifford& c);  // NOLINT(google-explicit-constructor)

  static OperatorPolynomial position(int var);
  static OperatorPolynomial momentum(int var);
  static OperatorPolynomial k_parameter();
  static OperatorPolynomial term(const WeylMonomial& m, const ExactClifford& c);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  void add_term(const WeylMonomial& m, const ExactClifford& c);

  /// Reverse order, conjugate coefficients, re-normal-order.
  OperatorPolynomial adjoint() const;

  /// Lexicographically smallest monomial with its coefficient (for reports).
  std::optional<std::pair<WeylMonomial, ExactClifford>> leading_term() const;

  /// Substitute the formal parameter k by an exact value.
  OperatorPolynomial at_k(const ExactScalar& k) const;

  /// Largest power of k present.
  int k_degree() const;

  /// Value of a momentum-free polynomial at exact positions. Throws
  /// std::invalid_argument if a momentum appears.
  ExactClifford evaluate(const std::array<ExactScalar, kNumBosons>& positions,
                         const ExactScalar& k = ExactScalar()) const;

  OperatorPolynomial operator-() const;
  OperatorPolynomial& operator+=(const OperatorPolynomial& o);
  OperatorPolynomial& operator-=(const OperatorPolynomial& o);
  OperatorPolynomial& operator*=(const ExactScalar& s);

  friend OperatorPolynomial operator+(OperatorPolynomial a, const OperatorPolynomial& b) {
    return a += b;
  }
  friend OperatorPolynomial operator-(OperatorPolynomial a, const OperatorPolynomial& b) {
    return a -= b;
  }
  friend OperatorPolynomial operator*(OperatorPolynomial a, const ExactScalar& s) { return a *= s; }
  friend OperatorPolynomial operator*(const ExactScalar& s, OperatorPolynomial a) { return a *= s; }
  friend OperatorPolynomial operator*(const OperatorPolynomial& a, const OperatorPolynomial& b);
  friend bool operator==(const OperatorPolynomial& a, const OperatorPolynomial& b) {
    return a.terms_ == b.terms_;
  }

  std::string to_string() const;

 private:
  Terms terms_;
};

OperatorPolynomial commutator(const OperatorPolynomial& a, const OperatorPolynomial& b);
OperatorPolynomial anticommutator(const OperatorPolynomial& a, const OperatorPolynomial& b);

/// Polynomial function of the positions and k with Clifford values; the
/// independent test space used to check the engine. Keys: 9 position
/// exponents followed by the k exponent.
using FunctionKey = std::array<std::uint8_t, kNumBosons + 1>;
using TestFunction = std::map<FunctionKey, ExactClifford>;

/// Apply an operator to a test function with p = -i d/d(position).
TestFunction apply_as_differential_operator(const OperatorPolynomial& op, const TestFunction& f);

}  // namespace susyqm
