#pragma once

// Elements of the real Clifford algebra generated by 16 self-adjoint theta_a
// with {theta_a, theta_b} = delta_ab, expanded over the monomial basis
// e_A = theta_{a1} theta_{a2} ... (a1 < a2 < ...), A encoded as a bit mask.
//
// Generator numbering: 0..7 are psi_1..psi_8, 8..15 are lambda_1..lambda_8.

#include <bit>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>

#include "susyqm/exact_scalar.hpp"

namespace susyqm {

using CliffordMask = std::uint16_t;

inline constexpr int kNumMajorana = 16;
inline constexpr int psi_index(int a) { return a; }        // a = 0..7
inline constexpr int lambda_index(int a) { return 8 + a; }  // a = 0..7

/// Sign of e_A e_B after moving every generator of B left past the larger
/// generators of A.
inline int clifford_product_sign(CliffordMask a, CliffordMask b) {
  int swaps = 0;
  for (CliffordMask rest = b; rest != 0; rest &= rest - 1) {
    const int g = std::countr_zero(rest);
    swaps += std::popcount(static_cast<unsigned>(a >> (g + 1)));
  }
  return (swaps & 1) ? -1 : 1;
}

/// e_A^dagger = (-1)^{k(k-1)/2} e_A for a monomial of degree k.
inline int clifford_reverse_sign(CliffordMask a) {
  const int k = std::popcount(static_cast<unsigned>(a));
  return ((k * (k - 1) / 2) & 1) ? -1 : 1;
}

template <class S>
class CliffordElement {
 public:
  using Terms = std::map<CliffordMask, S>;

  CliffordElement() = default;
  explicit CliffordElement(const S& scalar) { add_term(0, scalar); }

  static CliffordElement generator(int index) {
    CliffordElement e;
    e.add_term(static_cast<CliffordMask>(1u << index), S(1));
    return e;
  }
  static CliffordElement monomial(CliffordMask mask, const S& coeff) {
    CliffordElement e;
    e.add_term(mask, coeff);
    return e;
  }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Coefficient of e_A (zero if absent).
  S coefficient(CliffordMask mask) const {
    auto it = terms_.find(mask);
    return it == terms_.end() ? S() : it->second;
  }

  bool is_even() const {
    for (const auto& [m, c] : terms_)
      if (std::popcount(static_cast<unsigned>(m)) & 1) return false;
    return true;
  }
  bool is_odd() const {
    for (const auto& [m, c] : terms_)
      if (!(std::popcount(static_cast<unsigned>(m)) & 1)) return false;
    return true;
  }

  void add_term(CliffordMask mask, const S& coeff) {
    if (ScalarTraits<S>::is_zero(coeff)) return;
    auto [it, inserted] = terms_.try_emplace(mask, coeff);
    if (!inserted) {
      it->second += coeff;
      if (ScalarTraits<S>::is_zero(it->second)) terms_.erase(it);
    }
  }

  CliffordElement adjoint() const {
    CliffordElement out;
    for (const auto& [m, c] : terms_) {
      S v = ScalarTraits<S>::conj(c);
      if (clifford_reverse_sign(m) < 0) v = -v;
      out.terms_.emplace(m, v);
    }
    return out;
  }

  CliffordElement operator-() const {
    CliffordElement out;
    for (const auto& [m, c] : terms_) out.terms_.emplace(m, -c);
    return out;
  }
  CliffordElement& operator+=(const CliffordElement& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  CliffordElement& operator-=(const CliffordElement& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  CliffordElement& operator*=(const S& s) {
    if (ScalarTraits<S>::is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend CliffordElement operator+(CliffordElement a, const CliffordElement& b) { return a += b; }
  friend CliffordElement operator-(CliffordElement a, const CliffordElement& b) { return a -= b; }
  friend CliffordElement operator*(CliffordElement a, const S& s) { return a *= s; }
  friend CliffordElement operator*(const S& s, CliffordElement a) { return a *= s; }

  friend CliffordElement operator*(const CliffordElement& a, const CliffordElement& b) {
    CliffordElement out;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) {
        S v = ca * cb;
        if (clifford_product_sign(ma, mb) < 0) v = -v;
        for (int shared = std::popcount(static_cast<unsigned>(ma & mb)); shared > 0; --shared)
          v *= ScalarTraits<S>::half();
        out.add_term(static_cast<CliffordMask>(ma ^ mb), v);
      }
    return out;
  }

  friend bool operator==(const CliffordElement& a, const CliffordElement& b) {
    return a.terms_ == b.terms_;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      if (!first) os << " + ";
      first = false;
      os << "(" << c << ")";
      for (int g = 0; g < kNumMajorana; ++g)
        if (m & (1u << g)) os << (g < 8 ? "psi" : "lam") << (g % 8 + 1);
    }
    return os.str();
  }

 private:
  Terms terms_;
};

using ExactClifford = CliffordElement<ExactScalar>;

inline ExactClifford commutator(const ExactClifford& a, const ExactClifford& b) {
  return a * b - b * a;
}
inline ExactClifford anticommutator(const ExactClifford& a, const ExactClifford& b) {
  return a * b + b * a;
}

}  // namespace susyqm
