#include "susyqm/weyl_algebra.hpp"

#include <sstream>
#include <stdexcept>

namespace susyqm {

namespace {

std::int64_t binomial(int n, int k) {
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

ExactScalar minus_i_power(int j) {
  switch (j & 3) {
    case 0: return 1;
    case 1: return -ExactScalar::i();
    case 2: return -1;
    default: return ExactScalar::i();
  }
}

std::uint8_t checked_sum(int a, int b) {
  const int s = a + b;
  if (s > 255) throw std::overflow_error("WeylMonomial: exponent overflow");
  return static_cast<std::uint8_t>(s);
}

// p^b x^c for one variable = sum_j C(b,j) C(c,j) j! (-i)^j x^{c-j} p^{b-j}.
// Expands the product over all variables into `out`.
void reorder(const WeylMonomial& left, const WeylMonomial& right, const ExactClifford& coeff,
             int var, WeylMonomial& current, const ExactScalar& scalar,
             OperatorPolynomial::Terms& out) {
  if (var == kNumBosons) {
    ExactClifford c = coeff * scalar;
    if (c.is_zero()) return;
    auto [it, inserted] = out.try_emplace(current, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) out.erase(it);
    }
    return;
  }
  const int b = left.mom[var];
  const int c = right.pos[var];
  for (int j = 0; j <= std::min(b, c); ++j) {
    std::int64_t factor = binomial(b, j) * binomial(c, j);
    for (int f = 2; f <= j; ++f) factor *= f;
    current.pos[var] = checked_sum(left.pos[var], c - j);
    current.mom[var] = checked_sum(b - j, right.mom[var]);
    reorder(left, right, coeff, var + 1, current, scalar * ExactScalar(factor) * minus_i_power(j),
            out);
  }
}

// (x^a p^b c1)(x^c p^d c2), appended to `out`.
void multiply_monomials(const WeylMonomial& ma, const ExactClifford& ca, const WeylMonomial& mb,
                        const ExactClifford& cb, OperatorPolynomial::Terms& out) {
  const ExactClifford coeff = ca * cb;
  if (coeff.is_zero()) return;
  WeylMonomial current;
  current.k = checked_sum(ma.k, mb.k);
  reorder(ma, mb, coeff, 0, current, ExactScalar(1), out);
}

}  // namespace

int WeylMonomial::degree() const {
  int d = 0;
  for (int i = 0; i < kNumBosons; ++i) d += pos[i] + mom[i];
  return d;
}

std::string WeylMonomial::to_string() const {
  static const char* names[kNumBosons] = {"q1", "q2", "q3", "q4", "x1", "x2", "x3", "x4", "x5"};
  std::ostringstream os;
  bool any = false;
  auto put = [&](const std::string& name, int power) {
    if (power == 0) return;
    if (any) os << '*';
    os << name;
    if (power > 1) os << '^' << power;
    any = true;
  };
  put("k", k);
  for (int i = 0; i < kNumBosons; ++i) put(names[i], pos[i]);
  for (int i = 0; i < kNumBosons; ++i) put(std::string("p_") + names[i], mom[i]);
  return any ? os.str() : "1";
}

OperatorPolynomial::OperatorPolynomial(const ExactScalar& s) { add_term({}, ExactClifford(s)); }

OperatorPolynomial::OperatorPolynomial(const ExactClifford& c) { add_term({}, c); }

OperatorPolynomial OperatorPolynomial::position(int var) {
  WeylMonomial m;
  m.pos.at(var) = 1;
  return term(m, ExactClifford(ExactScalar(1)));
}

OperatorPolynomial OperatorPolynomial::momentum(int var) {
  WeylMonomial m;
  m.mom.at(var) = 1;
  return term(m, ExactClifford(ExactScalar(1)));
}

OperatorPolynomial OperatorPolynomial::k_parameter() {
  WeylMonomial m;
  m.k = 1;
  return term(m, ExactClifford(ExactScalar(1)));
}

OperatorPolynomial OperatorPolynomial::term(const WeylMonomial& m, const ExactClifford& c) {
  OperatorPolynomial p;
  p.add_term(m, c);
  return p;
}

void OperatorPolynomial::add_term(const WeylMonomial& m, const ExactClifford& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

OperatorPolynomial OperatorPolynomial::adjoint() const {
  OperatorPolynomial out;
  for (const auto& [m, c] : terms_) {
    // (x^a p^b c)^dagger = c^dagger p^b x^a
    WeylMonomial left;
    left.mom = m.mom;
    left.k = m.k;
    WeylMonomial right;
    right.pos = m.pos;
    multiply_monomials(left, c.adjoint(), right, ExactClifford(ExactScalar(1)), out.terms_);
  }
  return out;
}

std::optional<std::pair<WeylMonomial, ExactClifford>> OperatorPolynomial::leading_term() const {
  if (terms_.empty()) return std::nullopt;
  return *terms_.begin();
}

OperatorPolynomial OperatorPolynomial::at_k(const ExactScalar& k) const {
  OperatorPolynomial out;
  for (const auto& [m, c] : terms_) {
    ExactScalar f = 1;
    for (int i = 0; i < m.k; ++i) f *= k;
    WeylMonomial mm = m;
    mm.k = 0;
    out.add_term(mm, c * f);
  }
  return out;
}

int OperatorPolynomial::k_degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max<int>(d, m.k);
  return d;
}

ExactClifford OperatorPolynomial::evaluate(const std::array<ExactScalar, kNumBosons>& positions,
                                           const ExactScalar& k) const {
  ExactClifford out;
  for (const auto& [m, c] : terms_) {
    ExactScalar f = 1;
    for (int i = 0; i < kNumBosons; ++i) {
      if (m.mom[i] != 0) throw std::invalid_argument("evaluate: polynomial contains momenta");
      for (int e = 0; e < m.pos[i]; ++e) f *= positions[i];
    }
    for (int e = 0; e < m.k; ++e) f *= k;
    out += c * f;
  }
  return out;
}

OperatorPolynomial OperatorPolynomial::operator-() const {
  OperatorPolynomial out;
  for (const auto& [m, c] : terms_) out.terms_.emplace(m, -c);
  return out;
}

OperatorPolynomial& OperatorPolynomial::operator+=(const OperatorPolynomial& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

OperatorPolynomial& OperatorPolynomial::operator-=(const OperatorPolynomial& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

OperatorPolynomial& OperatorPolynomial::operator*=(const ExactScalar& s) {
  if (s.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= s;
  return *this;
}

OperatorPolynomial operator*(const OperatorPolynomial& a, const OperatorPolynomial& b) {
  OperatorPolynomial out;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) multiply_monomials(ma, ca, mb, cb, out.terms_);
  return out;
}

std::string OperatorPolynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << "\n";
    first = false;
    os << "[" << c.to_string() << "] " << m.to_string();
  }
  return os.str();
}

OperatorPolynomial commutator(const OperatorPolynomial& a, const OperatorPolynomial& b) {
  return a * b - b * a;
}

OperatorPolynomial anticommutator(const OperatorPolynomial& a, const OperatorPolynomial& b) {
  return a * b + b * a;
}

TestFunction apply_as_differential_operator(const OperatorPolynomial& op, const TestFunction& f) {
  TestFunction out;
  for (const auto& [m, c] : op.terms())
    for (const auto& [key, value] : f) {
      FunctionKey k = key;
      ExactScalar factor = 1;
      bool vanished = false;
      for (int i = 0; i < kNumBosons && !vanished; ++i)
        for (int d = 0; d < m.mom[i]; ++d) {
          if (k[i] == 0) {
            vanished = true;
            break;
          }
          factor *= ExactScalar(k[i]) * -ExactScalar::i();
          --k[i];
        }
      if (vanished) continue;
      for (int i = 0; i < kNumBosons; ++i) k[i] = checked_sum(k[i], m.pos[i]);
      k[kNumBosons] = checked_sum(k[kNumBosons], m.k);
      const ExactClifford v = c * value * factor;
      if (v.is_zero()) continue;
      auto [it, inserted] = out.try_emplace(k, v);
      if (!inserted) {
        it->second += v;
        if (it->second.is_zero()) out.erase(it);
      }
    }
  return out;
}

}  // namespace susyqm
