#include "doctest.h"

#include <random>

#include "susyqm/fermion_fock.hpp"
#include "susyqm/gamma_structures.hpp"
#include "susyqm/model_operators.hpp"

using namespace susyqm;

namespace {

OperatorPolynomial random_polynomial(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nterms(1, 4), var(0, kNumBosons - 1), pw(0, 2),
      coef(-3, 3), mask(0, 0xffff), coin(0, 3);
  OperatorPolynomial p;
  const int n = nterms(rng);
  for (int t = 0; t < n; ++t) {
    WeylMonomial m;
    for (int v = 0; v < 3; ++v) m.pos[var(rng)] += pw(rng);
    for (int v = 0; v < 3; ++v) m.mom[var(rng)] += pw(rng);
    m.k = coin(rng) == 0;
    ExactScalar c(GaussianRational(coef(rng), coef(rng)));
    ExactClifford cl = coin(rng) == 0 ? ExactClifford::monomial(mask(rng), c) : ExactClifford(c);
    p.add_term(m, cl);
  }
  return p;
}

TestFunction random_function(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> var(0, kNumBosons - 1), pw(0, 4), coef(-5, 5), mask(0, 0xffff);
  TestFunction f;
  for (int t = 0; t < 3; ++t) {
    FunctionKey k{};
    for (int v = 0; v < 4; ++v) k[var(rng)] += pw(rng);
    f[k] += ExactClifford::monomial(mask(rng), ExactScalar(coef(rng)));
  }
  return f;
}

}  // namespace

TEST_CASE("canonical commutation") {
  const auto p1 = p_q(0);
  const auto q1 = q(0);
  CHECK(p1 * q1 == q1 * p1 - OperatorPolynomial(ExactScalar::i()));
  CHECK(q(0) * q(1) == q(1) * q(0));
  CHECK(commutator(x(2), p_x(2)) == OperatorPolynomial(ExactScalar::i()));
  CHECK(commutator(x(2), p_x(3)).is_zero());
  CHECK((q1 * p1).adjoint() == p1 * q1);
}

TEST_CASE("product agrees with the differential-operator action") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_polynomial(rng);
    const auto b = random_polynomial(rng);
    const auto f = random_function(rng);
    CHECK(apply_as_differential_operator(a * b, f) ==
          apply_as_differential_operator(a, apply_as_differential_operator(b, f)));
    CHECK((a * b).adjoint() == b.adjoint() * a.adjoint());
  }
}

TEST_CASE("associativity") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = random_polynomial(rng);
    const auto b = random_polynomial(rng);
    const auto c = random_polynomial(rng);
    CHECK((a * b) * c == a * (b * c));
  }
}

TEST_CASE("D matrix") {
  const DMatrix d = build_D_matrix();
  const auto& s = gamma_structures().s;
  auto at = [&](std::array<ExactScalar, 4> qv) {
    std::array<ExactScalar, kNumBosons> pos{};
    for (int j = 0; j < 4; ++j) pos[j] = qv[j];
    ExactMatrix m(8, 8);
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b) m(a, b) = d[a][b].evaluate(pos).coefficient(0);
    return m;
  };
  CHECK(at({1, 0, 0, 0}) == ExactScalar::half() * s[1]);
  CHECK(at({0, 1, 0, 0}) == ExactScalar::half() * s[1]);
  const ExactMatrix m1 = at({1, -2, 3, 1});
  CHECK(at({2, -4, 6, 2}) == ExactScalar(4) * m1);
  // D(q) is antisymmetric for every q
  CHECK(m1.transpose() == -m1);
}

TEST_CASE("supercharges") {
  const auto& m = model_operators();
  const OperatorPolynomial parity(fermion_parity_element());
  for (int a = 0; a < 8; ++a) {
    CHECK(m.Q[a].adjoint() == m.Q[a]);
    CHECK(anticommutator(parity, m.Q[a]).is_zero());
    CHECK(commutator(m.gh.J, m.Q[a]).is_zero());
  }
  // coefficient of p^1 in Q_1 is lambda_1
  WeylMonomial mono;
  mono.mom[x_var(0)] = 1;
  CHECK(m.Q[0].terms().at(mono) == ExactClifford::generator(lambda_index(0)));
}

TEST_CASE("gauge generator and Hamiltonian") {
  const auto& m = model_operators();
  CHECK(commutator(m.gh.J, m.gh.H).is_zero());
  CHECK(m.gh.H.adjoint() == m.gh.H);
  CHECK(m.gh.J.adjoint() == m.gh.J);
  std::array<ExactScalar, kNumBosons> pos{};
  pos[x_var(0)] = 3;
  pos[x_var(2)] = -1;
  CHECK(m.gh.V.evaluate(pos).is_zero());
}

TEST_CASE("superalgebra closes exactly") {
  const auto& m = model_operators();
  const auto rep = verify_superalgebra(m.Q, m.gh.J, m.gh.H);
  CHECK(rep.pairs.size() == 36);
  for (const auto& p : rep.pairs) {
    INFO(p.a, " ", p.b, " ", p.leading);
    CHECK(p.terms == 0);
  }
  CHECK(rep.all_zero);
}

TEST_CASE("mutated supercharge breaks the superalgebra") {
  const auto& m = model_operators();
  SuperchargeOptions opt;
  opt.flip_d_term_of_q1 = true;
  const auto rep = verify_superalgebra(build_supercharges(opt), m.gh.J, m.gh.H);
  CHECK_FALSE(rep.all_zero);
  CHECK(rep.pairs[0].terms > 0);
  CHECK_FALSE(rep.pairs[0].leading.empty());
}

TEST_CASE("deformation identities for formal k") {
  const auto rep = verify_deformation();
  for (const auto& c : rep.checks) {
    INFO(c.name, " ", c.leading);
    CHECK(c.pass);
  }
  REQUIRE(rep.d_squared);
  const auto d0 = deformed_at(ExactScalar(0));
  const auto& m = model_operators();
  CHECK(anticommutator(d0.Dk, d0.Dkdag) - m.gh.H - ExactScalar(2) * (x(0) * m.gh.J) ==
        OperatorPolynomial());
  CHECK_THROWS_AS(deformed_at(ExactScalar(-1)), std::invalid_argument);
}

TEST_CASE("spin(5) invariance and spinor transformation") {
  const auto rep = verify_spin5();
  for (const auto& c : rep.checks) {
    INFO(c.name, " ", c.leading);
    CHECK(c.pass);
  }
  REQUIRE(rep.c);
  CHECK(rep.c->rational_part().re().is_zero());
}
