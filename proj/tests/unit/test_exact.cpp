#include "doctest.h"

#include <stdexcept>

#include "susyqm/exact_matrix.hpp"
#include "susyqm/exact_scalar.hpp"

using namespace susyqm;

TEST_CASE("rational normalization and arithmetic") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(3, -6) == Rational(-1, 2));
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational(2, 3) * Rational(3, 4) == Rational(1, 2));
  CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
  const Rational big(std::int64_t{1} << 62);
  CHECK_THROWS_AS(big * big, std::overflow_error);
}

TEST_CASE("sqrt2 field arithmetic") {
  const ExactScalar r = ExactScalar::sqrt2();
  CHECK(r * r == ExactScalar(2));
  CHECK(ExactScalar::inv_sqrt2() * r == ExactScalar(1));
  CHECK(ExactScalar::i() * ExactScalar::i() == ExactScalar(-1));
  const ExactScalar z = ExactScalar(3) + ExactScalar::i() * r;
  CHECK(z / z == ExactScalar(1));
  CHECK((z * z.conj()).is_real());
  CHECK(std::abs(z.to_complex() - std::complex<double>(3, std::sqrt(2.0))) < 1e-15);
  CHECK_THROWS_AS(z / ExactScalar(), std::domain_error);
}

TEST_CASE("null space of a rank-one matrix") {
  const ExactMatrix a{{1, 2, 3}, {2, 4, 6}};
  const ExactMatrix ns = null_space(a);
  CHECK(ns.cols() == 2);
  CHECK((a * ns).is_zero());
  CHECK(rank(a) == 1);
}
