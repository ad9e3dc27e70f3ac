#include "doctest.h"

#include <array>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "susyqm/fermion_fock.hpp"
#include "susyqm/gamma_structures.hpp"

using namespace susyqm;

namespace {

Eigen::MatrixXd random_antisymmetric(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(16, 16);
  for (int a = 0; a < 16; ++a)
    for (int b = a + 1; b < 16; ++b) {
      s(a, b) = n(rng);
      s(b, a) = -s(a, b);
    }
  return s;
}

double lowest(const Eigen::MatrixXcd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(m, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

}  // namespace

TEST_CASE("Clifford relations of the generators in both layouts") {
  for (auto layout : {FermionLayout::Canonical, FermionLayout::Charge}) {
    const auto theta = build_majorana_generators(layout);
    const FermionMatrix id = FermionMatrix::identity();
    for (int a = 0; a < 16; ++a) {
      CHECK(theta[a].is_hermitian());
      CHECK(theta[a].trace().is_zero());
      for (int b = a; b < 16; ++b) {
        const FermionMatrix ac = anticommutator(theta[a], theta[b]);
        CHECK(ac == (a == b ? id : FermionMatrix()));
      }
    }
  }
}

TEST_CASE("Clifford element products match matrix products") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> mask(0, 0xffff);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = ExactClifford::monomial(mask(rng), ExactScalar(3));
    const auto b = ExactClifford::monomial(mask(rng), ExactScalar::i());
    for (auto layout : {FermionLayout::Canonical, FermionLayout::Charge}) {
      CHECK(materialize(a * b, layout) == materialize(a, layout) * materialize(b, layout));
      CHECK(materialize(a.adjoint(), layout) == materialize(a, layout).adjoint());
    }
  }
}

TEST_CASE("fermion parity") {
  const FermionMatrix p = fermion_parity();
  CHECK(p * p == FermionMatrix::identity());
  CHECK(p.trace().is_zero());
  const auto theta = build_majorana_generators();
  for (const auto& t : theta) CHECK(anticommutator(p, t).is_zero());
  // diagonal in both layouts
  for (auto layout : {FermionLayout::Canonical, FermionLayout::Charge}) {
    const FermionMatrix pl = fermion_parity(layout);
    for (int n = 0; n < 256; ++n) {
      REQUIRE(pl.row(n).size() == 1);
      CHECK(pl.row(n)[0].first == n);
    }
  }
}

TEST_CASE("single bilinear block") {
  ExactMatrix s(16, 16);
  s(0, 8) = ExactScalar::half();
  s(8, 0) = -ExactScalar::half();
  const Eigen::MatrixXcd m = bilinear(s).to_dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m);
  int minus = 0, plus = 0;
  for (int i = 0; i < 256; ++i) {
    if (std::abs(eig.eigenvalues()(i) + 0.5) < 1e-12) ++minus;
    if (std::abs(eig.eigenvalues()(i) - 0.5) < 1e-12) ++plus;
  }
  CHECK(minus == 128);
  CHECK(plus == 128);
  CHECK(bilinear(ExactMatrix(16, 16)).is_zero());
  ExactMatrix bad(16, 16);
  bad(0, 1) = 1;
  CHECK_THROWS_AS(bilinear(bad), std::invalid_argument);
}

TEST_CASE("bilinear ground state against dense diagonalization") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd s = random_antisymmetric(rng);
    const auto g = bilinear_ground(s);
    const Eigen::MatrixXcd h = bilinear_dense(s);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
    CHECK(g.degeneracy == 1);
    CHECK(std::abs(g.energy - eig.eigenvalues()(0)) < 1e-10);
    CHECK(std::abs(eig.eigenvalues()(255) + g.energy) < 1e-10);
    const Eigen::VectorXcd v = g.basis.col(0);
    CHECK((h * v - g.energy * v).norm() < 1e-9);
  }
}

TEST_CASE("bilinear ground degeneracy from the kernel") {
  std::mt19937_64 rng(5);
  // rank 10: zero out the coupling of generators 10..15
  Eigen::MatrixXd s = random_antisymmetric(rng);
  s.block(10, 0, 6, 16).setZero();
  s.block(0, 10, 16, 6).setZero();
  const auto g = bilinear_ground(s);
  CHECK(g.degeneracy == 8);
  const Eigen::MatrixXcd h = bilinear_dense(s);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
  int count = 0;
  for (int i = 0; i < 256; ++i)
    if (std::abs(eig.eigenvalues()(i) - eig.eigenvalues()(0)) < 1e-9) ++count;
  CHECK(count == 8);
  CHECK((g.basis.adjoint() * g.basis - Eigen::MatrixXcd::Identity(8, 8)).norm() < 1e-10);
  CHECK((g.basis.adjoint() * h * g.basis - g.energy * Eigen::MatrixXcd::Identity(8, 8)).norm() <
        1e-9);
  const auto zero = bilinear_ground(Eigen::MatrixXd::Zero(16, 16));
  CHECK(zero.energy == 0.0);
  CHECK(zero.degeneracy == 256);
}

TEST_CASE("fermion Hamiltonian at the valley point") {
  const auto s = hf_coefficient({0, std::sqrt(2.0), 0, 0}, {0, 0, 0, 0, 0});
  const auto g = bilinear_ground(s);
  CHECK(std::abs(g.energy + 8 * std::sqrt(2.0)) < 1e-12);
  CHECK(g.degeneracy == 1);
  // +-2 sqrt2 i sum lambda_a psi_a is diagonal in the canonical layout
  const Eigen::MatrixXcd h = hf_matrix({0, std::sqrt(2.0), 0, 0}, {0, 0, 0, 0, 0});
  CHECK((h - Eigen::MatrixXcd(h.diagonal().asDiagonal())).norm() < 1e-12);
  CHECK(std::abs(h.diagonal().real().minCoeff() + 8 * std::sqrt(2.0)) < 1e-12);
  // the bilinear -2 sqrt2 i sum lambda_a psi_a itself
  Eigen::MatrixXd s0 = Eigen::MatrixXd::Zero(16, 16);
  for (int a = 0; a < 8; ++a) {
    s0(lambda_index(a), psi_index(a)) = -std::sqrt(2.0);
    s0(psi_index(a), lambda_index(a)) = std::sqrt(2.0);
  }
  const auto g0 = bilinear_ground(s0);
  CHECK(std::abs(g0.energy + 8 * std::sqrt(2.0)) < 1e-12);
  CHECK(g0.degeneracy == 1);
  CHECK(std::abs(std::abs(g0.basis(0, 0)) - 1.0) < 1e-12);
}

TEST_CASE("fermion Hamiltonian bounds") {
  CHECK(std::abs(lowest(hf_matrix({0, 0, 0, 0}, {1, 0, 0, 0, 0})) + 4.0) < 1e-12);
  CHECK(lowest(hf_matrix({1, 0, 0, 0}, {0, 0, 0, 0, 0})) >= -8.0 - 1e-12);
  CHECK(hf_matrix({0, 0, 0, 0}, {0, 0, 0, 0, 0}).norm() == 0.0);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::array<double, 4> q;
    std::array<double, 5> x;
    double nq = 0, nx = 0;
    for (auto& v : q) nq += (v = n(rng)) * v;
    for (auto& v : x) nx += (v = n(rng)) * v;
    const double e = bilinear_ground(hf_coefficient(q, x)).energy;
    CHECK(e >= -4 * std::sqrt(nx) - 8 * std::sqrt(nq) - 1e-10);
  }
}

TEST_CASE("W_x ground space") {
  const std::array<double, 5> x{0.3, -1.2, 0.5, 0.9, 0.1};
  std::array<double, 5> x2;
  for (int i = 0; i < 5; ++i) x2[i] = 2 * x[i];
  const Eigen::MatrixXcd w = ground_space_Wx(x);
  CHECK(w.cols() == 16);
  const Eigen::MatrixXcd p1 = w * w.adjoint();
  const Eigen::MatrixXcd w2 = ground_space_Wx(x2);
  CHECK((p1 - w2 * w2.adjoint()).norm() < 1e-10);
  const auto theta = build_majorana_generators();
  for (int a = 0; a < 8; ++a) {
    const Eigen::MatrixXcd moved = theta[lambda_index(a)].to_dense() * w;
    CHECK((moved - p1 * moved).norm() < 1e-10);
  }
  CHECK_THROWS_AS(ground_space_Wx({0, 0, 0, 0, 0}), std::invalid_argument);
}

TEST_CASE("spin part of the gauge generator") {
  const FermionMatrix m = spin_part_M();
  CHECK(m.is_hermitian());
  CHECK(commutator(m, fermion_parity()).is_zero());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m.to_dense());
  std::array<int, 5> counts{};
  for (int i = 0; i < 256; ++i) {
    const double v = eig.eigenvalues()(i);
    const double r = std::round(v);
    REQUIRE(std::abs(v - r) < 1e-12);
    REQUIRE(std::abs(r) <= 2);
    ++counts[static_cast<int>(r) + 2];
  }
  // four independent +-1/2 modes, times 16 for the lambdas
  CHECK(counts == std::array<int, 5>{16, 64, 96, 64, 16});
  // diagonal in the charge layout: (-Z0 + Z1 - Z2 + Z3)/2
  const FermionMatrix mc = spin_part_M(FermionLayout::Charge);
  for (int n = 0; n < 256; ++n) {
    int expected2 = 0;
    for (int mode = 0; mode < 4; ++mode) {
      const int z = (n >> mode) & 1 ? -1 : 1;
      expected2 += (mode % 2 == 0 ? -z : z);
    }
    CHECK(mc(n, n) == ExactScalar(Rational(expected2, 2)));
  }
}

TEST_CASE("spin(5) generators on the fermions") {
  const auto t = spin5_fermion_generators();
  const auto f = bivector_structure_constants();
  const FermionMatrix m = spin_part_M();
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(t[i].is_hermitian());
    CHECK(commutator(t[i], m).is_zero());
  }
  // The map B -> T(B) = -(i/4) B_ab (lambda lambda + psi psi) is a Lie
  // homomorphism up to a factor: [T(B), T(C)] = -(i/2) T([B, C]).
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = 0; j < t.size(); ++j) {
      FermionMatrix rhs;
      for (std::size_t k = 0; k < t.size(); ++k)
        rhs += ExactScalar(f[i][j][k]) * t[k];
      CHECK(commutator(t[i], t[j]) == -ExactScalar::i() * ExactScalar::half() * rhs);
    }
}

TEST_CASE("fermion Hamiltonian rotates covariantly") {
  const auto t = spin5_fermion_generators();
  const std::array<double, 5> x{0.7, -0.4, 1.1, 0.2, -0.6};
  const double phi = M_PI / 2;
  for (int mu = 0; mu < 5; ++mu)
    for (int nu = mu + 1; nu < 5; ++nu) {
      const Eigen::MatrixXcd gen = t[bivector_index(mu, nu)].to_dense();
      const Eigen::MatrixXcd u = (std::complex<double>(0, phi) * gen).exp();
      std::array<double, 5> rx = x;
      rx[mu] = std::cos(phi) * x[mu] - std::sin(phi) * x[nu];
      rx[nu] = std::sin(phi) * x[mu] + std::cos(phi) * x[nu];
      const Eigen::MatrixXcd lhs = u.adjoint() * hf_matrix({0, 0, 0, 0}, x) * u;
      CHECK((lhs - hf_matrix({0, 0, 0, 0}, rx)).norm() < 1e-9);
    }
}
