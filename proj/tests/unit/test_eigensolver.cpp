#include "doctest.h"

#include <cmath>
#include <random>

#include "susyqm/eigensolver.hpp"
#include "susyqm/oscillator_assembly.hpp"

using namespace susyqm;

TEST_CASE("block Lanczos matches dense diagonalization of a random Hermitian matrix") {
  const int n = 500;
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = cd(g(rng), g(rng));
  A = 0.5 * (A + A.adjoint()).eval();
  const LinearMap map = [&](const cd* x, cd* y) {
    Eigen::Map<Eigen::VectorXcd>(y, n) = A * Eigen::Map<const Eigen::VectorXcd>(x, n);
  };
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> oracle(A);
  for (int block : {1, 3}) {
    EigenOptions opt;
    opt.count = 5;
    opt.block = block;
    opt.max_basis = 60;
    opt.tol = 1e-10;
    opt.max_restarts = 2000;
    const EigenResult r = block_lanczos(map, n, opt);
    REQUIRE(r.converged);
    for (int i = 0; i < 5; ++i) {
      CHECK(std::abs(r.values[i] - oracle.eigenvalues()(i)) < 1e-10);
      CHECK(r.residuals[i] < 1e-10);
    }
  }
}

TEST_CASE("block Lanczos resolves a degenerate lowest level") {
  const int n = 3000;
  Eigen::VectorXd d(n);
  // Level 1 appears 10 times, level 2 once, then a band from 3 to 6.
  for (int i = 0; i < n; ++i) d(i) = i < 10 ? 1.0 : i == 10 ? 2.0 : 3.0 + (i - 11) / 1000.0;
  const LinearMap map = [&](const cd* x, cd* y) {
    for (int i = 0; i < n; ++i) y[i] = d(i) * x[i];
  };
  EigenOptions opt;
  opt.count = 11;
  opt.block = 12;
  opt.max_basis = 72;
  opt.tol = 1e-9;
  const EigenResult r = block_lanczos(map, n, opt);
  REQUIRE(r.converged);
  for (int i = 0; i < 10; ++i) CHECK(r.values[i] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.values[10] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.residuals[10] < 1e-9);
}

TEST_CASE("one-dimensional oscillator in its own basis") {
  BasisSpec spec;
  spec.cutoff = 30;
  spec.active[x_var(0)] = true;
  spec.frequencies[x_var(0)] = 1.0;
  spec.circular_planes = false;
  spec.layout = FermionLayout::Canonical;
  const auto basis =
      std::make_shared<const SectorBasis>(spec, SectorFilter{false, std::optional<int>(1), {}});
  const auto xp = OperatorPolynomial::position(x_var(0));
  const auto pp = OperatorPolynomial::momentum(x_var(0));
  const SparseOperator h(NumericPolynomial(pp * pp + xp * xp), basis, basis, "osc", true);
  EigenOptions opt;
  opt.count = 3;
  opt.max_basis = 20;
  opt.tol = 1e-10;
  const LinearMap map = [&](const cd* x, cd* y) { h.apply(x, y); };
  const EigenResult r = block_lanczos(map, basis->dim(), opt);
  REQUIRE(r.converged);
  // Every level is 128-fold degenerate (the fermions are spectators), so the
  // three lowest eigenvalues with multiplicity all equal 1.
  for (int i = 0; i < 3; ++i) CHECK(r.values[i] == doctest::Approx(1.0).epsilon(1e-12));

  // Same map restricted to a single fermion state: the ladder 1, 3, 5.
  const std::size_t nb = basis->boson_dim();
  const LinearMap boson_only = [&](const cd* x, cd* y) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->dim()));
    for (std::size_t b = 0; b < nb; ++b) v(static_cast<Eigen::Index>(basis->offset(b))) = x[b];
    const Eigen::VectorXcd w = h.apply(v);
    for (std::size_t b = 0; b < nb; ++b) y[b] = w(static_cast<Eigen::Index>(basis->offset(b)));
  };
  const EigenResult d = dense_eigs(boson_only, nb, 3);
  CHECK(d.values[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.values[1] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(d.values[2] == doctest::Approx(5.0).epsilon(1e-12));
}
