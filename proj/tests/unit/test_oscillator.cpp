#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "susyqm/model_operators.hpp"
#include "susyqm/oscillator_assembly.hpp"

using namespace susyqm;

namespace {

std::shared_ptr<const SectorBasis> basis_of(const BasisSpec& spec, SectorFilter filter = {}) {
  return std::make_shared<const SectorBasis>(spec, filter);
}

Eigen::VectorXcd random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
  for (auto& c : v) c = cd(g(rng), g(rng));
  return v;
}

// Matrix of a boson-only operator between states |b> (x) |f = 0>.
Eigen::MatrixXcd boson_matrix(const SparseOperator& op) {
  const SectorBasis& basis = op.in();
  const auto nb = static_cast<Eigen::Index>(basis.boson_dim());
  Eigen::MatrixXcd m(nb, nb);
  for (Eigen::Index b = 0; b < nb; ++b) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.dim()));
    e(static_cast<Eigen::Index>(basis.offset(b))) = 1.0;
    const Eigen::VectorXcd y = op.apply(e);
    for (Eigen::Index r = 0; r < nb; ++r) m(r, b) = y(static_cast<Eigen::Index>(basis.offset(r)));
  }
  return m;
}

// Vector with random entries on boson states with at most `quanta` quanta.
Eigen::VectorXcd interior_vector(const SectorBasis& basis, int quanta, std::uint64_t seed) {
  Eigen::VectorXcd v = random_vector(basis.dim(), seed);
  for (std::size_t b = 0; b < basis.boson_dim(); ++b)
    if (basis.total_quanta(b) > quanta)
      for (std::size_t i = 0; i < basis.fermions(b).size(); ++i)
        v(static_cast<Eigen::Index>(basis.offset(b) + i)) = 0.0;
  return v;
}

}  // namespace

TEST_CASE("basis specs are validated") {
  BasisSpec s = fiber_spec(3, 1.0);
  s.cutoff = -1;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = fiber_spec(3, 1.0);
  s.frequencies[2] = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = fiber_spec(3, 1.0, true);
  s.frequencies[1] = 2.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  CHECK_THROWS_AS(SectorBasis(fiber_spec(2, 1.0, false), SectorFilter{true, {}, {}}),
                  std::invalid_argument);
}

TEST_CASE("dimension counts the simplex of multi-indices times 256") {
  const auto b = basis_of(fiber_spec(3, 1.0));
  CHECK(b->boson_dim() == 35);  // C(7, 4)
  CHECK(b->dim() == 35 * 256);
  const auto even = basis_of(fiber_spec(3, 1.0), SectorFilter{false, 1, {}});
  CHECK(even->dim() == 35 * 128);
}

TEST_CASE("oscillator variance of the ground state") {
  const double w = 1.7;
  const auto basis = basis_of(fiber_spec(4, w));
  const SparseOperator q2(NumericPolynomial(q(0) * q(0)), basis, basis, "q1^2", true);
  Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->dim()));
  vac(0) = 1.0;
  CHECK(vac.dot(q2.apply(vac)).real() == doctest::Approx(1.0 / (2.0 * w)).epsilon(1e-14));
}

TEST_CASE("circular modes diagonalize W12 with eigenvalue n+ - n-") {
  const int n = 4;
  const auto circ = basis_of(fiber_spec(n, 1.3, true));
  const auto cart = basis_of(fiber_spec(n, 1.3, false));
  const BosonOps oc = build_boson_ops(circ);
  const BosonOps ok = build_boson_ops(cart);
  const Eigen::MatrixXcd wc = boson_matrix(*oc.W12);
  const Eigen::MatrixXcd wk = boson_matrix(*ok.W12);
  for (Eigen::Index r = 0; r < wc.rows(); ++r) {
    const auto& occ = circ->occupations(static_cast<std::size_t>(r));
    for (Eigen::Index c = 0; c < wc.cols(); ++c) {
      const double expected = r == c ? occ[0] - occ[1] : 0.0;
      CHECK(std::abs(wc(r, c) - expected) < 1e-12);
    }
  }
  // The Cartesian W12 is unitarily equivalent: same spectrum.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(wk);
  std::vector<double> ek(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::vector<double> ec;
  for (Eigen::Index i = 0; i < wc.rows(); ++i) ec.push_back(wc(i, i).real());
  std::sort(ec.begin(), ec.end());
  REQUIRE(ek.size() == ec.size());
  for (std::size_t i = 0; i < ek.size(); ++i) CHECK(ek[i] == doctest::Approx(ec[i]).epsilon(1e-10));
}

TEST_CASE("[q, p] = i holds away from the cutoff") {
  const int n = 6;
  const auto basis = basis_of(fiber_spec(n, 0.8));
  const BosonOps ops = build_boson_ops(basis);
  bool boundary_defect = false;
  for (std::size_t b = 0; b < basis->boson_dim(); ++b) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->dim()));
    e(static_cast<Eigen::Index>(basis->offset(b))) = 1.0;
    const Eigen::VectorXcd d =
        ops.q[0].apply(ops.p[0].apply(e)) - ops.p[0].apply(ops.q[0].apply(e)) - cd(0, 1) * e;
    if (basis->total_quanta(b) <= n - 2) {
      CHECK(d.norm() < 1e-13);
    } else if (d.norm() > 1e-3) {
      boundary_defect = true;
    }
  }
  CHECK(boundary_defect);
}

TEST_CASE("gauge sector dimension matches enumeration") {
  const auto sector = build_gauge_sector(fiber_spec(2, 1.0, true));
  // Oracle: occupations (n1+, n1-, n2+, n2-) with total <= 2 and fermion
  // charge m = (-Z0 + Z1 - Z2 + Z3)/2 with Z_m = 1 - 2 bit_m.
  std::size_t count = 0;
  for (int a = 0; a <= 2; ++a)
    for (int b = 0; a + b <= 2; ++b)
      for (int c = 0; a + b + c <= 2; ++c)
        for (int d = 0; a + b + c + d <= 2; ++d)
          for (int f = 0; f < 256; ++f) {
            const auto z = [&](int m) { return 1 - 2 * ((f >> m) & 1); };
            const int twice_m = -z(0) + z(1) - z(2) + z(3);
            if (2 * ((a - b) + (c - d)) + twice_m == 0) ++count;
          }
  CHECK(sector->dim() == count);
  // A fermion state with m = 0 pairs with the zero-angular-momentum vacuum.
  int f0 = -1;
  for (int f = 0; f < 256 && f0 < 0; ++f)
    if (sector->spin_charge_of(f) == 0) f0 = f;
  CHECK(sector->fermion_position(0, f0) >= 0);
}

TEST_CASE("K_t is symmetric and keeps the gauge sector") {
  const BasisSpec spec = full_model_spec(2, 2.0, 2.0, 2.0);
  const auto sector = build_gauge_sector(spec);
  const auto full = basis_of(spec);
  const SparseOperator kt = assemble_Kt(2.0, sector);
  CHECK(symmetry_defect(kt, 20, 5) < 1e-12);
  const SparseOperator kt_out = assemble_Kt(2.0, sector, full);
  const Eigen::VectorXcd v = random_vector(sector->dim(), 6);
  CHECK(sector_leakage(kt_out, *sector, v) < 1e-12 * v.norm());
  // Negative control: q1 alone is not gauge invariant.
  const SparseOperator q1(NumericPolynomial(q(0)), sector, full, "q1", false);
  CHECK(sector_leakage(q1, *sector, v) > 1e-3 * v.norm());
}

TEST_CASE("K_t and t^(2/3) H_(t^(2/3)) agree on dilated bases") {
  const double t = 3.0;
  const BasisSpec ks = full_model_spec(2, 1.5, 1.8, 2.1);
  const auto kb = build_gauge_sector(ks);
  const auto hb = build_gauge_sector(scaling_link(t, ks));
  REQUIRE(kb->dim() == hb->dim());
  const SparseOperator kt = assemble_Kt(t, kb);
  const SparseOperator hk = assemble_Hk(std::pow(t, 2.0 / 3.0), hb);
  const Eigen::VectorXcd v = random_vector(kb->dim(), 8);
  const Eigen::VectorXcd a = kt.apply(v);
  const Eigen::VectorXcd b = std::pow(t, 2.0 / 3.0) * hk.apply(v);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10 * a.cwiseAbs().maxCoeff());
}

TEST_CASE("fiber and slice operators are symmetric") {
  const auto fb = basis_of(fiber_spec(3, 2.0));
  CHECK(symmetry_defect(assemble_fiber(1.0, {2, 0, 0, 0, 0}, fb), 5, 1) < 1e-12);
  CHECK(symmetry_defect(assemble_fiber(1.0, {1, 1, 0, 0, 1}, fb, true), 5, 2) < 1e-12);
  const auto sb = basis_of(slice_spec(2, std::sqrt(2.0) * 2.0));
  CHECK(symmetry_defect(assemble_Gt(2.0, sb), 5, 3) < 1e-12);
  CHECK_THROWS_AS(assemble_fiber(1.0, {1, 0, 0, 0, 0}, basis_of(full_model_spec(1, 1, 1, 1))),
                  std::invalid_argument);
}

TEST_CASE("H0_x annihilates the Gaussian times the ground space of the fermion term") {
  const std::array<double, 5> x{0.0, 2.0, 0.0, 0.0, 0.0};
  const auto basis = basis_of(fiber_spec(4, 2.0));
  const SparseOperator h0 = assemble_fiber(1.0, x, basis, true);
  const Eigen::MatrixXcd w = ground_space_Wx(x, FermionLayout::Charge);
  REQUIRE(w.cols() == 16);
  for (Eigen::Index c = 0; c < w.cols(); ++c) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->dim()));
    v.head(256) = w.col(c);
    CHECK(h0.apply(v).norm() < 1e-12);
  }
}

TEST_CASE("G_t annihilates the vacuum times the fermion ground state") {
  const double t = 4.0;
  const auto basis = basis_of(slice_spec(2, std::sqrt(2.0) * t));
  const SparseOperator g = assemble_Gt(t, basis);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->dim()));
  v(255) = 1.0;
  CHECK(g.apply(v).norm() < 1e-12);
}

TEST_CASE("Q_1k is parity odd and squares to H_k on interior gauge states") {
  const BasisSpec spec = full_model_spec(5, 1.5, 1.5, 1.5);
  const auto sector = build_gauge_sector(spec);
  const auto even = build_gauge_sector(spec, 1);
  const double k = 0.7;
  const SparseOperator qk = assemble_Q1k(k, sector);
  const SparseOperator hk = assemble_Hk(k, sector);
  CHECK(symmetry_defect(qk, 3, 4) < 1e-12);

  const Eigen::VectorXcd v = interior_vector(*sector, spec.cutoff - 4, 9);
  const Eigen::VectorXcd r = 2.0 * qk.apply(qk.apply(v)) - hk.apply(v);
  CHECK(r.norm() < 1e-8 * v.norm());

  // Even input: the even part of the output vanishes exactly.
  const SparseOperator q_even = assemble_Q1k(k, even, sector);
  const Eigen::VectorXcd y = q_even.apply(random_vector(even->dim(), 10));
  CHECK(restrict_to(*sector, *even, y).norm() == 0.0);

  // k = 0 gives Q_1.
  const SparseOperator q0 = assemble_Q1k(0.0, sector);
  const SparseOperator q1(NumericPolynomial(model_operators().Q[0]), sector, sector, "Q1", true);
  const Eigen::VectorXcd u = random_vector(sector->dim(), 11);
  CHECK((q0.apply(u) - q1.apply(u)).norm() == 0.0);
}
