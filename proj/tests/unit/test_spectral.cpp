#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "susyqm/potential_landscape.hpp"
#include "susyqm/spectral_engine.hpp"

using namespace susyqm;

namespace {

std::shared_ptr<const SectorBasis> oscillator_1d(int cutoff, double w, std::optional<int> parity) {
  BasisSpec spec;
  spec.cutoff = cutoff;
  spec.active[x_var(0)] = true;
  spec.frequencies[x_var(0)] = w;
  spec.circular_planes = false;
  spec.layout = FermionLayout::Canonical;
  return std::make_shared<const SectorBasis>(spec, SectorFilter{false, parity, {}});
}

SpectrumReport synthetic(std::vector<double> values) {
  SpectrumReport r;
  r.eigenvalues = std::move(values);
  return r;
}

}  // namespace

TEST_CASE("lowest_eigs reports residuals, parities and sector metadata") {
  const auto basis = oscillator_1d(20, 1.0, -1);
  const auto xp = OperatorPolynomial::position(x_var(0));
  const auto pp = OperatorPolynomial::momentum(x_var(0));
  const SparseOperator h(NumericPolynomial(pp * pp + xp * xp), basis, basis, "osc", true);
  EigenOptions opt;
  opt.count = 2;
  opt.block = 2;
  opt.tol = 1e-10;
  const SpectrumReport r = lowest_eigs(h, opt);
  REQUIRE(r.converged);
  CHECK(r.sector == "(-1)^F=-1");
  CHECK(r.dim == basis->dim());
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    CHECK(r.eigenvalues[i] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.residuals[i] < 1e-10);
    CHECK(r.parities[i] == doctest::Approx(-1.0));
  }
}

TEST_CASE("lowest_eigs flags a solve that misses the tolerance") {
  const auto basis = oscillator_1d(25, 1.0, 1);
  const auto xp = OperatorPolynomial::position(x_var(0));
  const auto pp = OperatorPolynomial::momentum(x_var(0));
  // Quartic term: not diagonal, so one Krylov cycle is not enough.
  const SparseOperator h(NumericPolynomial(pp * pp + xp * xp * xp * xp), basis, basis, "anh", true);
  EigenOptions opt;
  opt.count = 1;
  opt.max_basis = 6;
  opt.max_restarts = 0;
  opt.tol = 1e-14;
  const SpectrumReport r = lowest_eigs(h, opt);
  CHECK_FALSE(r.converged);
  CHECK(r.residuals[0] > 1e-14);
}

TEST_CASE("pairing report groups levels across parity sectors") {
  const PairingTable t =
      susy_pairing_report(synthetic({1e-12, 2.0, 2.0, 5.0}), synthetic({2.0 + 1e-9, 5.0, 7.0}), 1e-8);
  CHECK(t.unpaired_near_zero() == 1);
  CHECK(t.unpaired_even.size() == 1);
  REQUIRE(t.pairs.size() == 2);
  CHECK(t.pairs[0].defect == doctest::Approx(1e-9).epsilon(1e-3));
  CHECK(t.pairs[1].defect == 0.0);
  CHECK(t.max_defect < 2e-9);
}

TEST_CASE("quadratic model: numerical spectrum matches the harmonic levels") {
  const double t = 2.0;
  EigenOptions opt;
  opt.count = 4;
  opt.block = 2;
  opt.tol = 1e-9;
  const GtNumericReport rep = gt_numeric_spectrum(t, 4, opt);
  REQUIRE(rep.even.converged);
  REQUIRE(rep.odd.converged);
  CHECK(std::abs(rep.ground_over_t) < 1e-9);
  CHECK(rep.ground_multiplicity == 1);
  CHECK(rep.gap_over_t == doctest::Approx(2.0 * std::numbers::sqrt2).epsilon(1e-10));
  CHECK(rep.pairing.unpaired_near_zero() == 1);
  CHECK(rep.pairing.max_defect < 1e-8);
  // Oracle: levels from the analytic harmonic spectrum.
  const GtSpectrum exact = analytic_Gt_spectrum(t, 4);
  REQUIRE(rep.pairing.pairs.size() >= 2);
  CHECK(rep.pairing.pairs[0].even / t == doctest::Approx(exact.levels[1].energy).epsilon(1e-10));
  CHECK(rep.pairing.pairs[1].odd / t == doctest::Approx(exact.levels[2].energy).epsilon(1e-10));
  for (double p : rep.even.parities) CHECK(p == doctest::Approx(1.0));
  for (double p : rep.odd.parities) CHECK(p == doctest::Approx(-1.0));
}

TEST_CASE("H0_x ground space from the quanta sectors") {
  EigenOptions opt;
  opt.count = 17;
  opt.block = 18;
  opt.tol = 1e-9;
  const FiberGroundReport r = fiber_ground_space({0.0, 2.0, 0.0, 0.0, 0.0}, 4, 1e-6, opt);
  CHECK(r.converged);
  CHECK(r.complete);
  CHECK(r.multiplicity == 16);
  CHECK(std::abs(r.lowest) < 1e-10);
  // Next level: one boson quantum, 2|x|.
  CHECK(r.first_excited == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(r.max_leakage < 1e-10);
  CHECK(r.sector_lowest.size() == 5);
}

TEST_CASE("fiber scan at a small cutoff") {
  EigenOptions opt;
  opt.tol = 1e-9;
  const FiberBoundReport r = fiber_scan(1.0, {4.0, 8.0}, 4, opt);
  REQUIRE(r.points.size() == 2);
  for (const auto& p : r.points) {
    CHECK(p.converged);
    CHECK(p.lowest < 1.0);
    CHECK(p.projected_min >= 1.0 - 1e-9);
    CHECK(p.coupling_norm > 0.0);
  }
  CHECK(r.monotone);
  CHECK(r.no_violation);
  CHECK(r.c_fit >= r.points[1].scaled_deficit);
  CHECK(r.coupling_exponent < 0.0);
  CHECK_THROWS_AS(fiber_scan(1.0, {0.5}, 2, opt), std::invalid_argument);
  CHECK_THROWS_AS(fiber_scan(1.0, {4.0, 2.0}, 2, opt), std::invalid_argument);
}

TEST_CASE("gauge-fixed Laplacian identity on three families") {
  GaugeLaplacianOptions o;
  o.points_per_family = 12;
  const GaugeLaplacianReport r = verify_gauge_laplacian(o);
  REQUIRE(r.families.size() == 3);
  CHECK(r.points == 36);
  CHECK(r.families[0].max_discrepancy < 1e-8);
  CHECK(r.max_discrepancy < 1e-6);
  CHECK(r.max_gauge_defect < 1e-7);
  CHECK(r.max_richardson < 1e-6);

  o.drop_quarter = true;
  const GaugeLaplacianReport m = verify_gauge_laplacian(o);
  CHECK(m.max_discrepancy > 1e-2);

  CHECK_THROWS_AS(gauge_laplacian_point(GaugeFamily::Mixed, 0, 0.05, 0.1, 0.2, {}, 1e-3, false),
                  std::domain_error);
}

TEST_CASE("spherical decay integral") {
  const SphericalDecayReport r = spherical_decay_integral(1.0, {1, 2, 4, 8, 16});
  CHECK(r.quadrature_converged);
  CHECK(r.max_oracle_error < 1e-10);
  CHECK(r.bounded);
  CHECK(r.monotone);
  CHECK(r.pointwise_ordering);
  CHECK(r.max_collapse_defect < 1e-10);
  CHECK(r.sup_scaled < r.limit);
  // Both branches integrate to the same value (cos th -> -cos th).
  for (const auto& p : r.points) CHECK(p.minus == doctest::Approx(p.plus).epsilon(1e-12));
  const QuadratureResult q = spherical_integral(0.5, 3.0, 1);
  CHECK(q.value == doctest::Approx(spherical_integral_closed_form(0.5, 3.0)).epsilon(1e-12));
  CHECK_THROWS_AS(spherical_integral(0.0, 1.0, 1), std::invalid_argument);
}

TEST_CASE("x-axis marginal of the oscillator vacuum is a normalized Gaussian") {
  BasisSpec spec = full_model_spec(2, 1.0, 1.0, 0.7);
  const auto basis = std::make_shared<const SectorBasis>(spec, SectorFilter{});
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->dim()));
  v(0) = cd(0.6, 0.8);
  std::vector<double> s;
  for (int i = -400; i <= 400; ++i) s.push_back(i * 0.02);
  const std::vector<double> m = x_axis_marginal(*basis, v, 2, s);
  double integral = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(m[i] == doctest::Approx(std::sqrt(0.7 / std::numbers::pi) * std::exp(-0.7 * s[i] * s[i]))
                      .epsilon(1e-10));
    integral += 0.02 * m[i];
  }
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("decay diagnostic on an unresolved basis is inconclusive") {
  DecayOptions o;
  o.x_cutoff = 1;
  o.plane12_cutoff = 2;
  o.plane34_cutoff = 0;
  EigenOptions opt;
  opt.tol = 1e-8;
  const DecayReport r = decay_diagnostic(o, opt);
  CHECK(r.status == "inconclusive");
  CHECK_FALSE(r.reason.empty());
  CHECK(r.radii.size() == 25);
}

TEST_CASE("without H_F both parity sectors have the same levels") {
  // Fermions are spectators and each M value occurs in both parities, so the
  // control shows full pairing and no state near zero.
  KtBasisChoice c;
  c.other_cutoff = 1;
  c.plane_cutoff = 4;
  EigenOptions opt;
  opt.count = 2;
  opt.tol = 1e-9;
  const NoHfControl ctl = kt_no_hf_control(2.0, kt_basis_spec(2.0, c), opt);
  CHECK(ctl.even.eigenvalues[0] == doctest::Approx(ctl.odd.eigenvalues[0]).epsilon(1e-8));
  CHECK_FALSE(ctl.has_unpaired_zero);
  CHECK(ctl.lowest_over_t > 0.1);
}

TEST_CASE("semiclassical scan validates its grid and reports per-t spectra") {
  KtBasisChoice c;
  c.other_cutoff = 1;
  c.plane_cutoff = 4;
  EigenOptions opt;
  opt.count = 2;
  opt.tol = 1e-8;
  CHECK_THROWS_AS(semiclassical_scan({4.0, 2.0}, c, opt), std::invalid_argument);
  const SemiclassicalReport r = semiclassical_scan({1.0, 2.0}, c, opt, 2);
  REQUIRE(r.points.size() == 2);
  for (const auto& p : r.points) {
    CHECK(p.converged);
    CHECK(p.E1 <= p.E2);
    CHECK(p.dim_even > 0);
  }
  CHECK(r.max_residual < 1e-8);
}
