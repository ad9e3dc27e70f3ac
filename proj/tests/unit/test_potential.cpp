#include "doctest.h"

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include "susyqm/potential_landscape.hpp"

using namespace susyqm;

namespace {

ConfigPoint random_point(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  ConfigPoint p;
  for (auto& v : p.q) v = u(rng);
  for (auto& v : p.x) v = u(rng);
  return p;
}

double v1_at(const Eigen::Matrix<double, 9, 1>& xi) {
  return eval_potential(ConfigPoint::from_xi(xi), 1.0, PotentialVariant::V1);
}

// Fourth-order central differences.
Eigen::Matrix<double, 9, 9> fd_hessian(const ConfigPoint& p, double h) {
  const Eigen::Matrix<double, 9, 1> xi = p.xi();
  Eigen::Matrix<double, 9, 9> out;
  const double w[4] = {1.0, -8.0, 8.0, -1.0};
  const double o[4] = {-2.0, -1.0, 1.0, 2.0};
  for (int a = 0; a < 9; ++a)
    for (int b = 0; b < 9; ++b) {
      double s = 0.0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          Eigen::Matrix<double, 9, 1> y = xi;
          y(a) += o[i] * h;
          y(b) += o[j] * h;
          s += w[i] * w[j] * v1_at(y);
        }
      out(a, b) = s / (144.0 * h * h);
    }
  return out;
}

}  // namespace

TEST_CASE("completed-square form of V_1 is an exact identity") {
  CHECK(verify_jps_identity());
  CHECK_FALSE(verify_jps_identity(true));
}

TEST_CASE("potential polynomials agree with the closed-form evaluator") {
  std::mt19937_64 rng(11);
  const OperatorPolynomial v = potential_polynomial(PotentialVariant::V);
  const OperatorPolynomial vk = potential_polynomial(PotentialVariant::Vk);
  for (int trial = 0; trial < 20; ++trial) {
    const ConfigPoint p = random_point(rng, 2.0);
    const double k = 0.3 * trial;
    CHECK(evaluate_real(v, p.xi()) ==
          doctest::Approx(eval_potential(p, 0.0, PotentialVariant::V)).epsilon(1e-12));
    CHECK(evaluate_real(vk, p.xi(), k) ==
          doctest::Approx(eval_potential(p, k, PotentialVariant::Vk)).epsilon(1e-12));
  }
}

TEST_CASE("V_1 is nonnegative and vanishes exactly on Gamma") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    const ConfigPoint p = random_point(rng, 3.0);
    CHECK(eval_potential(p, 1.0, PotentialVariant::V1) >= 0.0);
  }
  for (double a : {0.0, 0.4, 1.7, 3.0, 5.5})
    CHECK(std::abs(eval_potential(gamma_point(a), 1.0, PotentialVariant::V1)) < 1e-14);
}

TEST_CASE("Hessian at (sqrt2, 0, ...) has (1,1) entry 4") {
  ConfigPoint p;
  p.q[0] = std::sqrt(2.0);
  const auto h = hessian_V1(p);
  CHECK(h(0, 0) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("symbolic Hessian matches analytic formula and finite differences") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const ConfigPoint p = random_point(rng, 1.5);
    const auto h = hessian_V1(p);
    double nq = 0.0, nx = 0.0;
    for (double v : p.q) nq += v * v;
    for (double v : p.x) nx += v * v;
    Eigen::Matrix<double, 9, 9> exact = Eigen::Matrix<double, 9, 9>::Zero();
    for (int r = 0; r < 4; ++r) {
      const double sigma = r < 2 ? -1.0 : 1.0;
      for (int s = 0; s < 4; ++s) exact(r, s) = 2.0 * p.q[r] * p.q[s];
      exact(r, r) += 2.0 * nx + nq + 2.0 * sigma;
      for (int mu = 0; mu < 5; ++mu) exact(r, 4 + mu) = exact(4 + mu, r) = 4.0 * p.q[r] * p.x[mu];
    }
    for (int mu = 0; mu < 5; ++mu) exact(4 + mu, 4 + mu) = 2.0 * nq;
    CHECK((h - exact).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((h - fd_hessian(p, 1e-3)).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("Hessian on Gamma is the displayed block matrix") {
  for (double a : {0.0, 0.3, 1.1, 2.5, 4.0}) {
    const ConfigPoint p = gamma_point(a);
    CHECK((hessian_V1(p) - gamma_hessian_block(p)).cwiseAbs().maxCoeff() < 1e-12);
    // One flat direction along the circle, eight with curvature 4.
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 9, 9>> es(hessian_V1(p));
    CHECK(std::abs(es.eigenvalues()(0)) < 1e-12);
    for (int i = 1; i < 9; ++i) CHECK(es.eigenvalues()(i) == doctest::Approx(4.0));
  }
}

TEST_CASE("gradient of V_1 vanishes on Gamma") {
  const OperatorPolynomial v1 = potential_polynomial(PotentialVariant::V1);
  for (double a : {0.0, 0.9, 2.2}) {
    const auto xi = gamma_point(a).xi();
    for (int var = 0; var < 9; ++var)
      CHECK(std::abs(evaluate_real(partial_derivative(v1, var), xi)) < 1e-12);
  }
}

TEST_CASE("distance to Gamma agrees with a brute-force minimum over the circle") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const ConfigPoint p = random_point(rng, 2.0);
    double best = 1e300;
    for (int i = 0; i < 20000; ++i) {
      const double a = 2.0 * M_PI * i / 20000.0;
      best = std::min(best, (p.xi() - gamma_point(a).xi()).norm());
    }
    CHECK(distance_to_gamma(p) == doctest::Approx(best).epsilon(1e-6));
  }
}

TEST_CASE("quadratic model on the slice") {
  const QuadraticModel m = quadratic_model();
  CHECK(m.eta0(0) == doctest::Approx(std::sqrt(2.0)));
  CHECK((m.hessian - 4.0 * Eigen::Matrix<double, 8, 8>::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(m.value(m.eta0) == 0.0);

  const CubicRemainderFit fit = fit_cubic_remainder({0.1, 0.05, 0.025}, 200, 7);
  REQUIRE(fit.constants.size() == 3);
  // Cubic scaling: the ratio |V_1 - V_quad| / r^3 settles to a constant.
  for (double c : fit.constants) CHECK(c > 0.1);
  CHECK(fit.constants[2] / fit.constants[1] == doctest::Approx(1.0).epsilon(0.1));
  CHECK(fit.constants[1] / fit.constants[0] == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("harmonic approximation spectrum") {
  CHECK_THROWS_AS(analytic_Gt_spectrum(0.0), std::invalid_argument);
  CHECK_THROWS_AS(analytic_Gt_spectrum(-1.0), std::invalid_argument);

  const GtSpectrum s = analytic_Gt_spectrum(1.0, 4);
  CHECK(s.boson_zero_point == doctest::Approx(8.0 * std::sqrt(2.0)));
  CHECK(s.fermion_ground == doctest::Approx(-8.0 * std::sqrt(2.0)));
  CHECK(std::abs(s.ground_energy) < 1e-10);
  CHECK(s.gap == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(s.ground_multiplicity == 1);

  // Brute-force level counting over boson occupations (n_1..n_8) and
  // fermion excitation subsets.
  for (int level = 0; level < 4; ++level) {
    long long even = 0, odd = 0;
    for (int nf = 0; nf <= 8 && nf <= level; ++nf) {
      long long subsets = 0;
      for (int mask = 0; mask < 256; ++mask)
        if (__builtin_popcount(mask) == nf) ++subsets;
      long long occupations = 0;
      const int nb = level - nf;
      // Enumerate compositions of nb into 8 parts.
      std::function<void(int, int)> rec = [&](int i, int left) {
        if (i == 7) {
          ++occupations;
          return;
        }
        for (int v = 0; v <= left; ++v) rec(i + 1, left - v);
      };
      rec(0, nb);
      (nf % 2 == 0 ? even : odd) += subsets * occupations;
    }
    CHECK(s.levels[level].even == even);
    CHECK(s.levels[level].odd == odd);
    CHECK(s.levels[level].energy == doctest::Approx(2.0 * std::sqrt(2.0) * level).epsilon(1e-10));
  }
}
