#pragma once

// Scalar potentials V, V_k, V_1, the zero set of V_1, its Hessian and the
// quadratic model on the gauge-fixed slice q_1 = 0.

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "susyqm/weyl_algebra.hpp"

namespace susyqm {

/// xi = (q_1..q_4, x^1..x^5).
struct ConfigPoint {
  std::array<double, 4> q{};
  std::array<double, 5> x{};

  Eigen::Matrix<double, 9, 1> xi() const;
  static ConfigPoint from_xi(const Eigen::Matrix<double, 9, 1>& xi);
};

enum class PotentialVariant { V, Vk, V1 };

double eval_potential(const ConfigPoint& p, double k, PotentialVariant variant);

/// Exact polynomial of a potential (V_k carries the formal k).
OperatorPolynomial potential_polynomial(PotentialVariant variant);

/// The rewritten form |x|^2|q|^2 + (|q12|^2/2 - 1)^2 + |q34|^2 (1 + |q34|^2/4 + |q12|^2/2).
/// `drop_constant` removes the -1 inside the square (negative control).
OperatorPolynomial v1_completed_square(bool drop_constant = false);

/// Exact polynomial identity between the definition of V_1 and its rewrite.
bool verify_jps_identity(bool drop_constant = false);

/// Exact partial derivative of a momentum-free polynomial, d f = i [p, f].
OperatorPolynomial partial_derivative(const OperatorPolynomial& f, int var);

/// Value of a momentum-free polynomial with scalar coefficients.
double evaluate_real(const OperatorPolynomial& f, const Eigen::Matrix<double, 9, 1>& xi,
                     double k = 0.0);

/// Hessian of V_1 from exact symbolic second derivatives.
Eigen::Matrix<double, 9, 9> hessian_V1(const ConfigPoint& p);

/// The block matrix blockdiag((2 q_r q_s), 4 I_2, 4 I_5) at a point of Gamma.
Eigen::Matrix<double, 9, 9> gamma_hessian_block(const ConfigPoint& p);

/// (sqrt2 cos a, sqrt2 sin a, 0, 0; 0).
ConfigPoint gamma_point(double alpha);

/// Euclidean distance to the circle Gamma, in closed form.
double distance_to_gamma(const ConfigPoint& p);

/// Slice coordinates eta = (q_2, q_3, q_4, x^1..x^5) with q_1 = 0.
using SlicePoint = Eigen::Matrix<double, 8, 1>;
ConfigPoint slice_to_config(const SlicePoint& eta);

struct QuadraticModel {
  SlicePoint eta0;                    // (sqrt2, 0, ..., 0)
  Eigen::Matrix<double, 8, 8> hessian;  // Hessian of V_1 at eta0 restricted to the slice
  double value(const SlicePoint& eta) const;
  Eigen::Matrix<double, 8, 1> gradient(const SlicePoint& eta) const;
};

QuadraticModel quadratic_model();

struct CubicRemainderFit {
  std::vector<double> radii;
  std::vector<double> constants;  // max |V_1 - V_quad| / r^3 over samples on each sphere
};

CubicRemainderFit fit_cubic_remainder(const std::vector<double>& radii, int samples,
                                      std::uint64_t seed);

struct GtLevel {
  double energy = 0.0;  // rescaled units (G_t / t)
  long long multiplicity = 0;
  long long even = 0;   // states with an even number of fermionic excitations
  long long odd = 0;
};

struct GtSpectrum {
  double boson_zero_point = 0.0;   // 8 sqrt2
  double fermion_ground = 0.0;     // -8 sqrt2
  double ground_energy = 0.0;      // 0
  long long ground_multiplicity = 0;
  double gap = 0.0;                // 2 sqrt2
  std::vector<GtLevel> levels;     // lowest `num_levels` distinct levels
};

/// Exact spectrum of -Laplacian + (1/2) Hess eta eta + H_F(eta0); G_t itself
/// has t times these eigenvalues. Throws std::invalid_argument for t <= 0.
GtSpectrum analytic_Gt_spectrum(double t, int num_levels = 4);

}  // namespace susyqm
