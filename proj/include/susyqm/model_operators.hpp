#pragma once

// The supercharges, gauge generator, Hamiltonian, rotation generators and
// their complex/deformed versions as exact OperatorPolynomials, together
// with the exact identity checks between them.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "susyqm/weyl_algebra.hpp"

namespace susyqm {

using DMatrix = std::array<std::array<OperatorPolynomial, 8>, 8>;

/// Generators: psi_a (a = 0..7) and lambda_a as constant polynomials.
OperatorPolynomial psi(int a);
OperatorPolynomial lambda(int a);
OperatorPolynomial q(int j);
OperatorPolynomial x(int mu);
OperatorPolynomial p_q(int j);
OperatorPolynomial p_x(int mu);

/// D_ab = 1/2 (q^R s2 qbar^R)_ab with q^R = sum s^j q_j and
/// qbar^R = s1 q1 - s2 q2 - s3 q3 - s4 q4.
DMatrix build_D_matrix();

struct SuperchargeOptions {
  /// Negative control: flip the sign of the D-term of Q_1.
  bool flip_d_term_of_q1 = false;
};

std::array<OperatorPolynomial, 8> build_supercharges(const SuperchargeOptions& options = {});

// The Yukawa part of H_F is -2i q_j lambda s^j s2 psi: with the supercharges
// above, this sign is the one for which {Q_a, Q_b} closes.
struct GaugeAndHamiltonian {
  OperatorPolynomial J;       // W12 + W34 + M
  OperatorPolynomial H;       // -Laplacian + V + H_F
  OperatorPolynomial V;       // |x|^2 |q|^2 + |q|^4 / 4
  OperatorPolynomial HF;      // fermion bilinear part
  OperatorPolynomial kinetic; // p^mu p^mu + p_i p_i
};

GaugeAndHamiltonian build_gauge_and_hamiltonian();

/// T^{mu nu} in bivector order.
std::vector<OperatorPolynomial> build_spin5_generators();

/// Shared, immutable instances of the builders above.
struct ModelOperators {
  DMatrix D;
  std::array<OperatorPolynomial, 8> Q;
  GaugeAndHamiltonian gh;
  std::vector<OperatorPolynomial> T;
};
const ModelOperators& model_operators();

struct PairResidual {
  int a = 0;
  int b = 0;
  std::size_t terms = 0;
  std::string leading;  // smallest nonzero monomial, empty if zero
};

struct SuperalgebraReport {
  std::vector<PairResidual> pairs;  // 36 unordered pairs, a <= b
  bool all_zero = true;
};

/// {Q_a, Q_b} - delta_ab H - 2 gamma^mu_ab x^mu J for all a <= b.
SuperalgebraReport verify_superalgebra(const std::array<OperatorPolynomial, 8>& Q,
                                       const OperatorPolynomial& J, const OperatorPolynomial& H);

struct DeformedOperators {
  OperatorPolynomial D, Ddag, Dk, Dkdag, Q1k, Hk;
};

/// Complex supercharge D = (Q1 + i Q2)/sqrt2 and its deformation, with k kept
/// as the formal parameter.
DeformedOperators build_complex_and_deformed();

/// Substitute k; throws std::invalid_argument for negative or non-real k.
DeformedOperators deformed_at(const ExactScalar& k);

/// Write P as sum_mu c_mu x^mu J if possible.
std::optional<std::array<ExactScalar, 5>> express_as_xJ(const OperatorPolynomial& P);

struct IdentityCheck {
  std::string name;
  bool pass = false;
  std::size_t residual_terms = 0;
  std::string leading;
};

struct DeformationReport {
  std::vector<IdentityCheck> checks;
  std::optional<std::array<ExactScalar, 5>> d_squared;      // D^2 = sum c_mu x^mu J
  std::optional<std::array<ExactScalar, 5>> ddag_squared;   // (D^dagger)^2
  bool all_pass = true;
};

DeformationReport verify_deformation();

struct SpinorReport {
  std::vector<IdentityCheck> checks;
  std::optional<ExactScalar> c;  // [T^{mu nu}, Q_a] = c gamma^{mu nu}_ab Q_b
  bool all_pass = true;
};

SpinorReport verify_spin5();

/// Helper shared by the reports.
IdentityCheck zero_check(const std::string& name, const OperatorPolynomial& residual);

}  // namespace susyqm
