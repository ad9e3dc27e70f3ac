#pragma once

// The 256-dimensional fermion space F carrying the 16 Clifford generators.
//
// Representation: eight two-level modes with a parity string. The generator
// placed at chain position p acts on mode p/2 as X/sqrt2 (p even) or
// Y/sqrt2 (p odd), preceded by Z on every lower mode. Basis state index n
// has bit m equal to the occupation of mode m.
//
// Two placements are provided:
//  * Canonical: psi_a at position 2a-2, lambda_a at 2a-1 (a = 1..8). The
//    bilinear -2 sqrt2 i sum lambda_a psi_a becomes -sqrt2 sum_m Z_m.
//  * Charge: theta_c at position c-1, i.e. psi pairs on modes 0..3 and lambda
//    pairs on modes 4..7. The spin part M of the gauge generator becomes
//    (-Z_0 + Z_1 - Z_2 + Z_3)/2, so the gauge constraint is a filter on
//    basis indices.

#include <array>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "susyqm/clifford.hpp"
#include "susyqm/exact_matrix.hpp"

namespace susyqm {

inline constexpr int kFermionDim = 256;

enum class FermionLayout { Canonical, Charge };

/// Chain position of generator g (0..15) in the given layout.
int chain_position(FermionLayout layout, int g);

/// 256x256 exact matrix stored by rows as sorted (column, value) lists.
/// Operators built from Clifford monomials have one entry per row, so the
/// sparse form keeps exact products cheap; semantics are those of the dense
/// matrix.
class FermionMatrix {
 public:
  using Entry = std::pair<std::uint16_t, ExactScalar>;

  FermionMatrix() : rows_(kFermionDim) {}

  static FermionMatrix identity();

  const std::vector<Entry>& row(std::size_t r) const { return rows_[r]; }
  ExactScalar operator()(std::size_t r, std::size_t c) const;
  void add(std::size_t r, std::size_t c, const ExactScalar& v);

  FermionMatrix adjoint() const;
  ExactScalar trace() const;
  bool is_zero() const;
  bool is_hermitian() const { return *this == adjoint(); }
  std::size_t nonzeros() const;

  FermionMatrix operator-() const;
  FermionMatrix& operator+=(const FermionMatrix& o);
  FermionMatrix& operator-=(const FermionMatrix& o);
  FermionMatrix& operator*=(const ExactScalar& s);

  friend FermionMatrix operator+(FermionMatrix a, const FermionMatrix& b) { return a += b; }
  friend FermionMatrix operator-(FermionMatrix a, const FermionMatrix& b) { return a -= b; }
  friend FermionMatrix operator*(FermionMatrix a, const ExactScalar& s) { return a *= s; }
  friend FermionMatrix operator*(const ExactScalar& s, FermionMatrix a) { return a *= s; }
  friend FermionMatrix operator*(const FermionMatrix& a, const FermionMatrix& b);
  friend bool operator==(const FermionMatrix& a, const FermionMatrix& b) {
    return a.rows_ == b.rows_;
  }

  Eigen::MatrixXcd to_dense() const;

 private:
  std::vector<std::vector<Entry>> rows_;
};

FermionMatrix commutator(const FermionMatrix& a, const FermionMatrix& b);
FermionMatrix anticommutator(const FermionMatrix& a, const FermionMatrix& b);

/// Action of one Clifford monomial on basis states: e_A |n> = phase(n) |n ^ flip>.
/// The phase lies in {+-1, +-i} times 2^{-|A|/2}.
struct MonomialAction {
  std::uint8_t flip = 0;
  std::array<std::complex<double>, kFermionDim> phase{};
};

MonomialAction monomial_action(CliffordMask mask, FermionLayout layout);

/// Exact matrix of a Clifford element.
FermionMatrix materialize(const ExactClifford& element, FermionLayout layout);

/// Floating matrix of a Clifford element.
Eigen::MatrixXcd materialize_dense(const CliffordElement<std::complex<double>>& element,
                                   FermionLayout layout);

/// theta_1..theta_16 = psi_1..psi_8, lambda_1..lambda_8.
std::array<FermionMatrix, kNumMajorana> build_majorana_generators(
    FermionLayout layout = FermionLayout::Canonical);

/// (-1)^F = 2^8 lambda_1 ... lambda_8 psi_1 ... psi_8, as a Clifford element.
ExactClifford fermion_parity_element();
FermionMatrix fermion_parity(FermionLayout layout = FermionLayout::Canonical);

/// i theta S theta = i sum_ab theta_a S_ab theta_b for exact antisymmetric S
/// (16x16). Throws std::invalid_argument if S is not antisymmetric.
ExactClifford bilinear_element(const ExactMatrix& s);
FermionMatrix bilinear(const ExactMatrix& s, FermionLayout layout = FermionLayout::Canonical);

/// Floating version; rejects S with |S + S^T| > 1e-12.
Eigen::MatrixXcd bilinear_dense(const Eigen::MatrixXd& s,
                                FermionLayout layout = FermionLayout::Canonical);

struct BilinearGround {
  double energy = 0.0;         // -1/2 tr sqrt(S^T S)
  int degeneracy = 0;          // 2^{dim ker S / 2}
  Eigen::MatrixXcd basis;      // 256 x degeneracy, orthonormal columns
};

/// Ground space of i theta S theta from the annihilation conditions
/// (sum_a conj(v_a) theta_a) xi = 0 for every eigenvector v of iS with
/// positive eigenvalue. The basis is fixed by Gram-Schmidt of the projected
/// standard basis vectors taken in index order.
BilinearGround bilinear_ground(const Eigen::MatrixXd& s,
                               FermionLayout layout = FermionLayout::Canonical);

/// Coefficient matrix S(q, x) with H_F = i theta S theta, where
/// H_F = -i x^mu psi gamma^mu s2 psi - 2i q_j lambda s^j s2 psi (the sign of
/// the Yukawa term is the one fixed by the superalgebra, see model_operators).
Eigen::MatrixXd hf_coefficient(const std::array<double, 4>& q, const std::array<double, 5>& x);
Eigen::MatrixXcd hf_matrix(const std::array<double, 4>& q, const std::array<double, 5>& x,
                           FermionLayout layout = FermionLayout::Canonical);

/// W_x: ground space of -i x^mu psi gamma^mu s2 psi, orthonormal 256 x 16.
/// Throws std::invalid_argument for x = 0.
Eigen::MatrixXcd ground_space_Wx(const std::array<double, 5>& x,
                                 FermionLayout layout = FermionLayout::Canonical);

/// M = -(i/2) psi s2 psi.
ExactClifford spin_part_M_element();
FermionMatrix spin_part_M(FermionLayout layout = FermionLayout::Canonical);

/// -(i/4) gamma^{mu nu}_ab (lambda_a lambda_b + psi_a psi_b), in bivector order.
std::vector<ExactClifford> spin5_fermion_elements();
std::vector<FermionMatrix> spin5_fermion_generators(
    FermionLayout layout = FermionLayout::Canonical);

}  // namespace susyqm
