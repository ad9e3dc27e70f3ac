#pragma once

// Truncated harmonic-oscillator bases for the bosonic coordinates, the gauge
// and parity sectors, and matrix-free application of operators given as
// OperatorPolynomials.
//
// Each active coordinate carries an oscillator with frequency w:
//   q = (a + a^dag) / sqrt(2w),  p = i sqrt(w/2) (a^dag - a),
// so <0|q^2|0> = 1/(2w) and p^2 + w^2 q^2 = w (2n + 1). The two q-planes can
// use circular modes a_(+-) = (a_1 -+ i a_2)/sqrt2, in which W_12 (W_34) is
// diagonal. Truncation keeps all states with total quanta <= N (optionally
// with separately truncated units). Operators are
// Galerkin projections: the matrix element <m|q^c p^b|n> is taken from the
// untruncated oscillator, so Rayleigh quotients are variational.

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "susyqm/fermion_fock.hpp"
#include "susyqm/weyl_algebra.hpp"

namespace susyqm {

using cd = std::complex<double>;

struct BasisSpec {
  int cutoff = 0;                                 // N, max total quanta
  // Units with unit_cutoff >= 0 (set on both variables of a plane) are left
  // out of the total and bounded by their own cutoff instead.
  std::array<int, kNumBosons> unit_cutoff{-1, -1, -1, -1, -1, -1, -1, -1, -1};
  std::array<double, kNumBosons> frequencies{};   // w per variable
  std::array<bool, kNumBosons> active{};          // variables carrying an oscillator
  bool circular_planes = true;                    // (q1,q2), (q3,q4) in circular modes
  FermionLayout layout = FermionLayout::Charge;

  bool include_x() const;
  int max_quanta() const;
  /// Throws std::invalid_argument on N < 0, w <= 0, or a circular plane whose
  /// two frequencies differ or that is only partially active.
  void validate() const;
};

/// All nine coordinates; w_12 for the (q1,q2) plane, w_34 for (q3,q4), w_x for x.
BasisSpec full_model_spec(int cutoff, double w12, double w34, double wx);
/// The four q-coordinates only (x is a parameter).
BasisSpec fiber_spec(int cutoff, double w, bool circular_planes = false);
/// The eight slice coordinates (q2, q3, q4, x) with q1 fixed; Cartesian modes.
BasisSpec slice_spec(int cutoff, double w);

/// One boson unit: a Cartesian coordinate or a circular plane (two slots).
struct BosonUnit {
  bool plane = false;
  int var = 0;   // Cartesian variable, or first variable of the plane
  int var2 = 0;  // second variable of the plane
};

struct SectorFilter {
  bool gauge = false;             // J = 0
  std::optional<int> parity;      // +1 or -1 eigenvalue of (-1)^F
  std::optional<int> quanta;      // keep only boson states with this total quanta
};

/// Packed basis of (boson multi-index, fermion index) pairs surviving a filter.
class SectorBasis {
 public:
  SectorBasis(const BasisSpec& spec, const SectorFilter& filter);

  const BasisSpec& spec() const { return spec_; }
  const SectorFilter& filter() const { return filter_; }
  const std::vector<BosonUnit>& units() const { return units_; }

  std::size_t dim() const { return dim_; }
  std::size_t boson_dim() const { return occupations_.size(); }
  std::size_t num_slots() const { return slots_; }

  /// Slot occupations of boson state b (plane units contribute (n+, n-)).
  const std::vector<std::uint8_t>& occupations(std::size_t b) const { return occupations_[b]; }
  int total_quanta(std::size_t b) const { return quanta_[b]; }
  /// Eigenvalue of W_12 + W_34 on boson state b (0 without circular planes).
  int boson_charge(std::size_t b) const { return charge_[b]; }
  /// Boson state index for slot occupations, or -1 if outside the truncation.
  long find_boson(const std::vector<std::uint8_t>& occ) const;

  std::size_t offset(std::size_t b) const { return offsets_[b]; }
  const std::vector<std::uint16_t>& fermions(std::size_t b) const;
  /// Position of fermion state f within boson state b's block, or -1.
  int fermion_position(std::size_t b, int f) const;

  /// (-1)^F eigenvalue and M eigenvalue (charge layout) of fermion state f.
  int fermion_parity_of(int f) const { return parity_[f]; }
  int spin_charge_of(int f) const { return m_charge_[f]; }

 private:
  BasisSpec spec_;
  SectorFilter filter_;
  std::vector<BosonUnit> units_;
  std::size_t slots_ = 0;
  std::vector<std::vector<std::uint8_t>> occupations_;
  std::vector<int> quanta_;
  std::vector<int> charge_;
  std::vector<std::uint64_t> keys_;  // sorted copy with indices for lookup
  std::vector<std::uint32_t> key_index_;
  std::vector<std::size_t> offsets_;
  std::vector<int> class_of_;  // fermion filter class per boson state
  std::vector<std::vector<std::uint16_t>> class_fermions_;
  std::vector<std::array<std::int16_t, kFermionDim>> class_position_;
  std::array<int, kFermionDim> parity_{};
  std::array<int, kFermionDim> m_charge_{};
  std::size_t dim_ = 0;
};

/// Polynomial with floating Clifford coefficients (parameters substituted).
class NumericPolynomial {
 public:
  using Coefficient = CliffordElement<cd>;

  NumericPolynomial() = default;
  /// scale * P with the formal k set to `k`.
  NumericPolynomial(const OperatorPolynomial& p, cd scale = 1.0, double k = 0.0);

  void add(const OperatorPolynomial& p, cd scale = 1.0, double k = 0.0);
  void add(const NumericPolynomial& p, cd scale = 1.0);
  /// Replace position variable `var` by a number. Throws if its momentum occurs.
  NumericPolynomial substitute(int var, double value) const;

  const std::map<WeylMonomial, Coefficient>& terms() const { return terms_; }

 private:
  std::map<WeylMonomial, Coefficient> terms_;
};

/// Matrix-free linear map between two sector bases.
class SparseOperator {
 public:
  SparseOperator(const NumericPolynomial& poly, std::shared_ptr<const SectorBasis> in,
                 std::shared_ptr<const SectorBasis> out, std::string label, bool symmetric);

  const std::string& label() const { return label_; }
  bool symmetric() const { return symmetric_; }
  const SectorBasis& in() const { return *in_; }
  const SectorBasis& out() const { return *out_; }
  std::shared_ptr<const SectorBasis> in_ptr() const { return in_; }
  std::shared_ptr<const SectorBasis> out_ptr() const { return out_; }

  /// y = A x (y is overwritten).
  void apply(const cd* x, cd* y) const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;

  /// Number of stored boson transitions (memory diagnostic).
  std::size_t transitions() const { return targets_.size(); }

 private:
  struct FermionTerm {
    std::uint32_t id;
    cd coeff;
  };
  std::string label_;
  bool symmetric_ = false;
  std::shared_ptr<const SectorBasis> in_;
  std::shared_ptr<const SectorBasis> out_;
  // Fermion matrices by column: columns_[id][f] = list of (f', value).
  std::vector<std::vector<std::vector<std::pair<std::uint16_t, cd>>>> columns_;
  // CSR over source boson states.
  std::vector<std::size_t> row_start_;
  std::vector<std::uint32_t> targets_;
  std::vector<cd> scalars_;
  std::vector<std::size_t> fterm_start_;
  std::vector<FermionTerm> fterms_;
};

/// max |<u, A v> - <A u, v>| / (|u| |v|) over random pairs.
double symmetry_defect(const SparseOperator& op, int pairs, std::uint64_t seed);

/// Norm of the part of A v outside the sector, for v in the sector; the
/// operator must map into an unfiltered output basis of the same spec.
double sector_leakage(const SparseOperator& op_full_out, const SectorBasis& sector,
                      const Eigen::VectorXcd& v);

/// Embed a sector vector into a larger basis of the same spec (zero fill).
Eigen::VectorXcd embed(const SectorBasis& from, const SectorBasis& to, const Eigen::VectorXcd& v);
/// Restrict a vector to a sub-basis of the same spec.
Eigen::VectorXcd restrict_to(const SectorBasis& from, const SectorBasis& to,
                             const Eigen::VectorXcd& v);

/// Single-coordinate operators q, p on a basis (variable index), for the
/// truncation checks on [q, p].
struct BosonOps {
  std::vector<SparseOperator> q;   // one per active variable, in variable order
  std::vector<SparseOperator> p;
  std::vector<int> vars;
  std::optional<SparseOperator> W12;
  std::optional<SparseOperator> W34;
};
BosonOps build_boson_ops(std::shared_ptr<const SectorBasis> basis);

/// The J = 0 sector (optionally with fixed parity). Requires circular planes
/// and the charge layout.
std::shared_ptr<const SectorBasis> build_gauge_sector(const BasisSpec& spec,
                                                      std::optional<int> parity = std::nullopt);

/// Model polynomials shared by the assemblers.
OperatorPolynomial kinetic_polynomial(bool include_x);
OperatorPolynomial hf_x_part();   // -i x psi gamma s2 psi
OperatorPolynomial hf_q_part();   // Yukawa part

/// K_t = -Laplacian + t^2 V_1 + t H_F.
SparseOperator assemble_Kt(double t, std::shared_ptr<const SectorBasis> in,
                           std::shared_ptr<const SectorBasis> out = nullptr);
/// -Laplacian + t^2 V_1 (the fermions are spectators).
SparseOperator assemble_Kt_without_hf(double t, std::shared_ptr<const SectorBasis> in);
/// H_k = -Laplacian + V_k + H_F.
SparseOperator assemble_Hk(double k, std::shared_ptr<const SectorBasis> in,
                           std::shared_ptr<const SectorBasis> out = nullptr);

/// Basis for H_{t^{2/3}} related to a K_t basis by the dilation xi = t^{1/3} eta:
/// every frequency is multiplied by t^{-2/3}.
BasisSpec scaling_link(double t, const BasisSpec& kt_spec);

/// H_{k,x} on L^2(R^4; F); with `free_part_only`, H^0_x = p_i p_i + |x|^2|q|^2 - i x psi gamma s2 psi.
SparseOperator assemble_fiber(double k, const std::array<double, 5>& x,
                              std::shared_ptr<const SectorBasis> basis, bool free_part_only = false,
                              std::shared_ptr<const SectorBasis> out = nullptr);

/// G_t = -Laplacian + t^2 Vbar + t H_F(eta0) in coordinates y = eta - eta0.
SparseOperator assemble_Gt(double t, std::shared_ptr<const SectorBasis> basis);

/// Q_{1,k} = Q_1 + k lambda_2 (maps between parity sectors).
SparseOperator assemble_Q1k(double k, std::shared_ptr<const SectorBasis> in,
                            std::shared_ptr<const SectorBasis> out = nullptr);

/// Frequencies used when none are given: w = sqrt2 t transverse to Gamma for
/// K_t, w = |x| for fibers, w = sqrt2 t on the slice.
double matched_frequency_Kt(double t);
double matched_frequency_fiber(const std::array<double, 5>& x);

}  // namespace susyqm
