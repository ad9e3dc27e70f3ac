#pragma once

// Fixed quaternion, s- and gamma-matrices of the model.
//
// Index convention: 8x8 rows/columns 0..7 are the quaternion basis
// (1, I, J, K) of the first copy followed by (1, I, J, K) of the second
// copy; 4x4 matrices use (1, I, J, K). All entries are integers, stored as
// ExactScalar so that products never need conversion.

#include <array>
#include <span>
#include <string>
#include <vector>

#include "susyqm/exact_matrix.hpp"

namespace susyqm {

using SmallMatrix = ExactMatrix;

/// Right-multiplication matrices (1^R, I^R, J^R, K^R) w.r.t. the basis (1, I, J, K).
std::array<SmallMatrix, 4> build_quaternion_right();

/// Left-multiplication matrices (I^L, J^L, K^L).
std::array<SmallMatrix, 3> build_quaternion_left();

/// s^1..s^4 = blockdiag(X^R, X^R) for X = 1, I, J, K.
std::array<SmallMatrix, 4> build_s_matrices();

struct GammaMatrices {
  std::array<SmallMatrix, 5> gamma;  // gamma^1..gamma^5
  SmallMatrix I_left;
  SmallMatrix J_left;
  SmallMatrix K_left;
};

GammaMatrices build_gamma_matrices();

struct Bivector {
  int mu = 0;  // 0-based, mu < nu
  int nu = 0;
  SmallMatrix matrix;  // (1/2)[gamma^mu, gamma^nu]
};

/// The ten gamma^{mu nu}, ordered (0,1),(0,2),...,(3,4).
std::vector<Bivector> gamma_bivectors();

/// Index of the bivector (mu, nu), mu != nu, in gamma_bivectors() order, and
/// the sign relating gamma^{mu nu} to the stored gamma^{min, max}.
int bivector_index(int mu, int nu);

/// Structure constants: [B_i, B_j] = sum_k f[i][j][k] B_k. Throws if the
/// commutator is not in the span of the bivectors.
std::vector<std::vector<std::vector<Rational>>> bivector_structure_constants();

/// Commutant {X : [X, M] = 0 for every M in the set and its transposes}; one
/// basis matrix per entry. Throws std::invalid_argument on a dimension mismatch.
std::vector<SmallMatrix> commutant_basis(std::span<const SmallMatrix> matrices);

/// Irreducibility of the representation generated by `matrices`.
///
/// Real input: the generated algebra is closed under transpose, so a proper
/// invariant subspace exists iff the commutant holds a non-scalar symmetric
/// element (its orthogonal projector). The test is therefore "symmetric part
/// of the commutant is one-dimensional"; the full commutant of a real
/// irreducible representation may be R, C or H. Complex input: the commutant
/// itself must be one-dimensional.
bool irreducibility_check(std::span<const SmallMatrix> matrices);

/// Immutable bundle of every fixed structure, built once.
struct GammaStructures {
  std::array<SmallMatrix, 4> quaternion_right;
  std::array<SmallMatrix, 3> quaternion_left;
  std::array<SmallMatrix, 4> s;
  std::array<SmallMatrix, 5> gamma;
  std::vector<Bivector> bivectors;
};

const GammaStructures& gamma_structures();

struct RelationCheck {
  std::string name;
  bool pass = false;
};

/// Every exact relation of the fixed structures, for reporting.
std::vector<RelationCheck> verify_gamma_relations();

}  // namespace susyqm
