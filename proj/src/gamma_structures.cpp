#include "susyqm/gamma_structures.hpp"

#include <stdexcept>

namespace susyqm {

namespace {

// e_a e_b = sign * e_c for the quaternion units (0,1,2,3) = (1,I,J,K).
struct QuaternionProduct {
  int sign;
  int unit;
};

QuaternionProduct quaternion_product(int a, int b) {
  if (a == 0) return {1, b};
  if (b == 0) return {1, a};
  if (a == b) return {-1, 0};
  // I J = K, J K = I, K I = J and the reversed orders pick up a sign.
  const int c = 6 - a - b;
  const bool cyclic = (a == 1 && b == 2) || (a == 2 && b == 3) || (a == 3 && b == 1);
  return {cyclic ? 1 : -1, c};
}

SmallMatrix pauli_block(int which) {
  switch (which) {
    case 1: return {{0, 1}, {1, 0}};
    case 3: return {{1, 0}, {0, -1}};
    default: return {{0, -1}, {1, 0}};  // -i sigma^2
  }
}

}  // namespace

std::array<SmallMatrix, 4> build_quaternion_right() {
  SmallMatrix one = SmallMatrix::identity(4);
  SmallMatrix i_r{{0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, -1, 0}};
  SmallMatrix j_r{{0, 0, -1, 0}, {0, 0, 0, -1}, {1, 0, 0, 0}, {0, 1, 0, 0}};
  SmallMatrix k_r{{0, 0, 0, -1}, {0, 0, 1, 0}, {0, -1, 0, 0}, {1, 0, 0, 0}};
  return {one, i_r, j_r, k_r};
}

std::array<SmallMatrix, 3> build_quaternion_left() {
  const SmallMatrix zero = SmallMatrix::zero(2, 2);
  const SmallMatrix m_isigma2 = pauli_block(2);
  const SmallMatrix s1 = pauli_block(1);
  const SmallMatrix s3 = pauli_block(3);
  SmallMatrix i_l = SmallMatrix::block_diag(m_isigma2, m_isigma2);
  SmallMatrix j_l = SmallMatrix::blocks(zero, -s3, s3, zero);
  SmallMatrix k_l = SmallMatrix::blocks(zero, -s1, s1, zero);
  return {i_l, j_l, k_l};
}

std::array<SmallMatrix, 4> build_s_matrices() {
  const auto r = build_quaternion_right();
  std::array<SmallMatrix, 4> s;
  for (int i = 0; i < 4; ++i) s[i] = SmallMatrix::block_diag(r[i], r[i]);
  return s;
}

GammaMatrices build_gamma_matrices() {
  const auto [i_l, j_l, k_l] = build_quaternion_left();
  const SmallMatrix one = SmallMatrix::identity(4);
  const SmallMatrix zero = SmallMatrix::zero(4, 4);
  GammaMatrices g;
  g.gamma[0] = SmallMatrix::blocks(one, zero, zero, -one);
  g.gamma[1] = SmallMatrix::blocks(zero, one, one, zero);
  g.gamma[2] = SmallMatrix::blocks(zero, k_l, -k_l, zero);
  g.gamma[3] = SmallMatrix::blocks(zero, i_l, -i_l, zero);
  g.gamma[4] = SmallMatrix::blocks(zero, j_l, -j_l, zero);
  g.I_left = i_l;
  g.J_left = j_l;
  g.K_left = k_l;
  return g;
}

std::vector<Bivector> gamma_bivectors() {
  const auto g = build_gamma_matrices();
  std::vector<Bivector> out;
  for (int mu = 0; mu < 5; ++mu)
    for (int nu = mu + 1; nu < 5; ++nu)
      out.push_back({mu, nu, ExactScalar::half() * commutator(g.gamma[mu], g.gamma[nu])});
  return out;
}

int bivector_index(int mu, int nu) {
  if (mu == nu || mu < 0 || nu < 0 || mu > 4 || nu > 4)
    throw std::invalid_argument("bivector_index: need distinct indices in 0..4");
  const int a = std::min(mu, nu);
  const int b = std::max(mu, nu);
  // rows of the strictly upper triangle, 4 + 3 + 2 + 1
  static constexpr int start[5] = {0, 4, 7, 9, 10};
  return start[a] + (b - a - 1);
}

std::vector<std::vector<std::vector<Rational>>> bivector_structure_constants() {
  const auto& b = gamma_structures().bivectors;
  const std::size_t n = b.size();
  std::vector<std::vector<std::vector<Rational>>> f(
      n, std::vector<std::vector<Rational>>(n, std::vector<Rational>(n)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const SmallMatrix c = commutator(b[i].matrix, b[j].matrix);
      SmallMatrix rebuilt = SmallMatrix::zero(8, 8);
      for (std::size_t k = 0; k < n; ++k) {
        // Bivectors are trace-orthogonal with tr(B_k^T B_k) = 8.
        const ExactScalar coeff = (b[k].matrix.transpose() * c).trace() / ExactScalar(8);
        if (!coeff.is_real() || !coeff.sqrt2_part().is_zero())
          throw std::logic_error("bivector_structure_constants: non-rational coefficient");
        f[i][j][k] = coeff.rational_part().re();
        rebuilt += coeff * b[k].matrix;
      }
      if (!(rebuilt == c))
        throw std::logic_error("bivector_structure_constants: commutator leaves the span");
    }
  return f;
}

std::vector<SmallMatrix> commutant_basis(std::span<const SmallMatrix> matrices) {
  if (matrices.empty()) throw std::invalid_argument("commutant_basis: empty set");
  const std::size_t n = matrices.front().rows();
  std::vector<SmallMatrix> all;
  for (const auto& m : matrices) {
    if (m.rows() != n || m.cols() != n)
      throw std::invalid_argument("commutant_basis: dimension mismatch");
    all.push_back(m);
    all.push_back(m.adjoint());
  }
  // Unknown X vectorized row-major; one equation per entry of [X, M].
  SmallMatrix system(all.size() * n * n, n * n);
  std::size_t row = 0;
  for (const auto& m : all)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j, ++row)
        for (std::size_t k = 0; k < n; ++k) {
          system(row, i * n + k) += m(k, j);
          system(row, k * n + j) -= m(i, k);
        }
  const SmallMatrix ns = null_space(system);
  std::vector<SmallMatrix> basis;
  for (std::size_t c = 0; c < ns.cols(); ++c) {
    SmallMatrix x(n, n);
    for (std::size_t i = 0; i < n * n; ++i) x(i / n, i % n) = ns(i, c);
    basis.push_back(std::move(x));
  }
  return basis;
}

bool irreducibility_check(std::span<const SmallMatrix> matrices) {
  const auto basis = commutant_basis(matrices);
  bool all_real = true;
  for (const auto& m : matrices)
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (std::size_t c = 0; c < m.cols(); ++c) all_real = all_real && m(r, c).is_real();
  if (!all_real) return basis.size() == 1;

  // Symmetric elements of span(basis): coefficients a with sum_k a_k (B_k - B_k^T) = 0.
  const std::size_t n = matrices.front().rows();
  SmallMatrix system(n * n, basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const SmallMatrix anti = basis[k] - basis[k].transpose();
    for (std::size_t i = 0; i < n * n; ++i) system(i, k) = anti(i / n, i % n);
  }
  return null_space(system).cols() == 1;
}

const GammaStructures& gamma_structures() {
  static const GammaStructures instance = [] {
    GammaStructures g;
    g.quaternion_right = build_quaternion_right();
    g.quaternion_left = build_quaternion_left();
    g.s = build_s_matrices();
    g.gamma = build_gamma_matrices().gamma;
    g.bivectors = gamma_bivectors();
    return g;
  }();
  return instance;
}

std::vector<RelationCheck> verify_gamma_relations() {
  const auto& g = gamma_structures();
  std::vector<RelationCheck> out;
  const SmallMatrix id8 = SmallMatrix::identity(8);

  for (int mu = 0; mu < 5; ++mu)
    for (int nu = mu; nu < 5; ++nu) {
      const SmallMatrix expected = mu == nu ? ExactScalar(2) * id8 : SmallMatrix::zero(8, 8);
      out.push_back({"clifford {g" + std::to_string(mu + 1) + ",g" + std::to_string(nu + 1) + "}",
                     anticommutator(g.gamma[mu], g.gamma[nu]) == expected});
    }
  for (int mu = 0; mu < 5; ++mu)
    for (int j = 0; j < 4; ++j)
      out.push_back({"[g" + std::to_string(mu + 1) + ",s" + std::to_string(j + 1) + "]=0",
                     commutator(g.gamma[mu], g.s[j]).is_zero()});
  out.push_back({"s1 = identity", g.s[0] == id8});
  for (int l = 1; l < 4; ++l)
    out.push_back({"s" + std::to_string(l + 1) + " antisymmetric", g.s[l].transpose() == -g.s[l]});
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const auto p = quaternion_product(b, a);
      out.push_back({"s" + std::to_string(a + 1) + " s" + std::to_string(b + 1) + " reversed table",
                     g.s[a] * g.s[b] == ExactScalar(p.sign) * g.s[p.unit]});
    }
  for (int x = 0; x < 3; ++x)
    for (int y = 1; y < 4; ++y)
      out.push_back({"[left" + std::to_string(x + 1) + ",right" + std::to_string(y + 1) + "]=0",
                     commutator(g.quaternion_left[x], g.quaternion_right[y]).is_zero()});
  bool real = true;
  for (const auto& m : g.gamma) real = real && m.is_integer();
  out.push_back({"gammas real integer", real});
  out.push_back({"gamma system irreducible", irreducibility_check(g.gamma)});
  bool anti = true;
  for (const auto& b : g.bivectors) anti = anti && (b.matrix.transpose() == -b.matrix);
  out.push_back({"bivectors antisymmetric", anti});
  bool closes = true;
  try {
    (void)bivector_structure_constants();
  } catch (const std::logic_error&) {
    closes = false;
  }
  out.push_back({"bivectors close (so(5))", closes});
  return out;
}

}  // namespace susyqm
