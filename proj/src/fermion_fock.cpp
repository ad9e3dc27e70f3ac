#include "susyqm/fermion_fock.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "susyqm/gamma_structures.hpp"

namespace susyqm {

namespace {

// e_A |n> = i^{power} 2^{-|A|/2} |target>.
struct MonomialStep {
  std::uint8_t target;
  int i_power;
};

MonomialStep apply_monomial(CliffordMask mask, FermionLayout layout, std::uint8_t n) {
  unsigned state = n;
  int power = 0;
  // Rightmost factor acts first: highest generator index.
  for (int g = kNumMajorana - 1; g >= 0; --g) {
    if (!(mask & (1u << g))) continue;
    const int p = chain_position(layout, g);
    const int mode = p >> 1;
    if (std::popcount(state & ((1u << mode) - 1u)) & 1) power += 2;
    const bool occupied = state & (1u << mode);
    if (p & 1) power += occupied ? 3 : 1;  // Y|0> = i|1>, Y|1> = -i|0>
    state ^= (1u << mode);
  }
  return {static_cast<std::uint8_t>(state), power & 3};
}

ExactScalar exact_phase(int i_power, int degree) {
  ExactScalar v = 1;
  switch (i_power) {
    case 1: v = ExactScalar::i(); break;
    case 2: v = -1; break;
    case 3: v = -ExactScalar::i(); break;
    default: break;
  }
  if (degree & 1) v *= ExactScalar::inv_sqrt2();
  return v * ExactScalar(Rational(1, std::int64_t{1} << (degree / 2)));
}

std::complex<double> complex_phase(int i_power, int degree) {
  static const std::complex<double> powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return powers[i_power] * std::pow(0.5, 0.5 * degree);
}

const std::array<Eigen::MatrixXcd, kNumMajorana>& dense_generators(FermionLayout layout) {
  static const auto build = [](FermionLayout l) {
    std::array<Eigen::MatrixXcd, kNumMajorana> out;
    for (int g = 0; g < kNumMajorana; ++g)
      out[g] = materialize_dense(CliffordElement<std::complex<double>>::generator(g), l);
    return out;
  };
  static const std::array<Eigen::MatrixXcd, kNumMajorana> canonical = build(FermionLayout::Canonical);
  static const std::array<Eigen::MatrixXcd, kNumMajorana> charge = build(FermionLayout::Charge);
  return layout == FermionLayout::Canonical ? canonical : charge;
}

void require_antisymmetric(const ExactMatrix& s) {
  if (s.rows() != kNumMajorana || s.cols() != kNumMajorana)
    throw std::invalid_argument("bilinear: coefficient must be 16x16");
  if (!(s.transpose() == -s)) throw std::invalid_argument("bilinear: coefficient not antisymmetric");
}

void require_antisymmetric(const Eigen::MatrixXd& s) {
  if (s.rows() != kNumMajorana || s.cols() != kNumMajorana)
    throw std::invalid_argument("bilinear: coefficient must be 16x16");
  if ((s + s.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("bilinear: coefficient not antisymmetric");
}

}  // namespace

int chain_position(FermionLayout layout, int g) {
  if (g < 0 || g >= kNumMajorana) throw std::out_of_range("chain_position: generator index");
  if (layout == FermionLayout::Charge) return g;
  return g < 8 ? 2 * g : 2 * (g - 8) + 1;
}

FermionMatrix FermionMatrix::identity() {
  FermionMatrix m;
  for (std::size_t i = 0; i < kFermionDim; ++i) m.rows_[i].emplace_back(i, ExactScalar(1));
  return m;
}

ExactScalar FermionMatrix::operator()(std::size_t r, std::size_t c) const {
  for (const auto& [col, v] : rows_[r])
    if (col == c) return v;
  return {};
}

void FermionMatrix::add(std::size_t r, std::size_t c, const ExactScalar& v) {
  if (v.is_zero()) return;
  auto& row = rows_[r];
  auto it = std::lower_bound(row.begin(), row.end(), c,
                             [](const Entry& e, std::size_t col) { return e.first < col; });
  if (it != row.end() && it->first == c) {
    it->second += v;
    if (it->second.is_zero()) row.erase(it);
  } else {
    row.insert(it, {static_cast<std::uint16_t>(c), v});
  }
}

FermionMatrix FermionMatrix::adjoint() const {
  FermionMatrix m;
  for (std::size_t r = 0; r < kFermionDim; ++r)
    for (const auto& [c, v] : rows_[r]) m.add(c, r, v.conj());
  return m;
}

ExactScalar FermionMatrix::trace() const {
  ExactScalar t;
  for (std::size_t r = 0; r < kFermionDim; ++r) t += (*this)(r, r);
  return t;
}

bool FermionMatrix::is_zero() const {
  return std::all_of(rows_.begin(), rows_.end(), [](const auto& r) { return r.empty(); });
}

std::size_t FermionMatrix::nonzeros() const {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.size();
  return n;
}

FermionMatrix FermionMatrix::operator-() const {
  FermionMatrix m = *this;
  for (auto& row : m.rows_)
    for (auto& e : row) e.second = -e.second;
  return m;
}

FermionMatrix& FermionMatrix::operator+=(const FermionMatrix& o) {
  for (std::size_t r = 0; r < kFermionDim; ++r)
    for (const auto& [c, v] : o.rows_[r]) add(r, c, v);
  return *this;
}

FermionMatrix& FermionMatrix::operator-=(const FermionMatrix& o) {
  for (std::size_t r = 0; r < kFermionDim; ++r)
    for (const auto& [c, v] : o.rows_[r]) add(r, c, -v);
  return *this;
}

FermionMatrix& FermionMatrix::operator*=(const ExactScalar& s) {
  if (s.is_zero()) {
    for (auto& row : rows_) row.clear();
    return *this;
  }
  for (auto& row : rows_)
    for (auto& e : row) e.second *= s;
  return *this;
}

FermionMatrix operator*(const FermionMatrix& a, const FermionMatrix& b) {
  FermionMatrix m;
  for (std::size_t r = 0; r < kFermionDim; ++r) {
    std::map<std::uint16_t, ExactScalar> acc;
    for (const auto& [k, v] : a.rows_[r])
      for (const auto& [c, w] : b.rows_[k]) acc[c] += v * w;
    for (const auto& [c, v] : acc)
      if (!v.is_zero()) m.rows_[r].emplace_back(c, v);
  }
  return m;
}

Eigen::MatrixXcd FermionMatrix::to_dense() const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(kFermionDim, kFermionDim);
  for (std::size_t r = 0; r < kFermionDim; ++r)
    for (const auto& [c, v] : rows_[r]) m(r, c) = v.to_complex();
  return m;
}

FermionMatrix commutator(const FermionMatrix& a, const FermionMatrix& b) { return a * b - b * a; }
FermionMatrix anticommutator(const FermionMatrix& a, const FermionMatrix& b) {
  return a * b + b * a;
}

MonomialAction monomial_action(CliffordMask mask, FermionLayout layout) {
  MonomialAction act;
  const int degree = std::popcount(static_cast<unsigned>(mask));
  for (int n = 0; n < kFermionDim; ++n) {
    const auto step = apply_monomial(mask, layout, static_cast<std::uint8_t>(n));
    if (n == 0) act.flip = step.target;
    act.phase[n] = complex_phase(step.i_power, degree);
  }
  return act;
}

FermionMatrix materialize(const ExactClifford& element, FermionLayout layout) {
  FermionMatrix m;
  for (const auto& [mask, coeff] : element.terms()) {
    const int degree = std::popcount(static_cast<unsigned>(mask));
    for (int n = 0; n < kFermionDim; ++n) {
      const auto step = apply_monomial(mask, layout, static_cast<std::uint8_t>(n));
      m.add(step.target, n, coeff * exact_phase(step.i_power, degree));
    }
  }
  return m;
}

Eigen::MatrixXcd materialize_dense(const CliffordElement<std::complex<double>>& element,
                                   FermionLayout layout) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(kFermionDim, kFermionDim);
  for (const auto& [mask, coeff] : element.terms()) {
    const int degree = std::popcount(static_cast<unsigned>(mask));
    for (int n = 0; n < kFermionDim; ++n) {
      const auto step = apply_monomial(mask, layout, static_cast<std::uint8_t>(n));
      m(step.target, n) += coeff * complex_phase(step.i_power, degree);
    }
  }
  return m;
}

std::array<FermionMatrix, kNumMajorana> build_majorana_generators(FermionLayout layout) {
  std::array<FermionMatrix, kNumMajorana> out;
  for (int g = 0; g < kNumMajorana; ++g) out[g] = materialize(ExactClifford::generator(g), layout);
  return out;
}

ExactClifford fermion_parity_element() {
  ExactClifford p(ExactScalar(256));
  for (int a = 0; a < 8; ++a) p = p * ExactClifford::generator(lambda_index(a));
  for (int a = 0; a < 8; ++a) p = p * ExactClifford::generator(psi_index(a));
  return p;
}

FermionMatrix fermion_parity(FermionLayout layout) {
  return materialize(fermion_parity_element(), layout);
}

ExactClifford bilinear_element(const ExactMatrix& s) {
  require_antisymmetric(s);
  ExactClifford out;
  const ExactScalar two_i = ExactScalar(2) * ExactScalar::i();
  for (int a = 0; a < kNumMajorana; ++a)
    for (int b = a + 1; b < kNumMajorana; ++b)
      out.add_term(static_cast<CliffordMask>((1u << a) | (1u << b)), two_i * s(a, b));
  return out;
}

FermionMatrix bilinear(const ExactMatrix& s, FermionLayout layout) {
  return materialize(bilinear_element(s), layout);
}

Eigen::MatrixXcd bilinear_dense(const Eigen::MatrixXd& s, FermionLayout layout) {
  require_antisymmetric(s);
  CliffordElement<std::complex<double>> e;
  for (int a = 0; a < kNumMajorana; ++a)
    for (int b = a + 1; b < kNumMajorana; ++b)
      e.add_term(static_cast<CliffordMask>((1u << a) | (1u << b)),
                 std::complex<double>(0.0, s(a, b) - s(b, a)));
  return materialize_dense(e, layout);
}

BilinearGround bilinear_ground(const Eigen::MatrixXd& s, FermionLayout layout) {
  require_antisymmetric(s);
  const Eigen::MatrixXcd is = std::complex<double>(0, 1) * s.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(is);
  const Eigen::VectorXd mu = eig.eigenvalues();
  const double scale = std::max(1.0, mu.cwiseAbs().maxCoeff());
  const double zero_tol = 1e-10 * scale;

  const auto& theta = dense_generators(layout);
  Eigen::MatrixXcd number = Eigen::MatrixXcd::Zero(kFermionDim, kFermionDim);
  int zero_modes = 0;
  double energy = 0.0;
  for (int k = 0; k < kNumMajorana; ++k) {
    if (std::abs(mu(k)) <= zero_tol) {
      ++zero_modes;
      continue;
    }
    energy -= 0.5 * std::abs(mu(k));
    if (mu(k) < 0) continue;
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(kFermionDim, kFermionDim);
    for (int a = 0; a < kNumMajorana; ++a) c += std::conj(eig.eigenvectors()(a, k)) * theta[a];
    number += c.adjoint() * c;
  }
  if (zero_modes % 2 != 0) throw std::logic_error("bilinear_ground: odd kernel dimension");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> neig(number);
  std::vector<int> null_cols;
  for (int i = 0; i < kFermionDim; ++i)
    if (neig.eigenvalues()(i) < 1e-8) null_cols.push_back(i);
  const int expected = 1 << (zero_modes / 2);
  if (static_cast<int>(null_cols.size()) != expected)
    throw std::logic_error("bilinear_ground: annihilator null space has unexpected dimension");
  Eigen::MatrixXcd null(kFermionDim, expected);
  for (int j = 0; j < expected; ++j) null.col(j) = neig.eigenvectors().col(null_cols[j]);

  // Lexicographic Gram-Schmidt: project e_0, e_1, ... and keep new directions.
  BilinearGround out;
  out.energy = energy;
  out.degeneracy = expected;
  out.basis.resize(kFermionDim, expected);
  int found = 0;
  for (int n = 0; n < kFermionDim && found < expected; ++n) {
    Eigen::VectorXcd w = null * null.row(n).adjoint();
    for (int j = 0; j < found; ++j) w -= out.basis.col(j) * out.basis.col(j).dot(w);
    for (int j = 0; j < found; ++j) w -= out.basis.col(j) * out.basis.col(j).dot(w);
    const double norm = w.norm();
    if (norm < 1e-6) continue;
    out.basis.col(found++) = w / norm;
  }
  if (found != expected) throw std::logic_error("bilinear_ground: Gram-Schmidt lost rank");
  return out;
}

Eigen::MatrixXd hf_coefficient(const std::array<double, 4>& q, const std::array<double, 5>& x) {
  const auto& g = gamma_structures();
  const Eigen::MatrixXd s2 = g.s[1].to_real();
  Eigen::MatrixXd psi_block = Eigen::MatrixXd::Zero(8, 8);
  for (int mu = 0; mu < 5; ++mu) psi_block -= x[mu] * g.gamma[mu].to_real() * s2;
  Eigen::MatrixXd mixed = Eigen::MatrixXd::Zero(8, 8);
  for (int j = 0; j < 4; ++j) mixed -= q[j] * g.s[j].to_real() * s2;
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(kNumMajorana, kNumMajorana);
  s.block(0, 0, 8, 8) = psi_block;
  s.block(8, 0, 8, 8) = mixed;
  s.block(0, 8, 8, 8) = -mixed.transpose();
  return s;
}

Eigen::MatrixXcd hf_matrix(const std::array<double, 4>& q, const std::array<double, 5>& x,
                           FermionLayout layout) {
  return bilinear_dense(hf_coefficient(q, x), layout);
}

Eigen::MatrixXcd ground_space_Wx(const std::array<double, 5>& x, FermionLayout layout) {
  double norm2 = 0;
  for (double v : x) norm2 += v * v;
  if (norm2 == 0.0) throw std::invalid_argument("ground_space_Wx: x must be nonzero");
  const auto g = bilinear_ground(hf_coefficient({0, 0, 0, 0}, x), layout);
  return g.basis;
}

ExactClifford spin_part_M_element() {
  ExactMatrix s(kNumMajorana, kNumMajorana);
  const auto& s2 = gamma_structures().s[1];
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) s(a, b) = ExactScalar(Rational(-1, 2)) * s2(a, b);
  return bilinear_element(s);
}

FermionMatrix spin_part_M(FermionLayout layout) {
  return materialize(spin_part_M_element(), layout);
}

std::vector<ExactClifford> spin5_fermion_elements() {
  std::vector<ExactClifford> out;
  for (const auto& b : gamma_structures().bivectors) {
    ExactMatrix s(kNumMajorana, kNumMajorana);
    for (int a = 0; a < 8; ++a)
      for (int c = 0; c < 8; ++c) {
        const ExactScalar v = ExactScalar(Rational(-1, 4)) * b.matrix(a, c);
        s(a, c) = v;
        s(8 + a, 8 + c) = v;
      }
    out.push_back(bilinear_element(s));
  }
  return out;
}

std::vector<FermionMatrix> spin5_fermion_generators(FermionLayout layout) {
  std::vector<FermionMatrix> out;
  for (const auto& e : spin5_fermion_elements()) out.push_back(materialize(e, layout));
  return out;
}

}  // namespace susyqm
