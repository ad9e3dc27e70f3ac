#include "susyqm/potential_landscape.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "susyqm/fermion_fock.hpp"
#include "susyqm/model_operators.hpp"

namespace susyqm {

namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

OperatorPolynomial square_sum(int first, int count) {
  OperatorPolynomial r;
  for (int v = first; v < first + count; ++v)
    r += OperatorPolynomial::position(v) * OperatorPolynomial::position(v);
  return r;
}

struct SymbolicHessian {
  OperatorPolynomial v1;
  std::array<std::array<OperatorPolynomial, 9>, 9> second;
};

const SymbolicHessian& symbolic_hessian() {
  static const SymbolicHessian h = [] {
    SymbolicHessian s;
    s.v1 = potential_polynomial(PotentialVariant::V1);
    for (int a = 0; a < 9; ++a) {
      const OperatorPolynomial da = partial_derivative(s.v1, a);
      for (int b = a; b < 9; ++b) {
        s.second[a][b] = partial_derivative(da, b);
        s.second[b][a] = s.second[a][b];
      }
    }
    return s;
  }();
  return h;
}

}  // namespace

Eigen::Matrix<double, 9, 1> ConfigPoint::xi() const {
  Eigen::Matrix<double, 9, 1> v;
  for (int j = 0; j < 4; ++j) v(j) = q[j];
  for (int mu = 0; mu < 5; ++mu) v(4 + mu) = x[mu];
  return v;
}

ConfigPoint ConfigPoint::from_xi(const Eigen::Matrix<double, 9, 1>& xi) {
  ConfigPoint p;
  for (int j = 0; j < 4; ++j) p.q[j] = xi(j);
  for (int mu = 0; mu < 5; ++mu) p.x[mu] = xi(4 + mu);
  return p;
}

double eval_potential(const ConfigPoint& p, double k, PotentialVariant variant) {
  const double a = p.q[0] * p.q[0] + p.q[1] * p.q[1];
  const double b = p.q[2] * p.q[2] + p.q[3] * p.q[3];
  double nx = 0.0;
  for (double v : p.x) nx += v * v;
  const double v = nx * (a + b) + 0.25 * (a + b) * (a + b);
  switch (variant) {
    case PotentialVariant::V:
      return v;
    case PotentialVariant::V1:
      k = 1.0;
      [[fallthrough]];
    case PotentialVariant::Vk:
      return v + k * k + k * (b - a);
  }
  return v;
}

OperatorPolynomial potential_polynomial(PotentialVariant variant) {
  const auto& ops = model_operators();
  if (variant == PotentialVariant::V) return ops.gh.V;
  // The scalar part of H_k: everything except the kinetic and fermionic terms.
  static const OperatorPolynomial vk = [&] {
    const DeformedOperators d = build_complex_and_deformed();
    return d.Hk - ops.gh.kinetic - ops.gh.HF;
  }();
  if (variant == PotentialVariant::Vk) return vk;
  return vk.at_k(ExactScalar(1));
}

OperatorPolynomial v1_completed_square(bool drop_constant) {
  const OperatorPolynomial a = square_sum(q_var(0), 2);
  const OperatorPolynomial b = square_sum(q_var(2), 2);
  const OperatorPolynomial nx = square_sum(x_var(0), 5);
  OperatorPolynomial inner = Rational(1, 2) * a;
  if (!drop_constant) inner -= OperatorPolynomial(ExactScalar(1));
  const OperatorPolynomial tail =
      OperatorPolynomial(ExactScalar(1)) + Rational(1, 4) * b + Rational(1, 2) * a;
  return nx * (a + b) + inner * inner + b * tail;
}

bool verify_jps_identity(bool drop_constant) {
  return (potential_polynomial(PotentialVariant::V1) - v1_completed_square(drop_constant)).is_zero();
}

OperatorPolynomial partial_derivative(const OperatorPolynomial& f, int var) {
  for (const auto& [m, c] : f.terms())
    for (int v = 0; v < kNumBosons; ++v)
      if (m.mom[v] != 0)
        throw std::invalid_argument("partial_derivative: polynomial contains momenta");
  return ExactScalar::i() * commutator(OperatorPolynomial::momentum(var), f);
}

double evaluate_real(const OperatorPolynomial& f, const Eigen::Matrix<double, 9, 1>& xi,
                     double k) {
  double total = 0.0;
  for (const auto& [m, c] : f.terms()) {
    double term = c.coefficient(0).to_complex().real();
    for (int v = 0; v < kNumBosons; ++v) {
      if (m.mom[v] != 0) throw std::invalid_argument("evaluate_real: polynomial contains momenta");
      term *= std::pow(xi(v), m.pos[v]);
    }
    term *= std::pow(k, m.k);
    total += term;
  }
  return total;
}

Eigen::Matrix<double, 9, 9> hessian_V1(const ConfigPoint& p) {
  const auto& h = symbolic_hessian();
  const Eigen::Matrix<double, 9, 1> xi = p.xi();
  Eigen::Matrix<double, 9, 9> out;
  for (int a = 0; a < 9; ++a)
    for (int b = 0; b < 9; ++b) out(a, b) = evaluate_real(h.second[a][b], xi);
  return out;
}

Eigen::Matrix<double, 9, 9> gamma_hessian_block(const ConfigPoint& p) {
  Eigen::Matrix<double, 9, 9> h = Eigen::Matrix<double, 9, 9>::Zero();
  for (int r = 0; r < 2; ++r)
    for (int s = 0; s < 2; ++s) h(r, s) = 2.0 * p.q[r] * p.q[s];
  for (int i = 2; i < 9; ++i) h(i, i) = 4.0;
  return h;
}

ConfigPoint gamma_point(double alpha) {
  ConfigPoint p;
  p.q[0] = std::sqrt(2.0) * std::cos(alpha);
  p.q[1] = std::sqrt(2.0) * std::sin(alpha);
  return p;
}

double distance_to_gamma(const ConfigPoint& p) {
  const double r12 = std::hypot(p.q[0], p.q[1]);
  double d2 = (r12 - std::sqrt(2.0)) * (r12 - std::sqrt(2.0));
  d2 += p.q[2] * p.q[2] + p.q[3] * p.q[3];
  for (double v : p.x) d2 += v * v;
  return std::sqrt(d2);
}

ConfigPoint slice_to_config(const SlicePoint& eta) {
  ConfigPoint p;
  p.q[0] = 0.0;
  for (int j = 1; j < 4; ++j) p.q[j] = eta(j - 1);
  for (int mu = 0; mu < 5; ++mu) p.x[mu] = eta(3 + mu);
  return p;
}

double QuadraticModel::value(const SlicePoint& eta) const {
  const SlicePoint d = eta - eta0;
  return 0.5 * d.dot(hessian * d);
}

Eigen::Matrix<double, 8, 1> QuadraticModel::gradient(const SlicePoint& eta) const {
  return hessian * (eta - eta0);
}

QuadraticModel quadratic_model() {
  QuadraticModel m;
  m.eta0 = SlicePoint::Zero();
  m.eta0(0) = std::sqrt(2.0);
  const Eigen::Matrix<double, 9, 9> full = hessian_V1(slice_to_config(m.eta0));
  m.hessian = full.bottomRightCorner<8, 8>();
  return m;
}

CubicRemainderFit fit_cubic_remainder(const std::vector<double>& radii, int samples,
                                      std::uint64_t seed) {
  if (samples <= 0) throw std::invalid_argument("fit_cubic_remainder: samples must be positive");
  const QuadraticModel model = quadratic_model();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<SlicePoint> dirs(static_cast<std::size_t>(samples));
  for (auto& u : dirs) {
    for (int i = 0; i < 8; ++i) u(i) = normal(rng);
    u.normalize();
  }
  CubicRemainderFit fit;
  for (double r : radii) {
    double worst = 0.0;
    for (const auto& u : dirs) {
      const SlicePoint eta = model.eta0 + r * u;
      const double v1 = eval_potential(slice_to_config(eta), 1.0, PotentialVariant::V1);
      worst = std::max(worst, std::abs(v1 - model.value(eta)) / (r * r * r));
    }
    fit.radii.push_back(r);
    fit.constants.push_back(worst);
  }
  return fit;
}

GtSpectrum analytic_Gt_spectrum(double t, int num_levels) {
  if (!(t > 0.0)) throw std::invalid_argument("analytic_Gt_spectrum: t must be positive");
  const QuadraticModel model = quadratic_model();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 8, 8>> es(0.5 * model.hessian);
  // -d^2 + w^2 y^2 per normal mode has levels w (2n + 1).
  const Eigen::Matrix<double, 8, 1> w = es.eigenvalues().cwiseSqrt();

  GtSpectrum s;
  s.boson_zero_point = w.sum();
  // H_F(eta0) = i theta S theta has ground energy -1/2 sum |mu| and every
  // fermionic excitation costs 2 |mu| = 2 sqrt2.
  const Eigen::MatrixXd S = hf_coefficient({0.0, model.eta0(0), 0.0, 0.0}, {0, 0, 0, 0, 0});
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> fs(std::complex<double>(0, 1) * S);
  s.fermion_ground = -0.5 * fs.eigenvalues().cwiseAbs().sum();
  s.ground_energy = s.boson_zero_point + s.fermion_ground;

  // Boson quanta 2 w and fermion excitations 2 |mu| all coincide, so the
  // spectrum is ground + quantum * L with L = n_b + n_f.
  const double quantum = 2.0 * w(0);
  const Eigen::VectorXd mu = fs.eigenvalues().cwiseAbs();
  for (int i = 0; i < 8; ++i)
    if (std::abs(w(i) - w(0)) > 1e-9)
      throw std::logic_error("analytic_Gt_spectrum: normal frequencies are not degenerate");
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    if (std::abs(2.0 * mu(i) - quantum) > 1e-9)
      throw std::logic_error("analytic_Gt_spectrum: fermion gaps differ from the boson quantum");
  s.gap = quantum;
  for (int level = 0; level < num_levels; ++level) {
    GtLevel lv;
    lv.energy = s.ground_energy + quantum * level;
    for (int nf = 0; nf <= std::min(level, 8); ++nf) {
      const auto m = static_cast<long long>(binomial(level - nf + 7, 7) * binomial(8, nf));
      lv.multiplicity += m;
      (nf % 2 == 0 ? lv.even : lv.odd) += m;
    }
    s.levels.push_back(lv);
  }
  s.ground_multiplicity = s.levels.empty() ? 1 : s.levels.front().multiplicity;
  return s;
}

}  // namespace susyqm
