#include "susyqm/model_operators.hpp"

#include <stdexcept>

#include "susyqm/fermion_fock.hpp"
#include "susyqm/gamma_structures.hpp"

namespace susyqm {

namespace {

OperatorPolynomial norm2_q() {
  OperatorPolynomial r;
  for (int j = 0; j < 4; ++j) r += q(j) * q(j);
  return r;
}

OperatorPolynomial norm2_x() {
  OperatorPolynomial r;
  for (int mu = 0; mu < 5; ++mu) r += x(mu) * x(mu);
  return r;
}

}  // namespace

OperatorPolynomial psi(int a) { return ExactClifford::generator(psi_index(a)); }
OperatorPolynomial lambda(int a) { return ExactClifford::generator(lambda_index(a)); }
OperatorPolynomial q(int j) { return OperatorPolynomial::position(q_var(j)); }
OperatorPolynomial x(int mu) { return OperatorPolynomial::position(x_var(mu)); }
OperatorPolynomial p_q(int j) { return OperatorPolynomial::momentum(q_var(j)); }
OperatorPolynomial p_x(int mu) { return OperatorPolynomial::momentum(x_var(mu)); }

DMatrix build_D_matrix() {
  const auto& s = gamma_structures().s;
  DMatrix d;
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) {
      const ExactMatrix sbar = k == 0 ? s[0] : -s[k];
      const ExactMatrix m = ExactScalar::half() * (s[j] * s[1] * sbar);
      const OperatorPolynomial qq = q(j) * q(k);
      for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b)
          if (!m(a, b).is_zero()) d[a][b] += m(a, b) * qq;
    }
  return d;
}

std::array<OperatorPolynomial, 8> build_supercharges(const SuperchargeOptions& options) {
  const auto& g = gamma_structures();
  const DMatrix d = build_D_matrix();
  std::array<OperatorPolynomial, 8> Q;
  for (int a = 0; a < 8; ++a) {
    OperatorPolynomial r;
    for (int b = 0; b < 8; ++b) {
      for (int j = 0; j < 4; ++j)
        if (!g.s[j](a, b).is_zero()) r += g.s[j](a, b) * (psi(b) * p_q(j));
      for (int mu = 0; mu < 5; ++mu)
        if (!g.gamma[mu](a, b).is_zero()) r += g.gamma[mu](a, b) * (lambda(b) * p_x(mu));
      OperatorPolynomial dterm = d[a][b] * lambda(b);
      if (options.flip_d_term_of_q1 && a == 0) dterm = -dterm;
      r += dterm;
      for (int mu = 0; mu < 5; ++mu)
        for (int j = 0; j < 4; ++j) {
          const ExactMatrix m = g.gamma[mu] * g.s[j] * g.s[1];
          if (!m(a, b).is_zero()) r += m(a, b) * (psi(b) * x(mu) * q(j));
        }
    }
    Q[a] = std::move(r);
  }
  return Q;
}

GaugeAndHamiltonian build_gauge_and_hamiltonian() {
  const auto& g = gamma_structures();
  GaugeAndHamiltonian out;
  out.J = q(0) * p_q(1) - q(1) * p_q(0) + q(2) * p_q(3) - q(3) * p_q(2) +
          OperatorPolynomial(spin_part_M_element());

  for (int j = 0; j < 4; ++j) out.kinetic += p_q(j) * p_q(j);
  for (int mu = 0; mu < 5; ++mu) out.kinetic += p_x(mu) * p_x(mu);

  const OperatorPolynomial nq = norm2_q();
  out.V = norm2_x() * nq + Rational(1, 4) * (nq * nq);

  const ExactScalar i = ExactScalar::i();
  for (int mu = 0; mu < 5; ++mu) {
    const ExactMatrix m = g.gamma[mu] * g.s[1];
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b)
        if (!m(a, b).is_zero()) out.HF += (-i * m(a, b)) * (x(mu) * psi(a) * psi(b));
  }
  for (int j = 0; j < 4; ++j) {
    const ExactMatrix m = g.s[j] * g.s[1];
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b)
        if (!m(a, b).is_zero())
          out.HF += (ExactScalar(-2) * i * m(a, b)) * (q(j) * lambda(a) * psi(b));
  }
  out.H = out.kinetic + out.V + out.HF;
  return out;
}

std::vector<OperatorPolynomial> build_spin5_generators() {
  const auto spin = spin5_fermion_elements();
  const auto& biv = gamma_structures().bivectors;
  std::vector<OperatorPolynomial> out;
  for (std::size_t n = 0; n < biv.size(); ++n) {
    const int mu = biv[n].mu;
    const int nu = biv[n].nu;
    out.push_back(x(mu) * p_x(nu) - x(nu) * p_x(mu) + OperatorPolynomial(spin[n]));
  }
  return out;
}

const ModelOperators& model_operators() {
  static const ModelOperators instance = [] {
    ModelOperators m;
    m.D = build_D_matrix();
    m.Q = build_supercharges();
    m.gh = build_gauge_and_hamiltonian();
    m.T = build_spin5_generators();
    return m;
  }();
  return instance;
}

IdentityCheck zero_check(const std::string& name, const OperatorPolynomial& residual) {
  IdentityCheck c;
  c.name = name;
  c.pass = residual.is_zero();
  c.residual_terms = residual.size();
  if (auto lead = residual.leading_term())
    c.leading = "[" + lead->second.to_string() + "] " + lead->first.to_string();
  return c;
}

SuperalgebraReport verify_superalgebra(const std::array<OperatorPolynomial, 8>& Q,
                                       const OperatorPolynomial& J, const OperatorPolynomial& H) {
  const auto& g = gamma_structures();
  SuperalgebraReport report;
  for (int a = 0; a < 8; ++a)
    for (int b = a; b < 8; ++b) {
      OperatorPolynomial r = anticommutator(Q[a], Q[b]);
      if (a == b) r -= H;
      for (int mu = 0; mu < 5; ++mu)
        if (!g.gamma[mu](a, b).is_zero()) r -= (ExactScalar(2) * g.gamma[mu](a, b)) * (x(mu) * J);
      PairResidual pr;
      pr.a = a;
      pr.b = b;
      pr.terms = r.size();
      if (auto lead = r.leading_term())
        pr.leading = "[" + lead->second.to_string() + "] " + lead->first.to_string();
      report.all_zero = report.all_zero && r.is_zero();
      report.pairs.push_back(std::move(pr));
    }
  return report;
}

DeformedOperators build_complex_and_deformed() {
  const auto& m = model_operators();
  const ExactScalar i = ExactScalar::i();
  const ExactScalar r = ExactScalar::inv_sqrt2();
  const OperatorPolynomial k = OperatorPolynomial::k_parameter();
  // (gamma^1 lambda)_1 = lambda_1 and (gamma^1 lambda)_2 = lambda_2.
  const OperatorPolynomial g1 = lambda(0);
  const OperatorPolynomial g2 = lambda(1);
  DeformedOperators d;
  d.D = r * (m.Q[0] + i * m.Q[1]);
  d.Ddag = d.D.adjoint();
  d.Dk = d.D - (i * r) * (k * (g1 + i * g2));
  d.Dkdag = d.Ddag + (i * r) * (k * (g1 - i * g2));
  d.Q1k = m.Q[0] + k * g2;
  d.Hk = m.gh.H + k * k + k * (q(2) * q(2) + q(3) * q(3)) - k * (q(0) * q(0) + q(1) * q(1));
  return d;
}

DeformedOperators deformed_at(const ExactScalar& k) {
  if (!k.is_real() || k.to_complex().real() < 0)
    throw std::invalid_argument("deformed_at: k must be real and non-negative");
  const DeformedOperators f = build_complex_and_deformed();
  return {f.D, f.Ddag, f.Dk.at_k(k), f.Dkdag.at_k(k), f.Q1k.at_k(k), f.Hk.at_k(k)};
}

std::optional<std::array<ExactScalar, 5>> express_as_xJ(const OperatorPolynomial& P) {
  const OperatorPolynomial& J = model_operators().gh.J;
  std::array<ExactScalar, 5> c;
  OperatorPolynomial rebuilt;
  for (int mu = 0; mu < 5; ++mu) {
    // x^mu q1 p2 occurs in x^mu J with coefficient 1.
    WeylMonomial mono;
    mono.pos[x_var(mu)] = 1;
    mono.pos[q_var(0)] = 1;
    mono.mom[q_var(1)] = 1;
    auto it = P.terms().find(mono);
    c[mu] = it == P.terms().end() ? ExactScalar() : it->second.coefficient(0);
    if (!c[mu].is_zero()) rebuilt += c[mu] * (x(mu) * J);
  }
  if (!(rebuilt == P)) return std::nullopt;
  return c;
}

DeformationReport verify_deformation() {
  const auto& m = model_operators();
  const DeformedOperators d = build_complex_and_deformed();
  DeformationReport rep;
  const OperatorPolynomial anti = anticommutator(d.Dk, d.Dkdag);
  rep.checks.push_back(zero_check("Dk^dagger is the adjoint of Dk", d.Dk.adjoint() - d.Dkdag));
  rep.checks.push_back(
      zero_check("Q1k = (Dk + Dk^dagger)/sqrt2", ExactScalar::inv_sqrt2() * (d.Dk + d.Dkdag) - d.Q1k));
  rep.checks.push_back(
      zero_check("{Dk, Dk^dagger} = Hk + 2 x1 J", anti - d.Hk - ExactScalar(2) * (x(0) * m.gh.J)));
  rep.checks.push_back(
      zero_check("2 Q1k^2 = {Dk, Dk^dagger}", ExactScalar(2) * (d.Q1k * d.Q1k) - anti));
  rep.checks.push_back(zero_check("Q1k is self-adjoint", d.Q1k.adjoint() - d.Q1k));
  rep.checks.push_back(zero_check("Hk is self-adjoint", d.Hk.adjoint() - d.Hk));
  rep.d_squared = express_as_xJ(d.D * d.D);
  rep.ddag_squared = express_as_xJ(d.Ddag * d.Ddag);
  rep.checks.push_back({"D^2 is a combination of x^mu J", rep.d_squared.has_value(), 0, ""});
  rep.checks.push_back(
      {"(D^dagger)^2 is a combination of x^mu J", rep.ddag_squared.has_value(), 0, ""});
  for (const auto& c : rep.checks) rep.all_pass = rep.all_pass && c.pass;
  return rep;
}

SpinorReport verify_spin5() {
  const auto& m = model_operators();
  const auto& g = gamma_structures();
  const DeformedOperators d = build_complex_and_deformed();
  SpinorReport rep;
  for (std::size_t n = 0; n < m.T.size(); ++n) {
    const std::string tag = "T" + std::to_string(g.bivectors[n].mu + 1) +
                            std::to_string(g.bivectors[n].nu + 1);
    rep.checks.push_back(zero_check("[" + tag + ", H] = 0", commutator(m.T[n], m.gh.H)));
    rep.checks.push_back(zero_check("[" + tag + ", J] = 0", commutator(m.T[n], m.gh.J)));
    rep.checks.push_back(zero_check("[" + tag + ", Hk] = 0", commutator(m.T[n], d.Hk)));
  }
  // Extract c from the first nonzero right-hand side, then check all.
  bool consistent = true;
  for (std::size_t n = 0; n < m.T.size() && consistent; ++n)
    for (int a = 0; a < 8 && consistent; ++a) {
      OperatorPolynomial rhs;
      for (int b = 0; b < 8; ++b)
        if (!g.bivectors[n].matrix(a, b).is_zero()) rhs += g.bivectors[n].matrix(a, b) * m.Q[b];
      const OperatorPolynomial lhs = commutator(m.T[n], m.Q[a]);
      if (!rep.c) {
        const auto lead = rhs.leading_term();
        if (!lead) continue;
        const CliffordMask mask = lead->second.terms().begin()->first;
        auto it = lhs.terms().find(lead->first);
        if (it == lhs.terms().end()) {
          consistent = false;
          break;
        }
        rep.c = it->second.coefficient(mask) / lead->second.coefficient(mask);
      }
      consistent = (lhs - *rep.c * rhs).is_zero();
    }
  rep.checks.push_back({"[T, Q_a] = c gamma^{mu nu}_ab Q_b with one c", consistent && rep.c, 0, ""});
  for (const auto& c : rep.checks) rep.all_pass = rep.all_pass && c.pass;
  return rep;
}

}  // namespace susyqm
