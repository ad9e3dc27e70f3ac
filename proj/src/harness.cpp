#include "susyqm/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "susyqm/fermion_fock.hpp"
#include "susyqm/gamma_structures.hpp"
#include "susyqm/model_operators.hpp"
#include "susyqm/potential_landscape.hpp"
#include "susyqm/spectral_engine.hpp"

#ifndef SUSYQM_VERSION
#define SUSYQM_VERSION "unknown"
#endif

namespace susyqm {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const double kSqrt2 = std::numbers::sqrt2;

// ---------------------------------------------------------------------------
// Config parsing

double get_number(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError("config field '" + key + "': expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError("config field '" + key + "': must be finite");
  return v;
}

int get_int(const json& j, const std::string& key) {
  if (!j.is_number_integer()) throw ConfigError("config field '" + key + "': expected an integer");
  return j.get<int>();
}

std::vector<double> get_number_list(const json& j, const std::string& key) {
  if (!j.is_array()) throw ConfigError("config field '" + key + "': expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(get_number(j[i], key + "[" + std::to_string(i) + "]"));
  return out;
}

void require_positive(double v, const std::string& key) {
  if (!(v > 0.0)) throw ConfigError("config field '" + key + "': must be > 0");
}

// Per-command validation of required fields and ranges.
void validate(const RunConfig& c) {
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), c.command) == names.end())
    throw ConfigError("config field 'command': unknown command '" + c.command + "'");
  if (c.count < 1) throw ConfigError("config field 'count': must be >= 1");
  if (c.block < 1) throw ConfigError("config field 'block': must be >= 1");
  require_positive(c.tol, "tol");
  if (c.max_restarts < 0) throw ConfigError("config field 'max_restarts': must be >= 0");
  if (c.points < 1) throw ConfigError("config field 'points': must be >= 1");
  if (c.workers < 1) throw ConfigError("workers: must be >= 1");
  if (c.cutoff && *c.cutoff < 0) throw ConfigError("config field 'cutoff': must be >= 0");
  if (c.plane_cutoff && *c.plane_cutoff < 0)
    throw ConfigError("config field 'plane_cutoff': must be >= 0");
  if (c.t) require_positive(*c.t, "t");
  if (c.k) require_positive(*c.k, "k");
  for (double w : c.frequencies) require_positive(w, "frequencies");
  for (std::size_t i = 1; i < c.grid.size(); ++i)
    if (!(c.grid[i] > c.grid[i - 1])) throw ConfigError("config field 'grid': must be strictly ascending");
  for (double g : c.grid) require_positive(g, "grid");

  if (c.command == "spectrum") {
    if (!c.cutoff) throw ConfigError("config field 'cutoff': required for spectrum");
    if (c.model == "quadratic") {
      if (!c.t) throw ConfigError("config field 't': required for model 'quadratic'");
      if (c.frequencies.size() > 1)
        throw ConfigError("config field 'frequencies': model 'quadratic' takes one value");
    } else if (c.model == "fiber") {
      if (!c.k) throw ConfigError("config field 'k': required for model 'fiber'");
      if (c.frequencies.size() > 1)
        throw ConfigError("config field 'frequencies': model 'fiber' takes one value");
      double n = 0.0;
      for (double v : c.x) n += v * v;
      if (!(n > 0.0)) throw ConfigError("config field 'x': must be nonzero for model 'fiber'");
    } else if (c.model == "full") {
      if (c.t.has_value() == c.k.has_value())
        throw ConfigError("config field 't'/'k': model 'full' takes exactly one of them");
      if (c.frequencies.size() != 0 && c.frequencies.size() != 1 && c.frequencies.size() != 9)
        throw ConfigError("config field 'frequencies': model 'full' takes one or nine values");
    } else {
      throw ConfigError("config field 'model': expected full, fiber or quadratic");
    }
  }
  if (c.command == "scan" && c.parameter != "t" && c.parameter != "k" && c.parameter != "x")
    throw ConfigError("config field 'parameter': expected t, k or x");
  if ((c.command == "scan" && c.parameter == "x") || c.command == "fiber-scan")
    for (double g : c.grid)
      if (g < 1.0) throw ConfigError("config field 'grid': |x| values must be >= 1");
}

// ---------------------------------------------------------------------------
// Output helpers

void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

struct CsvTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  std::string str() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << "\n";
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
      os << "\n";
    }
    return os.str();
  }
};

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}
std::string num(int v) { return std::to_string(v); }
std::string num(std::size_t v) { return std::to_string(v); }
std::string flag(bool b) { return b ? "1" : "0"; }

// Reports must not contain NaN/inf (JSON null would hide them); map to strings.
json jnum(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? json("nan") : json(v > 0 ? "inf" : "-inf");
}

json jlist(const std::vector<double>& v) {
  json a = json::array();
  for (double d : v) a.push_back(jnum(d));
  return a;
}

std::string fmt(double v, int digits = 3) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

json spectrum_json(const SpectrumReport& s) {
  json j;
  j["label"] = s.label;
  j["sector"] = s.sector;
  j["cutoff"] = s.cutoff;
  j["unit_cutoff"] = s.unit_cutoff;
  j["frequencies"] = jlist(std::vector<double>(s.frequencies.begin(), s.frequencies.end()));
  j["dim"] = s.dim;
  j["eigenvalues"] = jlist(s.eigenvalues);
  j["residuals"] = jlist(s.residuals);
  j["parities"] = jlist(s.parities);
  j["converged"] = s.converged;
  j["matvecs"] = s.matvecs;
  j["tol"] = s.tol;
  return j;
}

json pairing_json(const PairingTable& p) {
  json j;
  j["zero_threshold"] = jnum(p.zero_threshold);
  j["unpaired_even"] = jlist(p.unpaired_even);
  j["unpaired_odd"] = jlist(p.unpaired_odd);
  j["unpaired_near_zero"] = p.unpaired_near_zero();
  json pairs = json::array();
  for (const auto& q : p.pairs) pairs.push_back({{"even", q.even}, {"odd", q.odd}, {"defect", q.defect}});
  j["pairs"] = pairs;
  j["max_defect"] = jnum(p.max_defect);
  return j;
}

void spectrum_rows(CsvTable& t, const SpectrumReport& s) {
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i)
    t.add({s.sector, num(i), num(s.eigenvalues[i]), num(s.residuals[i]), num(s.parities[i])});
}

CsvTable spectrum_table(const std::string& name) {
  return {name, {"sector", "index", "eigenvalue", "residual", "parity"}, {}};
}

// ---------------------------------------------------------------------------
// Checks

struct Outcome {
  std::string name;       // file stem and check name
  json report;
  std::vector<CsvTable> tables;
  std::string status;
  std::string summary;
  double budget = 0.0;
};

std::string status_of(bool converged, bool pass) {
  if (!converged) return "not_converged";
  return pass ? "pass" : "fail";
}

EigenOptions solver(const RunConfig& c, int count, int block, double tol) {
  EigenOptions o;
  o.count = count;
  o.block = block;
  o.tol = tol;
  o.max_restarts = c.max_restarts;
  o.seed = c.seed;
  return o;
}

Outcome superalgebra_check() {
  Outcome o{"superalgebra", {}, {}, "", "", 60.0};
  const auto& m = model_operators();
  const SuperalgebraReport rep = verify_superalgebra(m.Q, m.gh.J, m.gh.H);
  json pairs = json::array();
  int nonzero = 0;
  for (const auto& p : rep.pairs) {
    pairs.push_back({{"a", p.a + 1}, {"b", p.b + 1}, {"residual_terms", p.terms}, {"leading", p.leading}});
    if (p.terms != 0) ++nonzero;
  }
  const bool pass = rep.all_zero && rep.pairs.size() == 36 && nonzero == 0;
  o.report = {{"identity", "{Q_a,Q_b} - delta_ab H - 2 gamma^mu_ab x^mu J"},
              {"pairs", pairs},
              {"nonzero", nonzero},
              {"pass", pass}};
  o.status = status_of(true, pass);
  o.summary = std::to_string(rep.pairs.size()) + " residuals, " + std::to_string(nonzero) + " nonzero";
  return o;
}

json identity_checks_json(const std::vector<IdentityCheck>& checks) {
  json a = json::array();
  for (const auto& c : checks)
    a.push_back({{"name", c.name}, {"pass", c.pass}, {"residual_terms", c.residual_terms}, {"leading", c.leading}});
  return a;
}

Outcome deformation_check() {
  Outcome o{"deformation", {}, {}, "", "", 60.0};
  const DeformationReport rep = verify_deformation();
  bool required = true;
  int found = 0;
  for (const auto& c : rep.checks)
    if (c.name == "{Dk, Dk^dagger} = Hk + 2 x1 J" || c.name == "2 Q1k^2 = {Dk, Dk^dagger}") {
      ++found;
      required &= c.pass;
    }
  const bool pass = rep.all_pass && required && found == 2;
  o.report = {{"checks", identity_checks_json(rep.checks)}, {"pass", pass}};
  o.status = status_of(true, pass);
  int failed = 0;
  for (const auto& c : rep.checks) failed += c.pass ? 0 : 1;
  o.summary = std::to_string(rep.checks.size()) + " identities, " + std::to_string(failed) + " failed";
  return o;
}

Outcome gamma_check() {
  Outcome o{"gamma-relations", {}, {}, "", "", 5.0};
  const auto checks = verify_gamma_relations();
  json a = json::array();
  int failed = 0;
  bool irreducible = false;
  for (const auto& c : checks) {
    a.push_back({{"name", c.name}, {"pass", c.pass}});
    failed += c.pass ? 0 : 1;
    if (c.name == "gamma system irreducible") irreducible = c.pass;
  }
  const bool pass = failed == 0 && irreducible;
  o.report = {{"checks", a}, {"pass", pass}};
  o.status = status_of(true, pass);
  o.summary = std::to_string(checks.size()) + " relations, " + std::to_string(failed) + " failed";
  return o;
}

Outcome spin5_check() {
  Outcome o{"spin5", {}, {}, "", "", 0.0};
  const SpinorReport rep = verify_spin5();
  o.report = {{"checks", identity_checks_json(rep.checks)}, {"pass", rep.all_pass}};
  if (rep.c) o.report["spinor_coefficient"] = jnum(rep.c->to_complex().real());
  o.status = status_of(true, rep.all_pass);
  o.summary = std::to_string(rep.checks.size()) + " identities";
  return o;
}

Outcome bilinear_check(const RunConfig& c) {
  Outcome o{"fermion-bilinear", {}, {}, "", "", 600.0};
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> g(0.0, 1.0);
  CsvTable t{"fermion-bilinear", {"trial", "energy", "trace_formula", "dense_oracle", "error"}, {}};
  double max_err = 0.0;
  double max_formula_err = 0.0;
  bool unique = true;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(16, 16);
    for (int a = 0; a < 16; ++a)
      for (int b = a + 1; b < 16; ++b) {
        s(a, b) = g(rng);
        s(b, a) = -s(a, b);
      }
    const BilinearGround bg = bilinear_ground(s);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(bilinear_dense(s), Eigen::EigenvaluesOnly);
    const double oracle = es.eigenvalues()(0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ss(s.transpose() * s, Eigen::EigenvaluesOnly);
    const double formula = -0.5 * ss.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    const double err = std::abs(bg.energy - oracle);
    max_err = std::max(max_err, err);
    max_formula_err = std::max(max_formula_err, std::abs(formula - oracle));
    unique &= bg.degeneracy == 1;
    t.add({num(trial), num(bg.energy), num(formula), num(oracle), num(err)});
  }

  const std::array<double, 4> q0{0.0, kSqrt2, 0.0, 0.0};
  const std::array<double, 5> x0{};
  const BilinearGround valley = bilinear_ground(hf_coefficient(q0, x0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ve(hf_matrix(q0, x0), Eigen::EigenvaluesOnly);
  int dense_degeneracy = 0;
  for (Eigen::Index i = 0; i < ve.eigenvalues().size(); ++i)
    if (ve.eigenvalues()(i) < ve.eigenvalues()(0) + 1e-9) ++dense_degeneracy;
  const double valley_err = std::abs(valley.energy + 8.0 * kSqrt2);
  const double valley_dense_err = std::abs(ve.eigenvalues()(0) + 8.0 * kSqrt2);

  const bool pass = max_err < 1e-9 && max_formula_err < 1e-9 && valley_err < 1e-9 &&
                    valley_dense_err < 1e-9 && valley.degeneracy == 1 && dense_degeneracy == 1;
  o.report = {{"trials", 50},
              {"max_error_vs_dense", jnum(max_err)},
              {"max_trace_formula_error", jnum(max_formula_err)},
              {"generic_nondegenerate", unique},
              {"valley",
               {{"energy", valley.energy},
                {"expected", -8.0 * kSqrt2},
                {"error", valley_err},
                {"dense_error", valley_dense_err},
                {"degeneracy", valley.degeneracy},
                {"dense_degeneracy", dense_degeneracy}}},
              {"pass", pass}};
  o.tables.push_back(std::move(t));
  o.status = status_of(true, pass);
  o.summary = "max |E - dense| " + fmt(max_err) + ", valley error " + fmt(valley_err) +
              ", degeneracy " + std::to_string(valley.degeneracy);
  return o;
}

Outcome fiber_ground_check(const RunConfig& c, double x_norm, int cutoff) {
  Outcome o{"fiber-ground-space", {}, {}, "", "", 600.0};
  const FiberGroundReport r =
      fiber_ground_space({x_norm, 0.0, 0.0, 0.0, 0.0}, cutoff, 1e-6, solver(c, 17, 18, 1e-9));
  const bool pass = std::abs(r.lowest) < 1e-6 && r.multiplicity == 16 && r.complete;
  o.report = {{"x_norm", x_norm},
              {"cutoff", cutoff},
              {"frequency", x_norm},
              {"dim", r.dim},
              {"lowest", jnum(r.lowest)},
              {"multiplicity", r.multiplicity},
              {"expected_multiplicity", 16},
              {"zero_tol", r.zero_tol},
              {"first_excited", jnum(r.first_excited)},
              {"max_residual", jnum(r.max_residual)},
              {"max_leakage", jnum(r.max_leakage)},
              {"sector_lowest", jlist(r.sector_lowest)},
              {"complete", r.complete},
              {"converged", r.converged},
              {"pass", pass}};
  o.status = status_of(r.converged, pass);
  o.summary = "lowest " + fmt(r.lowest) + ", multiplicity " + std::to_string(r.multiplicity);
  return o;
}

Outcome landscape_check() {
  Outcome o{"potential-geometry", {}, {}, "", "", 5.0};
  const bool jps = verify_jps_identity(false);
  const bool mutated = verify_jps_identity(true);

  // Exact zeros of V_1 on the circle of radius sqrt2 in the (q1,q2) plane.
  const OperatorPolynomial v1 = potential_polynomial(PotentialVariant::V1);
  bool exact_zero = true;
  bool exact_positive_off = true;
  const ExactScalar s2 = ExactScalar::sqrt2();
  const std::vector<std::array<ExactScalar, 2>> on = {
      {s2, 0}, {0, -s2}, {1, 1}, {-1, 1}, {ExactScalar(Rational(3, 5)) * s2, ExactScalar(Rational(-4, 5)) * s2}};
  for (const auto& p : on) {
    std::array<ExactScalar, kNumBosons> pos{};
    pos[0] = p[0];
    pos[1] = p[1];
    exact_zero &= v1.evaluate(pos).is_zero();
    pos[2] = ExactScalar(Rational(1, 10));  // leave Gamma along q3
    exact_positive_off &= !v1.evaluate(pos).is_zero();
  }
  double max_on = 0.0;
  double min_off = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 24; ++i) {
    const double a = 2.0 * std::numbers::pi * i / 24.0;
    max_on = std::max(max_on, std::abs(eval_potential(gamma_point(a), 1.0, PotentialVariant::V1)));
    for (double f : {0.9, 1.1}) {
      ConfigPoint p = gamma_point(a);
      for (double& v : p.q) v *= f;
      min_off = std::min(min_off, eval_potential(p, 1.0, PotentialVariant::V1));
    }
  }

  double max_block = 0.0;
  double max_eig = 0.0;
  json eigs = json::array();
  for (double a : {0.0, 0.3, 1.1, 2.5, 4.0}) {
    const ConfigPoint p = gamma_point(a);
    const auto h = hessian_V1(p);
    max_block = std::max(max_block, (h - gamma_hessian_block(p)).cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 9, 9>> es(h, Eigen::EigenvaluesOnly);
    std::vector<double> ev;
    for (int i = 0; i < 9; ++i) {
      ev.push_back(es.eigenvalues()(i));
      max_eig = std::max(max_eig, std::abs(es.eigenvalues()(i) - (i == 0 ? 0.0 : 4.0)));
    }
    eigs.push_back({{"alpha", a}, {"eigenvalues", jlist(ev)}});
  }
  const bool pass = jps && !mutated && exact_zero && exact_positive_off && max_on < 1e-12 &&
                    min_off > 0.0 && max_block < 1e-10 && max_eig < 1e-10;
  o.report = {{"jps_identity", jps},
              {"mutated_identity_detected", !mutated},
              {"exact_zero_on_gamma", exact_zero},
              {"exact_nonzero_off_gamma", exact_positive_off},
              {"max_v1_on_gamma", jnum(max_on)},
              {"min_v1_off_gamma", jnum(min_off)},
              {"max_hessian_block_error", jnum(max_block)},
              {"max_hessian_eigenvalue_error", jnum(max_eig)},
              {"expected_hessian_eigenvalues", "{0, 4 x 8}"},
              {"hessian_eigenvalues", eigs},
              {"pass", pass}};
  o.status = status_of(true, pass);
  o.summary = "identity " + std::string(jps ? "exact" : "FAILS") + ", Hessian error " + fmt(std::max(max_block, max_eig));
  return o;
}

Outcome cubic_remainder(const RunConfig& c) {
  Outcome o{"cubic-remainder", {}, {}, "pass", "", 0.0};
  const CubicRemainderFit fit = fit_cubic_remainder({0.05, 0.1, 0.2, 0.4}, 200, c.seed);
  o.report = {{"radii", jlist(fit.radii)}, {"constants", jlist(fit.constants)}};
  double mx = 0.0;
  for (double v : fit.constants) mx = std::max(mx, v);
  o.summary = "max |V_1 - V_quad|/r^3 " + fmt(mx);
  return o;
}

Outcome gt_check(const RunConfig& c, double t, int cutoff) {
  Outcome o{"quadratic-model", {}, {}, "", "", 1200.0};
  const GtNumericReport r = gt_numeric_spectrum(t, cutoff, solver(c, 4, 2, 1e-9));
  const GtSpectrum exact = analytic_Gt_spectrum(t, 4);
  const double gap_err = std::abs(r.gap_over_t - 2.0 * kSqrt2);
  const bool converged = r.even.converged && r.odd.converged;
  const bool pass = std::abs(r.ground_over_t) < 1e-5 && gap_err < 1e-3 && r.ground_multiplicity == 1 &&
                    r.pairing.unpaired_near_zero() == 1 && !r.pairing.pairs.empty() &&
                    r.pairing.max_defect < 1e-6;
  json levels = json::array();
  for (const auto& l : exact.levels)
    levels.push_back({{"energy_over_t", l.energy}, {"multiplicity", l.multiplicity}, {"even", l.even}, {"odd", l.odd}});
  o.report = {{"t", t},
              {"cutoff", cutoff},
              {"ground_over_t", jnum(r.ground_over_t)},
              {"gap_over_t", jnum(r.gap_over_t)},
              {"expected_gap_over_t", 2.0 * kSqrt2},
              {"ground_multiplicity", r.ground_multiplicity},
              {"zero_threshold", jnum(r.zero_threshold)},
              {"pairing", pairing_json(r.pairing)},
              {"even", spectrum_json(r.even)},
              {"odd", spectrum_json(r.odd)},
              {"harmonic_levels", levels},
              {"pass", pass}};
  CsvTable tab = spectrum_table("quadratic-model");
  spectrum_rows(tab, r.even);
  spectrum_rows(tab, r.odd);
  o.tables.push_back(std::move(tab));
  o.status = status_of(converged, pass);
  o.summary = "E0/t " + fmt(r.ground_over_t) + ", gap/t " + fmt(r.gap_over_t, 8) + ", pairing " +
              fmt(r.pairing.max_defect);
  return o;
}

KtBasisChoice kt_choice(const RunConfig& c) {
  KtBasisChoice k;
  if (c.cutoff) k.other_cutoff = *c.cutoff;
  if (c.plane_cutoff) k.plane_cutoff = *c.plane_cutoff;
  return k;
}

Outcome semiclassical_check(const RunConfig& c, const std::vector<double>& grid, const KtBasisChoice& choice) {
  Outcome o{"semiclassical-scan", {}, {}, "", "", 7200.0};
  const SemiclassicalReport r = semiclassical_scan(grid, choice, solver(c, 2, 2, 1e-8), c.workers);
  CsvTable t{"semiclassical-scan", {"t", "E1", "E2", "E1/t", "E2/t", "pairing_defect", "max_residual", "dim_even", "dim_odd", "converged"}, {}};
  json pts = json::array();
  for (const auto& p : r.points) {
    t.add({num(p.t), num(p.E1), num(p.E2), num(p.E1 / p.t), num(p.E2 / p.t), num(p.pairing_defect),
           num(p.max_residual), num(p.dim_even), num(p.dim_odd), flag(p.converged)});
    pts.push_back({{"t", p.t},
                   {"E1", jnum(p.E1)},
                   {"E2", jnum(p.E2)},
                   {"E1_over_t", jnum(p.E1 / p.t)},
                   {"E2_over_t", jnum(p.E2 / p.t)},
                   {"pairing_defect", jnum(p.pairing_defect)},
                   {"even", spectrum_json(p.even)},
                   {"odd", spectrum_json(p.odd)}});
  }
  const bool slope_window = r.loglog_slope >= -0.5 && r.loglog_slope <= 0.0;
  const bool pass = r.e1_strictly_decreasing && r.r_empirical > 0.0 && r.r_margin_ok;
  o.report = {{"basis",
               {{"other_cutoff", choice.other_cutoff},
                {"plane_cutoff", choice.plane_cutoff},
                {"plane_factor", choice.plane_factor},
                {"frequency", "sqrt2 t (plane: plane_factor sqrt2 t)"}}},
              {"points", pts},
              {"e1_strictly_decreasing", r.e1_strictly_decreasing},
              {"r_empirical", jnum(r.r_empirical)},
              {"max_residual", jnum(r.max_residual)},
              {"r_margin_ok", r.r_margin_ok},
              {"loglog_slope", jnum(r.loglog_slope)},
              {"loglog_slope_in_[-0.5,0]", slope_window},
              {"all_converged", r.all_converged},
              {"pass", pass}};
  o.tables.push_back(std::move(t));
  o.status = status_of(r.all_converged, pass);
  std::string e1;
  for (const auto& p : r.points) e1 += (e1.empty() ? "" : " > ") + fmt(p.E1 / p.t, 4);
  o.summary = "E1/t " + e1 + ", r " + fmt(r.r_empirical, 4) + ", slope " + fmt(r.loglog_slope);
  return o;
}

Outcome fiber_bound_check(const RunConfig& c, double k, const std::vector<double>& grid, int cutoff) {
  Outcome o{"fiber-bound", {}, {}, "", "", 1800.0};
  const FiberBoundReport r = fiber_scan(k, grid, cutoff, solver(c, 1, 1, 1e-9), c.workers);
  CsvTable t{"fiber-bound", {"x", "lowest", "residual", "scaled_deficit", "coupling_norm", "projected_min", "violation"}, {}};
  json pts = json::array();
  bool converged = true;
  for (const auto& p : r.points) {
    converged &= p.converged;
    t.add({num(p.x_norm), num(p.lowest), num(p.residual), num(p.scaled_deficit), num(p.coupling_norm),
           num(p.projected_min), flag(p.violation)});
    pts.push_back({{"x_norm", p.x_norm},
                   {"lowest", jnum(p.lowest)},
                   {"residual", jnum(p.residual)},
                   {"scaled_deficit", jnum(p.scaled_deficit)},
                   {"coupling_norm", jnum(p.coupling_norm)},
                   {"projected_min", jnum(p.projected_min)},
                   {"violation", p.violation},
                   {"converged", p.converged}});
  }
  const bool pass = r.monotone && r.no_violation;
  o.report = {{"k", k},
              {"cutoff", cutoff},
              {"frequency", "|x|"},
              {"points", pts},
              {"c_fit", jnum(r.c_fit)},
              {"c_lsq", jnum(r.c_lsq)},
              {"lsq_rms", jnum(r.lsq_rms)},
              {"monotone", r.monotone},
              {"no_violation", r.no_violation},
              {"coupling_exponent", jnum(r.coupling_exponent)},
              {"coupling_exponent_in_[-0.8,-0.3]", r.coupling_exponent >= -0.8 && r.coupling_exponent <= -0.3},
              {"projected_bound", r.projected_bound},
              {"pass", pass}};
  o.tables.push_back(std::move(t));
  o.status = status_of(converged, pass);
  std::string lows;
  for (const auto& p : r.points) lows += (lows.empty() ? "" : " < ") + fmt(p.lowest, 5);
  o.summary = "lowest " + lows + ", c_fit " + fmt(r.c_fit, 4);
  return o;
}

Outcome gauge_check(const RunConfig& c, int per_family) {
  Outcome o{"gauge-laplacian", {}, {}, "", "", 60.0};
  GaugeLaplacianOptions opt;
  opt.points_per_family = per_family;
  opt.seed = c.seed;
  const GaugeLaplacianReport r = verify_gauge_laplacian(opt);
  opt.drop_quarter = true;
  const GaugeLaplacianReport m = verify_gauge_laplacian(opt);
  CsvTable t{"gauge-laplacian", {"family", "points", "rejected", "inner", "max_discrepancy", "max_discrepancy_inner", "max_richardson", "max_gauge_defect", "mutated_max_discrepancy"}, {}};
  json fam = json::array();
  // Gated on rho >= 0.5; the inner band 0.1 <= rho < 0.5 is reported.
  double worst = 0.0;
  double worst_inner = 0.0;
  int outer = 0;
  for (std::size_t i = 0; i < r.families.size(); ++i) {
    const auto& f = r.families[i];
    worst = std::max(worst, f.max_discrepancy);
    worst_inner = std::max(worst_inner, f.max_discrepancy_inner);
    outer += f.points - f.inner;
    t.add({to_string(f.family), num(f.points), num(f.rejected), num(f.inner), num(f.max_discrepancy),
           num(f.max_discrepancy_inner), num(f.max_richardson), num(f.max_gauge_defect),
           num(m.families[i].max_discrepancy)});
    fam.push_back({{"family", to_string(f.family)},
                   {"points", f.points},
                   {"rejected_rho_below_0.1", f.rejected},
                   {"inner_rho_below_0.5", f.inner},
                   {"max_discrepancy", jnum(f.max_discrepancy)},
                   {"max_discrepancy_inner", jnum(f.max_discrepancy_inner)},
                   {"max_richardson", jnum(f.max_richardson)},
                   {"max_gauge_defect", jnum(f.max_gauge_defect)},
                   {"mutated_max_discrepancy", jnum(m.families[i].max_discrepancy)}});
  }
  const bool pass = outer >= 100 && r.families.size() >= 3 && worst < 1e-6 && m.max_discrepancy > 1e-6;
  o.report = {{"step", opt.step},
              {"families", fam},
              {"points", r.points},
              {"points_rho_at_least_0.5", outer},
              {"max_discrepancy", jnum(worst)},
              {"max_discrepancy_inner", jnum(worst_inner)},
              {"max_richardson", jnum(r.max_richardson)},
              {"max_gauge_defect", jnum(r.max_gauge_defect)},
              {"mutated_max_discrepancy", jnum(m.max_discrepancy)},
              {"pass", pass}};
  o.tables.push_back(std::move(t));
  o.status = status_of(true, pass);
  o.summary = std::to_string(outer) + " points with rho >= 0.5, max discrepancy " + fmt(worst) + ", mutation " +
              fmt(m.max_discrepancy);
  return o;
}

Outcome spherical_check(double k, const std::vector<double>& grid) {
  Outcome o{"spherical-integral", {}, {}, "", "", 1.0};
  const SphericalDecayReport r = spherical_decay_integral(k, grid);
  CsvTable t{"spherical-integral", {"x", "plus", "minus", "closed_form", "scaled", "halving_change", "collapse_defect"}, {}};
  json pts = json::array();
  double max_change = 0.0;
  for (const auto& p : r.points) {
    max_change = std::max(max_change, p.halving_change);
    t.add({num(p.x_norm), num(p.plus), num(p.minus), num(p.closed_form), num(p.scaled), num(p.halving_change),
           num(p.collapse_defect)});
    pts.push_back({{"x_norm", p.x_norm},
                   {"plus", jnum(p.plus)},
                   {"minus", jnum(p.minus)},
                   {"closed_form", jnum(p.closed_form)},
                   {"scaled", jnum(p.scaled)},
                   {"halving_change", jnum(p.halving_change)},
                   {"collapse_defect", jnum(p.collapse_defect)}});
  }
  const bool pass = r.bounded && r.quadrature_converged && max_change <= 1e-10 && r.max_oracle_error < 1e-10;
  o.report = {{"k", k},
              {"points", pts},
              {"sup_scaled", jnum(r.sup_scaled)},
              {"limit", jnum(r.limit)},
              {"bounded", r.bounded},
              {"monotone", r.monotone},
              {"quadrature_converged", r.quadrature_converged},
              {"max_halving_change", jnum(max_change)},
              {"max_oracle_error", jnum(r.max_oracle_error)},
              {"max_collapse_defect", jnum(r.max_collapse_defect)},
              {"pointwise_ordering_for_cos_nonnegative", r.pointwise_ordering},
              {"pass", pass}};
  o.tables.push_back(std::move(t));
  o.status = status_of(true, pass);
  o.summary = "sup |x|^2 I " + fmt(r.sup_scaled, 5) + " (limit " + fmt(r.limit, 5) + "), quadrature change " +
              fmt(max_change);
  return o;
}

Outcome decay_check(const RunConfig& c) {
  Outcome o{"decay", {}, {}, "", "", 0.0};
  DecayOptions d;
  if (c.k) d.k = *c.k;
  if (c.cutoff) d.x_cutoff = *c.cutoff;
  if (c.plane_cutoff) d.plane12_cutoff = *c.plane_cutoff;
  const DecayReport r = decay_diagnostic(d, solver(c, 1, 1, c.tol));
  CsvTable t{"decay", {"radius", "amplitude"}, {}};
  for (std::size_t i = 0; i < r.radii.size(); ++i) t.add({num(r.radii[i]), num(r.amplitude[i])});
  o.report = {{"k", r.k},
              {"basis",
               {{"x_cutoff", d.x_cutoff},
                {"plane12_cutoff", d.plane12_cutoff},
                {"plane34_cutoff", d.plane34_cutoff},
                {"w12", d.w12},
                {"w34", d.w34},
                {"wx", d.wx},
                {"parity", d.parity}}},
              {"dim", r.dim},
              {"energy", jnum(r.energy)},
              {"residual", jnum(r.residual)},
              {"kappa", jnum(r.kappa)},
              {"kappa_window", {0.7 * r.k, 1.3 * r.k}},
              {"fit_rms", jnum(r.fit_rms)},
              {"isotropy_ratio", jnum(r.isotropy_ratio)},
              {"zero_mode_ratio", jnum(r.zero_mode_ratio)},
              {"tail_fraction", jnum(r.tail_fraction)},
              {"window", {jnum(r.window_lo), jnum(r.window_hi)}},
              {"epsilon", d.epsilon},
              {"turning_radius", jnum(r.turning_radius)},
              {"status", r.status},
              {"reason", r.reason}};
  o.tables.push_back(std::move(t));
  o.status = r.status == "pass" ? "pass" : r.status == "fail" ? "fail" : "not_converged";
  o.summary = r.status + (r.reason.empty() ? "" : ": " + r.reason);
  return o;
}

Outcome pairing_trend_check(const RunConfig& c, double t, const std::vector<int>& cutoffs) {
  Outcome o{"pairing-trend", {}, {}, "", "", 0.0};
  const PairingTrend tr = kt_pairing_trend(t, cutoffs, kt_choice(c), solver(c, 2, 2, c.tol));
  CsvTable tab{"pairing-trend", {"other_cutoff", "pairing_defect", "lowest"}, {}};
  for (std::size_t i = 0; i < tr.cutoffs.size(); ++i)
    tab.add({num(tr.cutoffs[i]), num(tr.defects[i]), num(tr.lowest[i])});
  o.report = {{"t", t},
              {"cutoffs", tr.cutoffs},
              {"defects", jlist(tr.defects)},
              {"lowest", jlist(tr.lowest)},
              {"decreasing", tr.decreasing}};
  o.tables.push_back(std::move(tab));
  o.status = status_of(true, tr.decreasing);
  o.summary = std::string("pairing defect ") + (tr.decreasing ? "decreasing" : "not decreasing") + " in the cutoff";
  return o;
}

Outcome no_hf_check(const RunConfig& c, double t) {
  Outcome o{"no-hf-control", {}, {}, "", "", 0.0};
  KtBasisChoice ch = kt_choice(c);
  if (!c.cutoff) ch.other_cutoff = 2;
  const NoHfControl r = kt_no_hf_control(t, kt_basis_spec(t, ch), solver(c, 2, 2, c.tol));
  o.report = {{"t", t},
              {"even", spectrum_json(r.even)},
              {"odd", spectrum_json(r.odd)},
              {"pairing", pairing_json(r.pairing)},
              {"lowest_over_t", jnum(r.lowest_over_t)},
              {"threshold", jnum(r.threshold)},
              {"has_unpaired_zero", r.has_unpaired_zero}};
  // Without H_F the fermions are spectators: no unpaired state near zero is
  // the expected outcome.
  o.status = status_of(r.even.converged && r.odd.converged, !r.has_unpaired_zero);
  o.summary = "lowest/t " + fmt(r.lowest_over_t, 4) + ", unpaired near zero: " + (r.has_unpaired_zero ? "yes" : "no");
  return o;
}

// ---------------------------------------------------------------------------
// spectrum

BasisSpec full_spec_for(const RunConfig& c) {
  const int n = *c.cutoff;
  if (c.t) {
    const double w = matched_frequency_Kt(*c.t);
    if (c.frequencies.empty() && c.plane_cutoff) {
      KtBasisChoice ch;
      ch.other_cutoff = n;
      ch.plane_cutoff = *c.plane_cutoff;
      return kt_basis_spec(*c.t, ch);
    }
    BasisSpec s = full_model_spec(n, KtBasisChoice{}.plane_factor * w, w, w);
    if (c.plane_cutoff) s.unit_cutoff[0] = s.unit_cutoff[1] = *c.plane_cutoff;
    if (c.frequencies.size() == 1) s.frequencies.fill(c.frequencies[0]);
    if (c.frequencies.size() == 9) std::copy(c.frequencies.begin(), c.frequencies.end(), s.frequencies.begin());
    return s;
  }
  const DecayOptions d;
  BasisSpec s = full_model_spec(n, d.w12, d.w34, d.wx);
  if (c.plane_cutoff) s.unit_cutoff[0] = s.unit_cutoff[1] = *c.plane_cutoff;
  if (c.frequencies.size() == 1) s.frequencies.fill(c.frequencies[0]);
  if (c.frequencies.size() == 9) std::copy(c.frequencies.begin(), c.frequencies.end(), s.frequencies.begin());
  return s;
}

Outcome spectrum_run(const RunConfig& c) {
  Outcome o{"spectrum", {}, {}, "", "", 0.0};
  const EigenOptions opt = solver(c, c.count, c.block, c.tol);
  std::vector<SpectrumReport> parts;
  std::string op;
  try {
    if (c.model == "quadratic") {
      const double w = c.frequencies.empty() ? kSqrt2 * *c.t : c.frequencies[0];
      op = "G_t";
      for (int parity : {1, -1}) {
        const auto basis = std::make_shared<const SectorBasis>(slice_spec(*c.cutoff, w), SectorFilter{false, parity, {}});
        parts.push_back(lowest_eigs(assemble_Gt(*c.t, basis), opt));
      }
    } else if (c.model == "fiber") {
      const double w = c.frequencies.empty() ? matched_frequency_fiber(c.x) : c.frequencies[0];
      op = "H_{k,x}";
      const auto basis = std::make_shared<const SectorBasis>(fiber_spec(*c.cutoff, w), SectorFilter{});
      parts.push_back(lowest_eigs(assemble_fiber(*c.k, c.x, basis), opt));
    } else {
      const BasisSpec spec = full_spec_for(c);
      op = c.t ? "K_t" : "H_k";
      for (int parity : {1, -1}) {
        const auto basis = build_gauge_sector(spec, parity);
        parts.push_back(c.t ? lowest_eigs(assemble_Kt(*c.t, basis), opt)
                            : lowest_eigs(assemble_Hk(*c.k, basis), opt));
      }
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("basis: ") + e.what());
  }
  json sectors = json::array();
  CsvTable tab = spectrum_table("spectrum");
  bool converged = true;
  double max_res = 0.0;
  for (const auto& s : parts) {
    sectors.push_back(spectrum_json(s));
    spectrum_rows(tab, s);
    converged &= s.converged;
    for (double r : s.residuals) max_res = std::max(max_res, r);
  }
  o.report = {{"operator", op}, {"model", c.model}, {"sectors", sectors}};
  if (c.t) o.report["t"] = *c.t;
  if (c.k) o.report["k"] = *c.k;
  if (c.model == "fiber") o.report["x"] = c.x;
  if (parts.size() == 2) {
    const PairingTable p = susy_pairing_report(parts[0], parts[1], 10.0 * std::max(c.tol, max_res));
    o.report["pairing"] = pairing_json(p);
  }
  o.tables.push_back(std::move(tab));
  o.status = status_of(converged, true);
  o.summary = op + " lowest " + fmt(parts[0].eigenvalues[0], 6) + (converged ? "" : " (not converged)");
  return o;
}

// ---------------------------------------------------------------------------
// k scan: fiber lowest value and projected bound against k at fixed x.

Outcome k_scan(const RunConfig& c, const std::vector<double>& grid, int cutoff) {
  Outcome o{"scan-k", {}, {}, "", "", 0.0};
  double xn = 0.0;
  for (double v : c.x) xn += v * v;
  xn = std::sqrt(xn);
  if (xn < 1.0) throw ConfigError("config field 'x': |x| must be >= 1 for a k scan");
  CsvTable t{"scan-k", {"k", "lowest", "k2", "projected_min", "residual"}, {}};
  json pts = json::array();
  bool converged = true, projected = true;
  for (double k : grid) {
    const FiberBoundReport r = fiber_scan(k, {xn}, cutoff, solver(c, 1, 1, c.tol), 1);
    const FiberPoint& p = r.points[0];
    converged &= p.converged;
    projected &= r.projected_bound;
    t.add({num(k), num(p.lowest), num(k * k), num(p.projected_min), num(p.residual)});
    pts.push_back({{"k", k}, {"lowest", jnum(p.lowest)}, {"projected_min", jnum(p.projected_min)}, {"residual", jnum(p.residual)}});
  }
  o.report = {{"x_norm", xn}, {"cutoff", cutoff}, {"points", pts}, {"projected_bound", projected}};
  o.tables.push_back(std::move(t));
  o.status = status_of(converged, projected);
  o.summary = std::string("projected bound P H P >= k^2 ") + (projected ? "holds" : "violated");
  return o;
}

// ---------------------------------------------------------------------------
// Dispatch

struct Task {
  Task(std::string n, std::function<Outcome()> f, bool s = false, std::string l = "")
      : name(std::move(n)), fn(std::move(f)), skip(s), label(std::move(l)) {}
  std::string name;
  std::function<Outcome()> fn;
  bool skip = false;
  std::string label;  // reproduce-all criterion label
};

std::vector<Task> tasks_for(const RunConfig& c) {
  std::vector<Task> t;
  const auto grid_or = [&](std::vector<double> def) { return c.grid.empty() ? def : c.grid; };
  if (c.command == "verify-algebra") {
    t = {{"superalgebra", superalgebra_check},
         {"deformation", deformation_check},
         {"gamma-relations", gamma_check},
         {"spin5", spin5_check}};
  } else if (c.command == "fermion-report") {
    t = {{"fermion-bilinear", [&] { return bilinear_check(c); }}};
  } else if (c.command == "landscape") {
    t = {{"potential-geometry", landscape_check}, {"cubic-remainder", [&] { return cubic_remainder(c); }}};
  } else if (c.command == "spectrum") {
    t = {{"spectrum", [&] { return spectrum_run(c); }}};
  } else if (c.command == "scan") {
    if (c.parameter == "t") {
      const auto g = grid_or({2, 4, 8});
      t = {{"semiclassical-scan", [&, g] { return semiclassical_check(c, g, kt_choice(c)); }},
           {"pairing-trend", [&, g] { return pairing_trend_check(c, g[g.size() / 2], {1, 2, 3}); }},
           {"no-hf-control", [&, g] { return no_hf_check(c, g.front()); }}};
    } else if (c.parameter == "x") {
      t = {{"fiber-bound", [&, g = grid_or({2, 4, 8, 16})] { return fiber_bound_check(c, c.k.value_or(1.0), g, c.cutoff.value_or(8)); }}};
    } else {
      t = {{"scan-k", [&, g = grid_or({0.5, 1, 1.5, 2})] { return k_scan(c, g, c.cutoff.value_or(8)); }}};
    }
  } else if (c.command == "fiber-scan") {
    const auto g = grid_or({2, 4, 8, 16});
    t = {{"fiber-bound", [&, g] { return fiber_bound_check(c, c.k.value_or(1.0), g, c.cutoff.value_or(8)); }},
         {"fiber-ground-space", [&, g] { return fiber_ground_check(c, g.front(), c.cutoff.value_or(8)); }}};
  } else if (c.command == "decay-check") {
    t = {{"decay", [&] { return decay_check(c); }}};
  } else if (c.command == "gauge-laplacian-check") {
    t = {{"gauge-laplacian", [&] { return gauge_check(c, c.points); }}};
  } else if (c.command == "reproduce-all") {
    t = {{"superalgebra", superalgebra_check, false, "1"},
         {"deformation", deformation_check, false, "2"},
         {"gamma-relations", gamma_check, false, "3"},
         {"fermion-bilinear", [&] { return bilinear_check(c); }, false, "4"},
         {"fiber-ground-space", [&] { return fiber_ground_check(c, 2.0, 12); }, c.quick, "5"},
         {"potential-geometry", landscape_check, false, "6"},
         {"quadratic-model", [&] { return gt_check(c, 4.0, 10); }, c.quick, "7"},
         {"semiclassical-scan", [&] { return semiclassical_check(c, {2, 4, 8}, KtBasisChoice{}); }, c.quick, "8"},
         {"fiber-bound", [&] { return fiber_bound_check(c, 1.0, {2, 4, 8, 16}, 8); }, c.quick, "9"},
         {"gauge-laplacian", [&] { return gauge_check(c, 50); }, false, "10"},
         {"spherical-integral",
          [] { return spherical_check(1.0, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16}); }, false, "11"}};
  }
  return t;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {
      "verify-algebra", "fermion-report", "landscape", "spectrum", "scan",
      "fiber-scan", "decay-check", "gauge-laplacian-check", "reproduce-all"};
  return names;
}

RunConfig config_from_json(const json& j, RunConfig c) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  static const std::set<std::string> known = {
      "schema_version", "command", "model", "t", "k", "x", "cutoff", "plane_cutoff", "frequencies",
      "parameter", "grid", "count", "block", "tol", "max_restarts", "points", "seed", "out_dir", "quick"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ConfigError("config field '" + key + "': unknown field");

  if (j.contains("schema_version") && get_int(j["schema_version"], "schema_version") != kReportSchemaVersion)
    throw ConfigError("config field 'schema_version': unsupported version");
  if (j.contains("command")) {
    if (!j["command"].is_string()) throw ConfigError("config field 'command': expected a string");
    c.command = j["command"].get<std::string>();
  }
  if (j.contains("model")) {
    if (!j["model"].is_string()) throw ConfigError("config field 'model': expected a string");
    c.model = j["model"].get<std::string>();
  }
  // Optional fields accept null (as written by to_json) for "unset".
  const auto present = [&](const char* key) { return j.contains(key) && !j[key].is_null(); };
  if (j.contains("t")) c.t = present("t") ? std::optional(get_number(j["t"], "t")) : std::nullopt;
  if (j.contains("k")) c.k = present("k") ? std::optional(get_number(j["k"], "k")) : std::nullopt;
  if (j.contains("x")) {
    if (j["x"].is_number()) {
      c.x = {get_number(j["x"], "x"), 0.0, 0.0, 0.0, 0.0};
    } else {
      const auto v = get_number_list(j["x"], "x");
      if (v.size() != 5) throw ConfigError("config field 'x': expected a number or 5 numbers");
      std::copy(v.begin(), v.end(), c.x.begin());
    }
  }
  if (j.contains("cutoff")) c.cutoff = present("cutoff") ? std::optional(get_int(j["cutoff"], "cutoff")) : std::nullopt;
  if (j.contains("plane_cutoff"))
    c.plane_cutoff = present("plane_cutoff") ? std::optional(get_int(j["plane_cutoff"], "plane_cutoff")) : std::nullopt;
  if (j.contains("frequencies")) {
    const json& f = j["frequencies"];
    if (f.is_string()) {
      if (f.get<std::string>() != "auto") throw ConfigError("config field 'frequencies': expected \"auto\", a number or a list");
      c.frequencies.clear();
    } else if (f.is_number()) {
      c.frequencies = {get_number(f, "frequencies")};
    } else {
      c.frequencies = get_number_list(f, "frequencies");
    }
  }
  if (j.contains("parameter")) {
    if (!j["parameter"].is_string()) throw ConfigError("config field 'parameter': expected a string");
    c.parameter = j["parameter"].get<std::string>();
  }
  if (j.contains("grid")) c.grid = get_number_list(j["grid"], "grid");
  if (j.contains("count")) c.count = get_int(j["count"], "count");
  if (j.contains("block")) c.block = get_int(j["block"], "block");
  if (j.contains("tol")) c.tol = get_number(j["tol"], "tol");
  if (j.contains("max_restarts")) c.max_restarts = get_int(j["max_restarts"], "max_restarts");
  if (j.contains("points")) c.points = get_int(j["points"], "points");
  if (j.contains("seed")) {
    const json& sv = j["seed"];
    if (!sv.is_number_integer() || (!sv.is_number_unsigned() && sv.get<std::int64_t>() < 0))
      throw ConfigError("config field 'seed': expected a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("out_dir")) {
    if (!j["out_dir"].is_string()) throw ConfigError("config field 'out_dir': expected a string");
    c.out_dir = j["out_dir"].get<std::string>();
  }
  if (j.contains("quick")) {
    if (!j["quick"].is_boolean()) throw ConfigError("config field 'quick': expected a boolean");
    c.quick = j["quick"].get<bool>();
  }
  return c;
}

json to_json(const RunConfig& c) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["command"] = c.command;
  j["model"] = c.model;
  j["t"] = c.t ? json(*c.t) : json(nullptr);
  j["k"] = c.k ? json(*c.k) : json(nullptr);
  j["x"] = c.x;
  j["cutoff"] = c.cutoff ? json(*c.cutoff) : json(nullptr);
  j["plane_cutoff"] = c.plane_cutoff ? json(*c.plane_cutoff) : json(nullptr);
  j["frequencies"] = c.frequencies.empty() ? json("auto") : json(c.frequencies);
  j["parameter"] = c.parameter;
  j["grid"] = c.grid;
  j["count"] = c.count;
  j["block"] = c.block;
  j["tol"] = c.tol;
  j["max_restarts"] = c.max_restarts;
  j["points"] = c.points;
  j["seed"] = c.seed;
  j["out_dir"] = c.out_dir.string();
  j["quick"] = c.quick;
  j["workers"] = c.workers;
  return j;
}

int workers_from_env() {
  const char* v = std::getenv("SUSYQM_WORKERS");
  if (!v || !*v) return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1 || n > 256) throw ConfigError("SUSYQM_WORKERS: expected an integer in 1..256");
  return static_cast<int>(n);
}

json to_json(const RunManifest& m) {
  json checks = json::array();
  for (const auto& c : m.checks)
    checks.push_back({{"name", c.name},
                      {"status", c.status},
                      {"summary", c.summary},
                      {"seconds", c.seconds},
                      {"budget_seconds", c.budget_seconds}});
  return {{"schema_version", kReportSchemaVersion},
          {"version", m.version},
          {"config", m.config},
          {"seconds", m.seconds},
          {"checks", checks},
          {"artifacts", m.artifacts},
          {"exit_code", m.exit_code}};
}

int exit_code_for(const std::vector<CheckResult>& checks) {
  int code = kExitPass;
  for (const auto& c : checks) {
    if (c.status == "not_converged") code = kExitNumerics;
    if (c.status == "fail" && code == kExitPass) code = kExitInvariant;
  }
  return code;
}

RunManifest run(const RunConfig& config) {
  validate(config);
  const auto t0 = std::chrono::steady_clock::now();
  RunManifest m;
  m.config = to_json(config);
  m.version = SUSYQM_VERSION;
  fs::create_directories(config.out_dir);

  write_atomic(config.out_dir / "config.json", m.config.dump(2) + "\n");
  m.artifacts.push_back("config.json");

  const auto persist = [&](const std::string& stem, const json& body) {
    write_atomic(config.out_dir / (stem + ".json"), body.dump(2) + "\n");
    m.artifacts.push_back(stem + ".json");
  };

  json summary = json::array();
  for (const Task& task : tasks_for(config)) {
    CheckResult cr;
    cr.name = task.label.empty() ? task.name : "criterion " + task.label + ": " + task.name;
    if (task.skip) {
      cr.status = "skipped";
      cr.summary = "skipped by --quick";
      summary.push_back({{"check", cr.name}, {"status", cr.status}});
      m.checks.push_back(cr);
      continue;
    }
    const auto t1 = std::chrono::steady_clock::now();
    Outcome o = task.fn();
    cr.seconds = seconds_since(t1);
    cr.status = o.status;
    cr.summary = o.summary;
    cr.budget_seconds = task.label.empty() ? 0.0 : o.budget;
    const std::string stem = task.label.empty() ? o.name : "criterion-" + std::string(task.label.size() < 2 ? "0" : "") + task.label + "-" + o.name;
    json body = {{"schema_version", kReportSchemaVersion},
                 {"command", config.command},
                 {"check", o.name},
                 {"seed", config.seed},
                 {"status", o.status},
                 {"summary", o.summary},
                 {"result", o.report}};
    persist(stem, body);
    for (const auto& tab : o.tables) {
      const std::string file = (task.label.empty() ? tab.name : stem) + ".csv";
      write_atomic(config.out_dir / file, tab.str());
      m.artifacts.push_back(file);
    }
    summary.push_back({{"check", cr.name}, {"status", cr.status}, {"summary", cr.summary}});
    m.checks.push_back(cr);
  }
  m.exit_code = exit_code_for(m.checks);
  persist("summary", {{"schema_version", kReportSchemaVersion},
                      {"command", config.command},
                      {"checks", summary},
                      {"exit_code", m.exit_code}});
  m.seconds = seconds_since(t0);
  write_atomic(config.out_dir / "manifest.json", to_json(m).dump(2) + "\n");
  return m;
}

std::vector<fs::path> report_files(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (!e.is_regular_file() || name == "manifest.json" || name == "config.json") continue;
    if (e.path().extension() == ".json" || e.path().extension() == ".csv") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace susyqm
