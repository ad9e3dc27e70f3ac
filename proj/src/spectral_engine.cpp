#include "susyqm/spectral_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

#include "susyqm/fermion_fock.hpp"

namespace susyqm {

namespace {

// Runs fn(i) for i in [0, n) on up to `workers` threads; results are written
// by index so the order of completion does not matter.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t w = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), 1, n);
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < w; ++k)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<double> distinct_levels(std::vector<double> v, double tol) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double e : v)
    if (out.empty() || e - out.back() > tol * std::max(1.0, std::abs(e))) out.push_back(e);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Spectra

std::string sector_label(const SectorBasis& basis) {
  std::string s;
  const SectorFilter& f = basis.filter();
  if (f.gauge) s += "J=0";
  if (f.parity) s += std::string(s.empty() ? "" : ", ") + "(-1)^F=" + (*f.parity > 0 ? "+1" : "-1");
  if (f.quanta) s += std::string(s.empty() ? "" : ", ") + "quanta=" + std::to_string(*f.quanta);
  return s.empty() ? "all" : s;
}

double parity_expectation(const SectorBasis& basis, const Eigen::VectorXcd& v) {
  double num = 0.0, den = 0.0;
  for (std::size_t b = 0; b < basis.boson_dim(); ++b) {
    const auto& fs = basis.fermions(b);
    const std::size_t off = basis.offset(b);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const double w = std::norm(v(static_cast<Eigen::Index>(off + i)));
      num += w * basis.fermion_parity_of(fs[i]);
      den += w;
    }
  }
  return den > 0.0 ? num / den : 0.0;
}

SpectrumReport lowest_eigs(const SparseOperator& op, const EigenOptions& options) {
  if (!op.symmetric()) throw std::invalid_argument("lowest_eigs: operator is not symmetric");
  if (options.count < 1) throw std::invalid_argument("lowest_eigs: count must be >= 1");
  const SectorBasis& basis = op.in();
  const LinearMap map = [&op](const cd* x, cd* y) { op.apply(x, y); };
  EigenOptions opt = options;
  opt.want_vectors = true;
  const EigenResult r = block_lanczos(map, basis.dim(), opt);

  SpectrumReport rep;
  rep.label = op.label();
  rep.cutoff = basis.spec().cutoff;
  rep.unit_cutoff = basis.spec().unit_cutoff;
  rep.frequencies = basis.spec().frequencies;
  rep.dim = basis.dim();
  rep.sector = sector_label(basis);
  rep.eigenvalues = r.values;
  rep.residuals = r.residuals;
  rep.matvecs = r.matvecs;
  rep.tol = options.tol;
  bool ok = r.converged;
  for (double res : r.residuals) ok &= res <= options.tol;
  rep.converged = ok;
  for (Eigen::Index i = 0; i < r.vectors.cols(); ++i)
    rep.parities.push_back(parity_expectation(basis, r.vectors.col(i)));
  if (options.want_vectors) rep.vectors = r.vectors;
  return rep;
}

PairingTable susy_pairing_report(const SpectrumReport& even, const SpectrumReport& odd,
                                 double zero_threshold, double cluster_tol) {
  PairingTable t;
  t.zero_threshold = zero_threshold;
  std::vector<double> e, o;
  for (double v : even.eigenvalues) (std::abs(v) < zero_threshold ? t.unpaired_even : e).push_back(v);
  for (double v : odd.eigenvalues) (std::abs(v) < zero_threshold ? t.unpaired_odd : o).push_back(v);
  e = distinct_levels(e, cluster_tol);
  o = distinct_levels(o, cluster_tol);
  const std::size_t n = std::min(e.size(), o.size());
  for (std::size_t i = 0; i < n; ++i) {
    t.pairs.push_back({e[i], o[i], std::abs(e[i] - o[i])});
    t.max_defect = std::max(t.max_defect, std::abs(e[i] - o[i]));
  }
  return t;
}

// ---------------------------------------------------------------------------
// K_t

BasisSpec kt_basis_spec(double t, const KtBasisChoice& choice) {
  if (!(t > 0.0)) throw std::invalid_argument("kt_basis_spec: t must be positive");
  const double w = matched_frequency_Kt(t);
  BasisSpec s = full_model_spec(choice.other_cutoff, choice.plane_factor * w, w, w);
  s.unit_cutoff[q_var(0)] = s.unit_cutoff[q_var(1)] = choice.plane_cutoff;
  return s;
}

SpectrumReport kt_sector_spectrum(double t, const BasisSpec& spec, int parity,
                                  const EigenOptions& options, bool with_hf) {
  const auto basis = build_gauge_sector(spec, parity);
  const SparseOperator op = with_hf ? assemble_Kt(t, basis) : assemble_Kt_without_hf(t, basis);
  return lowest_eigs(op, options);
}

SemiclassicalReport semiclassical_scan(const std::vector<double>& t_grid,
                                       const KtBasisChoice& choice, const EigenOptions& options,
                                       int workers) {
  if (t_grid.empty()) throw std::invalid_argument("semiclassical_scan: empty grid");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]))
      throw std::invalid_argument("semiclassical_scan: grid must be ascending");
  if (options.count < 2) throw std::invalid_argument("semiclassical_scan: needs count >= 2");

  SemiclassicalReport rep;
  rep.points.resize(t_grid.size());
  // One job per (t, parity).
  std::vector<SpectrumReport> spectra(2 * t_grid.size());
  EigenOptions opt = options;
  opt.want_vectors = false;
  parallel_for(spectra.size(), workers, [&](std::size_t j) {
    const double t = t_grid[j / 2];
    spectra[j] = kt_sector_spectrum(t, kt_basis_spec(t, choice), j % 2 == 0 ? 1 : -1, opt);
  });

  rep.all_converged = true;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    ScanPoint& p = rep.points[i];
    p.t = t_grid[i];
    p.even = std::move(spectra[2 * i]);
    p.odd = std::move(spectra[2 * i + 1]);
    p.dim_even = p.even.dim;
    p.dim_odd = p.odd.dim;
    std::vector<double> all = p.even.eigenvalues;
    all.insert(all.end(), p.odd.eigenvalues.begin(), p.odd.eigenvalues.end());
    std::sort(all.begin(), all.end());
    p.E1 = all[0];
    p.E2 = all[1];
    const SpectrumReport& lo = p.even.eigenvalues[0] <= p.odd.eigenvalues[0] ? p.even : p.odd;
    const SpectrumReport& hi = &lo == &p.even ? p.odd : p.even;
    p.pairing_defect = std::abs(lo.eigenvalues[1] - hi.eigenvalues[0]);
    for (double r : p.even.residuals) p.max_residual = std::max(p.max_residual, r);
    for (double r : p.odd.residuals) p.max_residual = std::max(p.max_residual, r);
    p.converged = p.even.converged && p.odd.converged;
    rep.all_converged &= p.converged;
    rep.max_residual = std::max(rep.max_residual, p.max_residual);
  }
  rep.e1_strictly_decreasing = true;
  for (std::size_t i = 1; i < rep.points.size(); ++i)
    rep.e1_strictly_decreasing &=
        rep.points[i].E1 / rep.points[i].t < rep.points[i - 1].E1 / rep.points[i - 1].t;
  rep.r_empirical = rep.points[0].E2 / rep.points[0].t;
  for (const auto& p : rep.points) rep.r_empirical = std::min(rep.r_empirical, p.E2 / p.t);
  rep.r_margin_ok = rep.r_empirical > 10.0 * rep.max_residual && rep.r_empirical > 0.0;
  std::vector<double> lx, ly;
  bool positive = true;
  for (const auto& p : rep.points) {
    positive &= p.E1 > 0.0;
    lx.push_back(std::log(p.t));
    ly.push_back(std::log(std::max(p.E1, 1e-300) / p.t));
  }
  rep.loglog_slope = positive && lx.size() >= 2 ? lsq_slope(lx, ly) : std::nan("");
  return rep;
}

PairingTrend kt_pairing_trend(double t, const std::vector<int>& other_cutoffs,
                              const KtBasisChoice& choice, const EigenOptions& options) {
  PairingTrend tr;
  EigenOptions opt = options;
  opt.want_vectors = false;
  opt.count = std::max(opt.count, 2);
  for (int n : other_cutoffs) {
    KtBasisChoice c = choice;
    c.other_cutoff = n;
    const BasisSpec spec = kt_basis_spec(t, c);
    const SpectrumReport e = kt_sector_spectrum(t, spec, 1, opt);
    const SpectrumReport o = kt_sector_spectrum(t, spec, -1, opt);
    const SpectrumReport& lo = e.eigenvalues[0] <= o.eigenvalues[0] ? e : o;
    const SpectrumReport& hi = &lo == &e ? o : e;
    tr.cutoffs.push_back(n);
    tr.defects.push_back(std::abs(lo.eigenvalues[1] - hi.eigenvalues[0]));
    tr.lowest.push_back(lo.eigenvalues[0]);
  }
  tr.decreasing = true;
  for (std::size_t i = 1; i < tr.defects.size(); ++i) tr.decreasing &= tr.defects[i] < tr.defects[i - 1];
  return tr;
}

NoHfControl kt_no_hf_control(double t, const BasisSpec& spec, const EigenOptions& options) {
  NoHfControl c;
  EigenOptions opt = options;
  opt.want_vectors = false;
  c.even = kt_sector_spectrum(t, spec, 1, opt, false);
  c.odd = kt_sector_spectrum(t, spec, -1, opt, false);
  double res = options.tol;
  for (double r : c.even.residuals) res = std::max(res, r);
  for (double r : c.odd.residuals) res = std::max(res, r);
  c.threshold = 10.0 * res;
  c.pairing = susy_pairing_report(c.even, c.odd, c.threshold);
  c.lowest_over_t = std::min(c.even.eigenvalues[0], c.odd.eigenvalues[0]) / t;
  c.has_unpaired_zero = c.pairing.unpaired_near_zero() > 0;
  return c;
}

// ---------------------------------------------------------------------------
// G_t

GtNumericReport gt_numeric_spectrum(double t, int cutoff, const EigenOptions& options) {
  GtNumericReport rep;
  rep.t = t;
  rep.cutoff = cutoff;
  const BasisSpec spec = slice_spec(cutoff, std::numbers::sqrt2 * t);
  EigenOptions opt = options;
  opt.want_vectors = false;
  for (int par : {1, -1}) {
    SectorFilter f;
    f.parity = par;
    const auto basis = std::make_shared<const SectorBasis>(spec, f);
    SpectrumReport s = lowest_eigs(assemble_Gt(t, basis), opt);
    (par > 0 ? rep.even : rep.odd) = std::move(s);
  }
  double res = options.tol;
  for (double r : rep.even.residuals) res = std::max(res, r);
  for (double r : rep.odd.residuals) res = std::max(res, r);
  rep.zero_threshold = 10.0 * res;
  rep.pairing = susy_pairing_report(rep.even, rep.odd, rep.zero_threshold);
  std::vector<double> all = rep.even.eigenvalues;
  all.insert(all.end(), rep.odd.eigenvalues.begin(), rep.odd.eigenvalues.end());
  std::sort(all.begin(), all.end());
  rep.ground_over_t = all[0] / t;
  rep.ground_multiplicity = rep.pairing.unpaired_near_zero();
  for (double e : all)
    if (std::abs(e) >= rep.zero_threshold) {
      rep.gap_over_t = (e - all[0]) / t;
      break;
    }
  return rep;
}

// ---------------------------------------------------------------------------
// Fibers

FiberGroundReport fiber_ground_space(const std::array<double, 5>& x, int cutoff, double zero_tol,
                                     const EigenOptions& options) {
  FiberGroundReport rep;
  const double w = matched_frequency_fiber(x);
  rep.x_norm = w;
  rep.cutoff = cutoff;
  rep.zero_tol = zero_tol;
  rep.first_excited = std::numeric_limits<double>::infinity();
  rep.lowest = std::numeric_limits<double>::infinity();
  const BasisSpec spec = fiber_spec(cutoff, w);
  const auto full = std::make_shared<const SectorBasis>(spec, SectorFilter{});
  rep.dim = full->dim();
  rep.converged = true;
  rep.complete = true;
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> g;
  EigenOptions opt = options;
  opt.want_vectors = true;
  for (int L = 0; L <= cutoff; ++L) {
    SectorFilter f;
    f.quanta = L;
    const auto sector = std::make_shared<const SectorBasis>(spec, f);
    const SparseOperator h = assemble_fiber(1.0, x, sector, true);
    const SpectrumReport s = lowest_eigs(h, opt);
    rep.converged &= s.converged;
    for (double r : s.residuals) rep.max_residual = std::max(rep.max_residual, r);
    rep.sector_lowest.push_back(s.eigenvalues.front());
    rep.lowest = std::min(rep.lowest, s.eigenvalues.front());
    for (double e : s.eigenvalues) {
      if (e < zero_tol)
        ++rep.multiplicity;
      else
        rep.first_excited = std::min(rep.first_excited, e);
    }
    rep.complete &= s.eigenvalues.back() >= zero_tol || s.eigenvalues.size() == sector->dim();
    // Leakage out of the sector: eigenvectors and one random vector.
    const SparseOperator to_full = assemble_fiber(1.0, x, sector, true, full);
    Eigen::VectorXcd v(static_cast<Eigen::Index>(sector->dim()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cd(g(rng), g(rng));
    v.normalize();
    rep.max_leakage = std::max(rep.max_leakage, sector_leakage(to_full, *sector, v));
    for (Eigen::Index c = 0; c < s.vectors.cols(); ++c)
      rep.max_leakage = std::max(rep.max_leakage, sector_leakage(to_full, *sector, s.vectors.col(c)));
  }
  return rep;
}

namespace {

// Ran P_x: ground space of H^0_x in the zero-quanta sector, embedded in `full`.
Eigen::MatrixXcd fiber_ground_projector_basis(const std::array<double, 5>& x, const SectorBasis& full) {
  SectorFilter f;
  f.quanta = 0;
  const auto vac = std::make_shared<const SectorBasis>(full.spec(), f);
  const SparseOperator h0 = assemble_fiber(1.0, x, vac, true);
  const LinearMap map = [&h0](const cd* a, cd* b) { h0.apply(a, b); };
  const EigenResult d = dense_eigs(map, vac->dim(), static_cast<int>(vac->dim()));
  std::vector<Eigen::Index> cols;
  for (std::size_t i = 0; i < d.values.size(); ++i)
    if (std::abs(d.values[i]) < 1e-8) cols.push_back(static_cast<Eigen::Index>(i));
  Eigen::MatrixXcd phi(static_cast<Eigen::Index>(full.dim()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c)
    phi.col(static_cast<Eigen::Index>(c)) = embed(*vac, full, d.vectors.col(cols[c]));
  return phi;
}

}  // namespace

FiberBoundReport fiber_scan(double k, const std::vector<double>& x_grid, int cutoff,
                            const EigenOptions& options, int workers) {
  for (double xn : x_grid)
    if (!(xn >= 1.0)) throw std::invalid_argument("fiber_scan: |x| must be >= 1");
  for (std::size_t i = 1; i < x_grid.size(); ++i)
    if (!(x_grid[i] > x_grid[i - 1])) throw std::invalid_argument("fiber_scan: grid must be ascending");
  FiberBoundReport rep;
  rep.k = k;
  rep.cutoff = cutoff;
  rep.points.resize(x_grid.size());
  EigenOptions opt = options;
  opt.count = 1;
  opt.want_vectors = false;
  parallel_for(x_grid.size(), workers, [&](std::size_t i) {
    FiberPoint& p = rep.points[i];
    p.x_norm = x_grid[i];
    const std::array<double, 5> x{x_grid[i], 0.0, 0.0, 0.0, 0.0};
    const auto basis = std::make_shared<const SectorBasis>(fiber_spec(cutoff, x_grid[i]), SectorFilter{});
    const SparseOperator h = assemble_fiber(k, x, basis);
    const SpectrumReport s = lowest_eigs(h, opt);
    p.lowest = s.eigenvalues[0];
    p.residual = s.residuals[0];
    p.converged = s.converged;
    p.scaled_deficit = (k * k - p.lowest) * x_grid[i] * x_grid[i];

    const Eigen::MatrixXcd phi = fiber_ground_projector_basis(x, *basis);
    Eigen::MatrixXcd hphi(phi.rows(), phi.cols());
    for (Eigen::Index c = 0; c < phi.cols(); ++c) hphi.col(c) = h.apply(Eigen::VectorXcd(phi.col(c)));
    const Eigen::MatrixXcd g = phi.adjoint() * hphi;
    const Eigen::MatrixXcd perp = hphi - phi * g;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ge(0.5 * (g + g.adjoint()));
    p.projected_min = ge.eigenvalues()(0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> pe(perp.adjoint() * perp);
    p.coupling_norm = std::sqrt(std::max(0.0, pe.eigenvalues().maxCoeff()));
  });

  rep.c_fit = -std::numeric_limits<double>::infinity();
  double num = 0.0, den = 0.0;
  for (const auto& p : rep.points) {
    rep.c_fit = std::max(rep.c_fit, p.scaled_deficit);
    const double u = std::pow(p.x_norm, -2.0);
    num += u * (k * k - p.lowest);
    den += u * u;
  }
  rep.c_lsq = num / den;
  double ss = 0.0;
  for (const auto& p : rep.points) {
    const double model = k * k - rep.c_lsq * std::pow(p.x_norm, -2.0);
    ss += (p.lowest - model) * (p.lowest - model);
  }
  rep.lsq_rms = std::sqrt(ss / static_cast<double>(rep.points.size()));
  rep.no_violation = true;
  rep.monotone = true;
  rep.projected_bound = true;
  for (std::size_t i = 0; i < rep.points.size(); ++i) {
    FiberPoint& p = rep.points[i];
    p.violation = p.lowest < k * k - rep.c_fit * std::pow(p.x_norm, -2.0) - options.tol;
    rep.no_violation &= !p.violation;
    rep.monotone &= p.lowest <= k * k + options.tol;
    if (i > 0) rep.monotone &= p.lowest > rep.points[i - 1].lowest;
    rep.projected_bound &= p.projected_min >= k * k - options.tol;
  }
  std::vector<double> lx, ly;
  for (const auto& p : rep.points) {
    lx.push_back(std::log(p.x_norm));
    ly.push_back(std::log(p.coupling_norm));
  }
  rep.coupling_exponent = lx.size() >= 2 ? lsq_slope(lx, ly) : std::nan("");
  return rep;
}

// ---------------------------------------------------------------------------
// Gauge-fixed Laplacian

std::string to_string(GaugeFamily family) {
  switch (family) {
    case GaugeFamily::Radial: return "radial";
    case GaugeFamily::Vortex: return "vortex";
    case GaugeFamily::Mixed: return "mixed";
  }
  return "?";
}

namespace {

// A slice function: components with definite M eigenvalue m.
struct SliceFunction {
  std::vector<int> m;
  std::function<std::vector<cd>(double rho, double v3, double v4, const std::array<double, 5>& x)> f;
};

SliceFunction make_family(GaugeFamily family, int variant) {
  SliceFunction s;
  const auto gx = [](const std::array<double, 5>& x) {
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    return std::exp(-0.25 * r2);
  };
  switch (family) {
    case GaugeFamily::Radial: {
      // Independent of v; only M = 0 components, so L-hat annihilates it.
      const double a = 0.5 + 0.25 * variant;
      s.m = {0, 0};
      s.f = [a, gx](double rho, double, double, const std::array<double, 5>& x) {
        const double r = rho * std::exp(-a * rho * rho) * gx(x);
        return std::vector<cd>{r * (1.0 + 0.3 * x[0]), cd(0.0, 0.5) * r * x[2] * x[3]};
      };
      break;
    }
    case GaugeFamily::Vortex: {
      // rho e^{-rho^2} (v3 + i v4)^n times a Gaussian; one component with
      // m = -n (L-hat = 0) and one with m = 1 - n.
      const int n = 1 + variant % 3;
      s.m = {-std::min(n, 2), 1 - std::min(n, 2)};
      s.f = [n, gx](double rho, double v3, double v4, const std::array<double, 5>& x) {
        const cd z = std::pow(cd(v3, v4), n);
        const double r = rho * std::exp(-rho * rho) * std::exp(-0.5 * (v3 * v3 + v4 * v4)) * gx(x);
        return std::vector<cd>{r * z, 0.7 * r * z * x[1]};
      };
      break;
    }
    case GaugeFamily::Mixed: {
      // Polynomial times Gaussian in all slice variables, three M values.
      std::mt19937_64 rng(1000 + static_cast<std::uint64_t>(variant));
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      std::array<std::array<cd, 6>, 3> c{};
      for (auto& row : c)
        for (auto& e : row) e = cd(u(rng), u(rng));
      s.m = {-1, 0, 2};
      s.f = [c, gx](double rho, double v3, double v4, const std::array<double, 5>& x) {
        const double gauss = std::exp(-(rho - std::numbers::sqrt2) * (rho - std::numbers::sqrt2) -
                                      0.5 * (v3 * v3 + v4 * v4)) *
                             gx(x);
        const std::array<double, 6> mono{1.0, rho, v3, v4 * rho, x[0] * v3, x[4] * x[4]};
        std::vector<cd> out(3);
        for (int k = 0; k < 3; ++k) {
          cd p = 0.0;
          for (int j = 0; j < 6; ++j) p += c[k][j] * mono[j];
          out[k] = p * gauss;
        }
        return out;
      };
      break;
    }
  }
  return s;
}

// Psi(q, x) from the slice function: q1 = -rho sin(alpha), q2 = rho cos(alpha),
// (v3, v4) = R(-alpha)(q3, q4), component phase e^{-i alpha m}.
std::vector<cd> full_function(const SliceFunction& s, const std::array<double, 9>& xi) {
  const double q1 = xi[0], q2 = xi[1], q3 = xi[2], q4 = xi[3];
  const double rho = std::hypot(q1, q2);
  const double alpha = std::atan2(-q1, q2);
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  const double v3 = ca * q3 + sa * q4;
  const double v4 = -sa * q3 + ca * q4;
  const std::array<double, 5> x{xi[4], xi[5], xi[6], xi[7], xi[8]};
  std::vector<cd> out = s.f(rho, v3, v4, x);
  const double pref = 1.0 / std::sqrt(2.0 * std::numbers::pi * rho);
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] *= pref * std::exp(cd(0.0, -alpha * s.m[k]));
  return out;
}

using VecFn = std::function<std::vector<cd>(double)>;

// Fourth-order central second and first differences of a vector-valued function at 0.
std::vector<cd> second_difference(const VecFn& f, double h) {
  const auto m2 = f(-2 * h), m1 = f(-h), z = f(0.0), p1 = f(h), p2 = f(2 * h);
  std::vector<cd> out(z.size());
  for (std::size_t k = 0; k < z.size(); ++k)
    out[k] = (-p2[k] + 16.0 * p1[k] - 30.0 * z[k] + 16.0 * m1[k] - m2[k]) / (12.0 * h * h);
  return out;
}
std::vector<cd> first_difference(const VecFn& f, double h) {
  const auto m2 = f(-2 * h), m1 = f(-h), p1 = f(h), p2 = f(2 * h);
  std::vector<cd> out(p1.size());
  for (std::size_t k = 0; k < p1.size(); ++k)
    out[k] = (-p2[k] + 8.0 * p1[k] - 8.0 * m1[k] + m2[k]) / (12.0 * h);
  return out;
}

struct Sides {
  std::vector<cd> lhs, rhs;
  double gauge_defect = 0.0;
};

Sides evaluate_sides(const SliceFunction& s, double rho, double v3, double v4,
                     const std::array<double, 5>& x, double h, bool drop_quarter) {
  const std::array<double, 9> xi0{0.0, rho, v3, v4, x[0], x[1], x[2], x[3], x[4]};
  const std::size_t nc = s.m.size();
  Sides out;

  // Left side: sqrt(2 pi rho) (-Laplacian Psi) on the slice.
  std::vector<cd> lap(nc, 0.0);
  for (int d = 0; d < 9; ++d) {
    const auto d2 = second_difference(
        [&](double e) {
          auto xi = xi0;
          xi[d] += e;
          return full_function(s, xi);
        },
        h);
    for (std::size_t k = 0; k < nc; ++k) lap[k] += d2[k];
  }
  out.lhs.resize(nc);
  const double pref = std::sqrt(2.0 * std::numbers::pi * rho);
  for (std::size_t k = 0; k < nc; ++k) out.lhs[k] = -pref * lap[k];

  // J Psi = (W12 + W34 + M) Psi with W_ij = -i (q_i d_j - q_j d_i).
  std::array<std::vector<cd>, 4> grad;
  for (int d = 0; d < 4; ++d)
    grad[d] = first_difference(
        [&](double e) {
          auto xi = xi0;
          xi[d] += e;
          return full_function(s, xi);
        },
        h);
  const auto psi0 = full_function(s, xi0);
  for (std::size_t k = 0; k < nc; ++k) {
    const cd w12 = cd(0.0, -1.0) * (xi0[0] * grad[1][k] - xi0[1] * grad[0][k]);
    const cd w34 = cd(0.0, -1.0) * (xi0[2] * grad[3][k] - xi0[3] * grad[2][k]);
    out.gauge_defect = std::max(out.gauge_defect, std::abs(w12 + w34 + double(s.m[k]) * psi0[k]));
  }

  // Right side: (-Laplacian on the slice + rho^-2 (L^2 - 1/4)) Psi-hat.
  const auto hat = [&](double r, double a3, double a4, const std::array<double, 5>& y) {
    return s.f(r, a3, a4, y);
  };
  std::vector<cd> lap_hat(nc, 0.0);
  for (int d = 0; d < 8; ++d) {
    const auto d2 = second_difference(
        [&](double e) {
          double r = rho, a3 = v3, a4 = v4;
          std::array<double, 5> y = x;
          if (d == 0) r += e;
          else if (d == 1) a3 += e;
          else if (d == 2) a4 += e;
          else y[d - 3] += e;
          return hat(r, a3, a4, y);
        },
        h);
    for (std::size_t k = 0; k < nc; ++k) lap_hat[k] += d2[k];
  }
  // Angular derivatives in the (v3, v4) plane: g(th) = Psi-hat(R(th) v).
  const VecFn rot = [&](double th) {
    const double c = std::cos(th), sn = std::sin(th);
    return hat(rho, c * v3 - sn * v4, sn * v3 + c * v4, x);
  };
  const auto dth = first_difference(rot, h);
  const auto dth2 = second_difference(rot, h);
  const auto f0 = hat(rho, v3, v4, x);
  const double quarter = drop_quarter ? 0.0 : 0.25;
  out.rhs.resize(nc);
  for (std::size_t k = 0; k < nc; ++k) {
    const double m = s.m[k];
    // L = -i d_theta + m, so L^2 = -d_theta^2 - 2 i m d_theta + m^2.
    const cd l2 = -dth2[k] - cd(0.0, 2.0 * m) * dth[k] + m * m * f0[k];
    out.rhs[k] = -lap_hat[k] + (l2 - quarter * f0[k]) / (rho * rho);
  }
  return out;
}

}  // namespace

GaugePointResult gauge_laplacian_point(GaugeFamily family, int variant, double rho, double v3,
                                       double v4, const std::array<double, 5>& x, double step,
                                       bool drop_quarter) {
  if (!(rho >= 0.1)) throw std::domain_error("gauge_laplacian_point: rho < 0.1 is rejected");
  const SliceFunction s = make_family(family, variant);
  const Sides a = evaluate_sides(s, rho, v3, v4, x, step, drop_quarter);
  const Sides b = evaluate_sides(s, rho, v3, v4, x, 2.0 * step, drop_quarter);
  GaugePointResult r;
  for (std::size_t k = 0; k < a.lhs.size(); ++k) {
    r.discrepancy = std::max(r.discrepancy, std::abs(a.lhs[k] - a.rhs[k]));
    r.richardson = std::max({r.richardson, std::abs(a.lhs[k] - b.lhs[k]), std::abs(a.rhs[k] - b.rhs[k])});
  }
  r.gauge_defect = a.gauge_defect;
  return r;
}

GaugeLaplacianReport verify_gauge_laplacian(const GaugeLaplacianOptions& options) {
  GaugeLaplacianReport rep;
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> urho(0.0, 2.5), uv(-1.5, 1.5), ux(-1.0, 1.0);
  for (GaugeFamily fam : {GaugeFamily::Radial, GaugeFamily::Vortex, GaugeFamily::Mixed}) {
    GaugeFamilyResult fr;
    fr.family = fam;
    int variant = 0;
    while (fr.points < options.points_per_family) {
      const double rho = urho(rng);
      const double v3 = uv(rng), v4 = uv(rng);
      std::array<double, 5> x{};
      for (double& c : x) c = ux(rng);
      if (rho < 0.1) {
        ++fr.rejected;
        continue;
      }
      const GaugePointResult r =
          gauge_laplacian_point(fam, variant++ % 6, rho, v3, v4, x, options.step, options.drop_quarter);
      fr.max_gauge_defect = std::max(fr.max_gauge_defect, r.gauge_defect);
      if (rho < 0.5) {
        ++fr.inner;
        fr.max_discrepancy_inner = std::max(fr.max_discrepancy_inner, r.discrepancy);
        continue;
      }
      ++fr.points;
      fr.max_discrepancy = std::max(fr.max_discrepancy, r.discrepancy);
      fr.max_richardson = std::max(fr.max_richardson, r.richardson);
    }
    rep.points += fr.points;
    rep.max_discrepancy = std::max(rep.max_discrepancy, fr.max_discrepancy);
    rep.max_richardson = std::max(rep.max_richardson, fr.max_richardson);
    rep.max_gauge_defect = std::max(rep.max_gauge_defect, fr.max_gauge_defect);
    rep.families.push_back(fr);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Spherical decay integral

namespace {

struct GaussRule {
  Eigen::VectorXd nodes, weights;
};

// Golub-Welsch on [-1, 1].
const GaussRule& gauss_legendre_16() {
  static const GaussRule rule = [] {
    const int n = 16;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
      const double b = k / std::sqrt(4.0 * k * k - 1.0);
      J(k, k - 1) = J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    GaussRule r;
    r.nodes = es.eigenvalues();
    r.weights = 2.0 * es.eigenvectors().row(0).transpose().array().square();
    return r;
  }();
  return rule;
}

double composite_gauss(const std::function<double(double)>& f, double a, double b, int panels) {
  const GaussRule& g = gauss_legendre_16();
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (Eigen::Index i = 0; i < g.nodes.size(); ++i)
      sum += g.weights(i) * f(mid + 0.5 * h * g.nodes(i));
  }
  return 0.5 * h * sum;
}

}  // namespace

QuadratureResult spherical_integral(double k, double x_norm, int sign, double tol) {
  if (!(k > 0.0)) throw std::invalid_argument("spherical_integral: k must be positive");
  if (sign != 1 && sign != -1) throw std::invalid_argument("spherical_integral: sign must be +-1");
  const double a = 2.0 * k * x_norm;
  const double vol_s3 = 2.0 * std::numbers::pi * std::numbers::pi;
  const auto f = [a, sign](double th) {
    const double s = std::sin(th);
    return std::exp(-a * (1.0 - sign * std::cos(th))) * s * s * s;
  };
  QuadratureResult r;
  int panels = 1;
  double prev = vol_s3 * composite_gauss(f, 0.0, std::numbers::pi, panels);
  for (;;) {
    panels *= 2;
    const double cur = vol_s3 * composite_gauss(f, 0.0, std::numbers::pi, panels);
    r.halving_change = std::abs(cur - prev);
    r.value = cur;
    r.panels = panels;
    if (r.halving_change <= tol * std::max(1.0, std::abs(cur)) || panels >= (1 << 14)) break;
    prev = cur;
  }
  return r;
}

double spherical_integral_closed_form(double k, double x_norm) {
  // With s = 1 - cos th: int_0^2 e^{-a s} s (2 - s) ds.
  const double a = 2.0 * k * x_norm;
  const double e = std::exp(-2.0 * a);
  const double i1 = (1.0 - e * (1.0 + 2.0 * a)) / (a * a);
  const double i2 = (2.0 - e * (2.0 + 4.0 * a + 4.0 * a * a)) / (a * a * a);
  return 2.0 * std::numbers::pi * std::numbers::pi * (2.0 * i1 - i2);
}

SphericalDecayReport spherical_decay_integral(double k, const std::vector<double>& x_grid) {
  if (!(k > 0.0)) throw std::invalid_argument("spherical_decay_integral: k must be positive");
  SphericalDecayReport rep;
  rep.k = k;
  rep.limit = std::numbers::pi * std::numbers::pi / (k * k);
  rep.quadrature_converged = true;
  for (double xn : x_grid) {
    SphericalPoint p;
    p.x_norm = xn;
    const QuadratureResult plus = spherical_integral(k, xn, 1);
    const QuadratureResult minus = spherical_integral(k, xn, -1);
    p.plus = plus.value;
    p.minus = minus.value;
    p.halving_change = std::max(plus.halving_change, minus.halving_change);
    p.closed_form = spherical_integral_closed_form(k, xn);
    p.scaled = p.plus * xn * xn;
    p.collapse_defect = std::abs(spherical_integral(2.0 * k, xn, 1).value -
                                 spherical_integral(k, 2.0 * xn, 1).value);
    rep.quadrature_converged &= p.halving_change < 1e-10;
    rep.max_oracle_error = std::max(rep.max_oracle_error, std::abs(p.plus - p.closed_form));
    rep.max_collapse_defect = std::max(rep.max_collapse_defect, p.collapse_defect);
    rep.sup_scaled = std::max(rep.sup_scaled, p.scaled);
    rep.points.push_back(p);
  }
  rep.monotone = true;
  for (std::size_t i = 1; i < rep.points.size(); ++i)
    rep.monotone &= rep.points[i].scaled >= rep.points[i - 1].scaled;
  rep.bounded = rep.sup_scaled <= rep.limit;
  // Integrands: e^{-a(1+c)} <= e^{-a(1-c)} exactly when c = cos th >= 0.
  rep.pointwise_ordering = true;
  for (double xn : x_grid) {
    const double a = 2.0 * k * xn;
    for (int i = 0; i <= 200; ++i) {
      const double th = 0.5 * std::numbers::pi * i / 200.0;
      const double c = std::cos(th);
      rep.pointwise_ordering &= std::exp(-a * (1.0 + c)) <= std::exp(-a * (1.0 - c));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Decay diagnostic

std::vector<double> x_axis_marginal(const SectorBasis& basis, const Eigen::VectorXcd& v, int mu,
                                    const std::vector<double>& coords) {
  const BasisSpec& spec = basis.spec();
  const int var = x_var(mu);
  if (!spec.active[var]) throw std::invalid_argument("x_axis_marginal: x coordinate is not active");
  std::size_t slot = 0;
  bool found = false;
  for (const auto& u : basis.units()) {
    if (!u.plane && u.var == var) {
      found = true;
      break;
    }
    slot += u.plane ? 2 : 1;
  }
  if (!found) throw std::invalid_argument("x_axis_marginal: no unit for the coordinate");
  const int nmax = spec.max_quanta();
  const double w = spec.frequencies[var];

  // Hermite functions phi_n(s) for every coordinate.
  const std::size_t nc = coords.size();
  std::vector<std::vector<double>> phi(static_cast<std::size_t>(nmax + 1), std::vector<double>(nc));
  for (std::size_t i = 0; i < nc; ++i) {
    const double y = std::sqrt(w) * coords[i];
    double pm = 0.0;
    double p = std::pow(w / std::numbers::pi, 0.25) * std::exp(-0.5 * y * y);
    for (int n = 0; n <= nmax; ++n) {
      phi[static_cast<std::size_t>(n)][i] = p;
      const double next = std::sqrt(2.0 / (n + 1)) * y * p - std::sqrt(static_cast<double>(n) / (n + 1)) * pm;
      pm = p;
      p = next;
    }
  }

  // Group amplitudes by everything except the occupation of the axis.
  std::map<std::pair<std::vector<std::uint8_t>, int>, std::vector<cd>> groups;
  double norm2 = 0.0;
  for (std::size_t b = 0; b < basis.boson_dim(); ++b) {
    std::vector<std::uint8_t> occ = basis.occupations(b);
    const int n = occ[slot];
    occ[slot] = 0;
    const auto& fs = basis.fermions(b);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const cd c = v(static_cast<Eigen::Index>(basis.offset(b) + i));
      if (c == cd(0.0)) continue;
      norm2 += std::norm(c);
      auto& g = groups[{occ, fs[i]}];
      if (g.size() <= static_cast<std::size_t>(n)) g.resize(static_cast<std::size_t>(n) + 1, 0.0);
      g[static_cast<std::size_t>(n)] += c;
    }
  }
  std::vector<double> out(nc, 0.0);
  for (const auto& [key, amp] : groups)
    for (std::size_t i = 0; i < nc; ++i) {
      cd s = 0.0;
      for (std::size_t n = 0; n < amp.size(); ++n) s += amp[n] * phi[n][i];
      out[i] += std::norm(s);
    }
  for (double& d : out) d /= norm2;
  return out;
}

DecayReport decay_diagnostic(const DecayOptions& o, const EigenOptions& solver) {
  DecayReport rep;
  rep.k = o.k;
  BasisSpec spec = full_model_spec(o.x_cutoff, o.w12, o.w34, o.wx);
  spec.unit_cutoff[q_var(0)] = spec.unit_cutoff[q_var(1)] = o.plane12_cutoff;
  spec.unit_cutoff[q_var(2)] = spec.unit_cutoff[q_var(3)] = o.plane34_cutoff;
  const auto basis = build_gauge_sector(spec, o.parity);
  rep.dim = basis->dim();
  const SparseOperator h = assemble_Hk(o.k, basis);
  EigenOptions opt = solver;
  opt.count = 1;
  opt.want_vectors = true;
  const SpectrumReport s = lowest_eigs(h, opt);
  rep.energy = s.eigenvalues[0];
  rep.residual = s.residuals[0];
  const Eigen::VectorXcd psi = s.vectors.col(0);
  rep.zero_mode_ratio = h.apply(psi).norm() / psi.norm();
  rep.zero_mode = rep.zero_mode_ratio < 10.0 * solver.tol;

  // Weight in the top shell of the x oscillators.
  double top = 0.0, total = 0.0;
  std::size_t slot = 0;
  std::vector<std::size_t> x_slots;
  for (const auto& u : basis->units()) {
    if (!u.plane && u.var >= x_var(0)) x_slots.push_back(slot);
    slot += u.plane ? 2 : 1;
  }
  for (std::size_t b = 0; b < basis->boson_dim(); ++b) {
    int nx = 0;
    for (std::size_t sl : x_slots) nx += basis->occupations(b)[sl];
    const auto n = static_cast<Eigen::Index>(basis->fermions(b).size());
    const double w = psi.segment(static_cast<Eigen::Index>(basis->offset(b)), n).squaredNorm();
    total += w;
    if (nx == o.x_cutoff) top += w;
  }
  rep.tail_fraction = top / total;
  rep.turning_radius = std::sqrt((2.0 * o.x_cutoff + 1.0) / o.wx);

  rep.window_lo = std::max(1.0, (0.5 + o.epsilon) / o.k);
  rep.window_hi = rep.window_lo + 3.0 / o.k;
  for (int i = 0; i < o.window_points; ++i)
    rep.radii.push_back(rep.window_lo + (rep.window_hi - rep.window_lo) * i / (o.window_points - 1));
  const std::vector<double> m1 = x_axis_marginal(*basis, psi, 0, rep.radii);
  const std::vector<double> m3 = x_axis_marginal(*basis, psi, 2, rep.radii);
  std::vector<double> ly;
  for (std::size_t i = 0; i < rep.radii.size(); ++i) {
    rep.amplitude.push_back(std::sqrt(std::max(m1[i], 0.0)));
    ly.push_back(std::log(std::max(rep.amplitude.back(), 1e-300)));
    const double ratio = m1[i] > 0.0 && m3[i] > 0.0 ? std::max(m1[i] / m3[i], m3[i] / m1[i])
                                                     : std::numeric_limits<double>::infinity();
    rep.isotropy_ratio = std::max(rep.isotropy_ratio, ratio);
  }
  const double slope = lsq_slope(rep.radii, ly);
  rep.kappa = -slope;
  double c0 = 0.0;
  for (std::size_t i = 0; i < ly.size(); ++i) c0 += ly[i] - slope * rep.radii[i];
  c0 /= static_cast<double>(ly.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < ly.size(); ++i) {
    const double d = ly[i] - (c0 + slope * rep.radii[i]);
    ss += d * d;
  }
  rep.fit_rms = std::sqrt(ss / static_cast<double>(ly.size()));
  rep.kappa_in_window = rep.kappa >= 0.7 * o.k && rep.kappa <= 1.3 * o.k;
  rep.isotropic = rep.isotropy_ratio <= 1.05;

  std::vector<std::string> why;
  if (!s.converged) why.push_back("eigensolver did not converge");
  if (!rep.zero_mode) why.push_back("lowest state is not a near-kernel vector at this cutoff");
  if (rep.tail_fraction > 1e-3) why.push_back("weight in the top x shell above 1e-3");
  if (rep.window_hi > rep.turning_radius) why.push_back("fit window extends past the x turning point");
  if (why.empty()) {
    rep.status = rep.kappa_in_window && rep.isotropic ? "pass" : "fail";
  } else {
    rep.status = "inconclusive";
    for (std::size_t i = 0; i < why.size(); ++i) rep.reason += (i ? "; " : "") + why[i];
  }
  return rep;
}

}  // namespace susyqm
