#pragma once

// Spectral diagnostics on top of the oscillator assembly: lowest eigenpairs
// with residuals and parities, SUSY pairing tables, the semiclassical t-scan,
// fiber bounds, the gauge-fixed Laplacian check, the spherical decay
// integral and the decay-rate fit of a near-zero state.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "susyqm/eigensolver.hpp"
#include "susyqm/oscillator_assembly.hpp"

namespace susyqm {

struct SpectrumReport {
  std::string label;
  int cutoff = 0;
  std::array<int, kNumBosons> unit_cutoff{};
  std::array<double, kNumBosons> frequencies{};
  std::size_t dim = 0;
  std::string sector;
  std::vector<double> eigenvalues;  // ascending
  std::vector<double> residuals;    // |Av - lambda v| for unit v
  std::vector<double> parities;     // <v, (-1)^F v>
  bool converged = false;
  int matvecs = 0;
  double tol = 0.0;
  Eigen::MatrixXcd vectors;
};

/// Human-readable sector label ("J=0, (-1)^F=+1", "all", ...).
std::string sector_label(const SectorBasis& basis);

/// <v, (-1)^F v> / |v|^2 for a vector of the basis.
double parity_expectation(const SectorBasis& basis, const Eigen::VectorXcd& v);

/// Lowest eigenpairs of a symmetric operator. A result that misses the
/// tolerance is returned with converged = false and the best residuals.
SpectrumReport lowest_eigs(const SparseOperator& op, const EigenOptions& options);

struct PairingTable {
  struct Pair {
    double even = 0.0;
    double odd = 0.0;
    double defect = 0.0;
  };
  double zero_threshold = 0.0;
  std::vector<double> unpaired_even;  // levels below the threshold
  std::vector<double> unpaired_odd;
  std::vector<Pair> pairs;            // nonzero levels matched across parity
  double max_defect = 0.0;
  int unpaired_near_zero() const {
    return static_cast<int>(unpaired_even.size() + unpaired_odd.size());
  }
};

/// Groups the computed levels of the two parity sectors. Values closer than
/// `cluster_tol` count as one level; nonzero levels are matched in order up
/// to the shorter list.
PairingTable susy_pairing_report(const SpectrumReport& even, const SpectrumReport& odd,
                                 double zero_threshold, double cluster_tol = 1e-7);

/// Basis for K_t: the (q1,q2) plane carries its own cutoff and frequency
/// plane_factor * sqrt2 t; the remaining seven coordinates use sqrt2 t and
/// share `other_cutoff`.
struct KtBasisChoice {
  int other_cutoff = 3;
  int plane_cutoff = 20;
  double plane_factor = 0.6;
};
BasisSpec kt_basis_spec(double t, const KtBasisChoice& choice);

struct ScanPoint {
  double t = 0.0;
  double E1 = 0.0;
  double E2 = 0.0;
  double pairing_defect = 0.0;  // first excited even level vs lowest odd level
  double max_residual = 0.0;
  std::size_t dim_even = 0;
  std::size_t dim_odd = 0;
  bool converged = false;
  SpectrumReport even;
  SpectrumReport odd;
};

struct SemiclassicalReport {
  std::vector<ScanPoint> points;
  bool e1_strictly_decreasing = false;
  double r_empirical = 0.0;    // min E2/t over the grid
  double max_residual = 0.0;
  bool r_margin_ok = false;    // r > 10 * max residual
  double loglog_slope = 0.0;   // least-squares slope of log(E1/t) against log t
  bool all_converged = false;
};

SpectrumReport kt_sector_spectrum(double t, const BasisSpec& spec, int parity,
                                  const EigenOptions& options, bool with_hf = true);

SemiclassicalReport semiclassical_scan(const std::vector<double>& t_grid,
                                       const KtBasisChoice& choice, const EigenOptions& options,
                                       int workers = 1);

/// Pairing defect of the first excited pair of K_t for a list of bases.
struct PairingTrend {
  std::vector<int> cutoffs;
  std::vector<double> defects;
  std::vector<double> lowest;
  bool decreasing = false;
};
PairingTrend kt_pairing_trend(double t, const std::vector<int>& other_cutoffs,
                              const KtBasisChoice& choice, const EigenOptions& options);

/// Negative control: -Laplacian + t^2 V_1 without H_F.
struct NoHfControl {
  SpectrumReport even;
  SpectrumReport odd;
  PairingTable pairing;
  double lowest_over_t = 0.0;
  double threshold = 0.0;
  bool has_unpaired_zero = false;
};
NoHfControl kt_no_hf_control(double t, const BasisSpec& spec, const EigenOptions& options);

// ---------------------------------------------------------------------------
// Quadratic model G_t

struct GtNumericReport {
  double t = 0.0;
  int cutoff = 0;
  SpectrumReport even;
  SpectrumReport odd;
  PairingTable pairing;
  double ground_over_t = 0.0;
  double gap_over_t = 0.0;
  int ground_multiplicity = 0;  // computed levels within the zero threshold
  double zero_threshold = 0.0;
};
GtNumericReport gt_numeric_spectrum(double t, int cutoff, const EigenOptions& options);

// ---------------------------------------------------------------------------
// Fibers

/// Ground space of H^0_x at matched frequency, solved sector by sector in the
/// total boson quanta (conserved when w = |x|; the leakage is measured).
struct FiberGroundReport {
  double x_norm = 0.0;
  int cutoff = 0;
  std::size_t dim = 0;
  double lowest = 0.0;
  int multiplicity = 0;          // eigenvalues below zero_tol over all sectors
  double zero_tol = 0.0;
  double first_excited = 0.0;
  double max_residual = 0.0;
  double max_leakage = 0.0;      // |part of H v outside its quanta sector|
  std::vector<double> sector_lowest;
  bool complete = false;         // every sector's highest computed value is above zero_tol
  bool converged = false;
};
FiberGroundReport fiber_ground_space(const std::array<double, 5>& x, int cutoff, double zero_tol,
                                     const EigenOptions& options);

struct FiberPoint {
  double x_norm = 0.0;
  double lowest = 0.0;
  double residual = 0.0;
  double scaled_deficit = 0.0;   // (k^2 - lowest) |x|^2
  double coupling_norm = 0.0;    // |P_x^perp H P_x|
  double projected_min = 0.0;    // lowest eigenvalue of P_x H P_x on Ran P_x
  bool violation = false;
  bool converged = false;
};

struct FiberBoundReport {
  double k = 0.0;
  int cutoff = 0;
  std::vector<FiberPoint> points;
  double c_fit = 0.0;            // smallest c with lowest >= k^2 - c|x|^-2 on the grid
  double c_lsq = 0.0;            // least-squares c for the model k^2 - c|x|^-2
  double lsq_rms = 0.0;
  bool monotone = false;
  bool no_violation = false;
  double coupling_exponent = 0.0;
  bool projected_bound = false;  // projected_min >= k^2 - tol at every point
};
FiberBoundReport fiber_scan(double k, const std::vector<double>& x_grid, int cutoff,
                            const EigenOptions& options, int workers = 1);

// ---------------------------------------------------------------------------
// Gauge-fixed Laplacian

enum class GaugeFamily { Radial, Vortex, Mixed };
std::string to_string(GaugeFamily family);

struct GaugeLaplacianOptions {
  int points_per_family = 40;
  double step = 1e-3;
  std::uint64_t seed = 7;
  bool drop_quarter = false;  // mutation: remove the -1/4
};

struct GaugeFamilyResult {
  GaugeFamily family = GaugeFamily::Radial;
  int points = 0;
  int rejected = 0;              // samples with rho < 0.1
  int inner = 0;                 // samples with 0.1 <= rho < 0.5
  double max_discrepancy = 0.0;  // over rho >= 0.5
  double max_discrepancy_inner = 0.0;
  double max_richardson = 0.0;   // change between steps h and 2h
  double max_gauge_defect = 0.0; // |J Psi| at the sample points
};

struct GaugeLaplacianReport {
  std::vector<GaugeFamilyResult> families;
  int points = 0;
  double max_discrepancy = 0.0;
  double max_richardson = 0.0;
  double max_gauge_defect = 0.0;
};
GaugeLaplacianReport verify_gauge_laplacian(const GaugeLaplacianOptions& options);

/// One sample on the slice q = (0, rho, v3, v4). Throws std::domain_error for
/// rho < 0.1. `variant` selects a member of the family.
struct GaugePointResult {
  double discrepancy = 0.0;
  double richardson = 0.0;
  double gauge_defect = 0.0;
};
GaugePointResult gauge_laplacian_point(GaugeFamily family, int variant, double rho, double v3,
                                       double v4, const std::array<double, 5>& x, double step,
                                       bool drop_quarter);

// ---------------------------------------------------------------------------
// Spherical decay integral

/// vol(S^3) int_0^pi exp(-2k|x|(1 - sign cos th)) sin^3 th dth by composite
/// Gauss-Legendre with panel doubling until the change is below tol.
struct QuadratureResult {
  double value = 0.0;
  double halving_change = 0.0;
  int panels = 0;
};
QuadratureResult spherical_integral(double k, double x_norm, int sign, double tol = 1e-12);
double spherical_integral_closed_form(double k, double x_norm);

struct SphericalPoint {
  double x_norm = 0.0;
  double plus = 0.0;
  double minus = 0.0;
  double closed_form = 0.0;
  double scaled = 0.0;           // plus * |x|^2
  double halving_change = 0.0;
  double collapse_defect = 0.0;  // |I(2k, |x|) - I(k, 2|x|)|
};

struct SphericalDecayReport {
  double k = 0.0;
  std::vector<SphericalPoint> points;
  double sup_scaled = 0.0;
  double limit = 0.0;            // pi^2 / k^2
  bool bounded = false;
  bool monotone = false;
  bool quadrature_converged = false;
  double max_oracle_error = 0.0;
  double max_collapse_defect = 0.0;
  bool pointwise_ordering = false;  // minus <= plus integrand where cos th >= 0
};
SphericalDecayReport spherical_decay_integral(double k, const std::vector<double>& x_grid);

// ---------------------------------------------------------------------------
// Decay of the near-zero state of H_k

struct DecayOptions {
  double k = 1.0;
  int x_cutoff = 4;        // shared quanta of the five x oscillators
  int plane12_cutoff = 10;
  int plane34_cutoff = 1;
  double w12 = 0.85;
  double w34 = 1.4;
  double wx = 0.5;
  int parity = 1;
  int window_points = 25;
  // The fit window starts where the weight |x|^(-1/2-eps) has a log-derivative
  // below k and spans three e-foldings of exp(-k|x|).
  double epsilon = 0.5;
};

struct DecayReport {
  double k = 0.0;
  std::size_t dim = 0;
  double energy = 0.0;
  double residual = 0.0;
  double kappa = 0.0;
  double fit_rms = 0.0;
  double isotropy_ratio = 0.0;   // max over the window of marginal(x1)/marginal(x3)
  double zero_mode_ratio = 0.0;  // |H psi| / |psi|
  double tail_fraction = 0.0;    // weight in the top x shell of the basis
  bool kappa_in_window = false;
  bool isotropic = false;
  bool zero_mode = false;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double turning_radius = 0.0;   // classical turning point of the top x level
  std::string status;            // "pass", "fail" or "inconclusive"
  std::string reason;
  std::vector<double> radii;
  std::vector<double> amplitude;
};
DecayReport decay_diagnostic(const DecayOptions& options, const EigenOptions& solver);

/// Density of a basis vector along one x axis (other x integrated out,
/// q and fermions traced), at the given coordinates.
std::vector<double> x_axis_marginal(const SectorBasis& basis, const Eigen::VectorXcd& v, int mu,
                                    const std::vector<double>& coords);

}  // namespace susyqm
