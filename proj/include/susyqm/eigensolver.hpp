#pragma once

// Block Lanczos with full reorthogonalization and thick restart, for the
// lowest eigenpairs of a Hermitian linear map.

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace susyqm {

using LinearMap = std::function<void(const std::complex<double>*, std::complex<double>*)>;

struct EigenOptions {
  int count = 1;          // wanted eigenpairs
  int block = 1;          // block size (>= expected multiplicity for degenerate levels)
  int max_basis = 0;      // Krylov basis size; 0 chooses max(count + 6 blocks, 40)
  double tol = 1e-8;      // residual norm |Av - lambda v|
  int max_restarts = 500;
  std::uint64_t seed = 1;
  bool want_vectors = true;
};

struct EigenResult {
  std::vector<double> values;
  std::vector<double> residuals;  // explicit |Av - lambda v| for unit v
  Eigen::MatrixXcd vectors;       // n x count (empty if not requested)
  bool converged = false;
  int matvecs = 0;
  int restarts = 0;
};

EigenResult block_lanczos(const LinearMap& apply, std::size_t n, const EigenOptions& options);

/// Dense diagonalization of a small map (builds the matrix column by column).
EigenResult dense_eigs(const LinearMap& apply, std::size_t n, int count);

}  // namespace susyqm
