#include "susyqm/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace susyqm {

namespace {

using cd = std::complex<double>;

void fill_random(Eigen::Ref<Eigen::VectorXcd> v, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cd(g(rng), g(rng));
}

// Write an orthonormal basis of W (already orthogonal to V[:, 0..m)) into
// V[:, m..m+b); returns R with W = V_new R. Deficient directions are
// replaced by random vectors with a zero column in R.
Eigen::MatrixXcd append_block(Eigen::MatrixXcd& V, Eigen::Index m, Eigen::MatrixXcd& W,
                              double scale, std::mt19937_64& rng) {
  const Eigen::Index b = W.cols();
  Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(b, b);
  for (Eigen::Index j = 0; j < b; ++j) {
    Eigen::VectorXcd w = W.col(j);
    const double before = w.norm();
    for (int pass = 0; pass < 2 && j > 0; ++pass) {
      const Eigen::VectorXcd c = V.middleCols(m, j).adjoint() * w;
      w.noalias() -= V.middleCols(m, j) * c;
      R.block(0, j, j, 1) += c;
    }
    double r = w.norm();
    if (r <= 1e-10 * std::max(scale, before)) {
      fill_random(w, rng);
      for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXcd c = V.leftCols(m + j).adjoint() * w;
        w.noalias() -= V.leftCols(m + j) * c;
      }
      r = 0.0;
      w.normalize();
    } else {
      w /= r;
    }
    R(j, j) = r;
    V.col(m + j) = w;
  }
  return R;
}

}  // namespace

EigenResult dense_eigs(const LinearMap& apply, std::size_t n, int count) {
  if (count < 1) throw std::invalid_argument("dense_eigs: count must be >= 1");
  const auto nn = static_cast<Eigen::Index>(n);
  Eigen::MatrixXcd A(nn, nn);
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(nn);
  for (Eigen::Index j = 0; j < nn; ++j) {
    e(j) = 1.0;
    apply(e.data(), A.col(j).data());
    e(j) = 0.0;
  }
  const Eigen::MatrixXcd H = 0.5 * (A + A.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  EigenResult r;
  const Eigen::Index k = std::min<Eigen::Index>(count, nn);
  r.vectors = es.eigenvectors().leftCols(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    r.values.push_back(es.eigenvalues()(i));
    r.residuals.push_back((A * r.vectors.col(i) - es.eigenvalues()(i) * r.vectors.col(i)).norm());
  }
  r.converged = true;
  r.matvecs = static_cast<int>(nn);
  return r;
}

EigenResult block_lanczos(const LinearMap& apply, std::size_t n, const EigenOptions& opt) {
  if (opt.count < 1 || opt.block < 1 || n == 0)
    throw std::invalid_argument("block_lanczos: count, block and dimension must be positive");
  const Eigen::Index b = opt.block;
  Eigen::Index mmax = opt.max_basis > 0 ? opt.max_basis : std::max<Eigen::Index>(opt.count + 6 * b, 40);
  mmax = std::max<Eigen::Index>(mmax, opt.count + 2 * b);
  mmax = (mmax + b - 1) / b * b;
  const auto nn = static_cast<Eigen::Index>(n);
  if (nn <= 2 * mmax) return dense_eigs(apply, n, opt.count);

  std::mt19937_64 rng(opt.seed);
  Eigen::MatrixXcd V(nn, mmax);
  Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(mmax, mmax);
  Eigen::MatrixXcd W(nn, b);

  for (Eigen::Index j = 0; j < b; ++j) fill_random(W.col(j), rng);
  append_block(V, 0, W, 0.0, rng);
  Eigen::Index m = b;  // basis vectors
  Eigen::Index e = 0;  // vectors whose image is projected into T
  double scale = 0.0;
  double est_factor = 0.5;

  EigenResult res;
  Eigen::VectorXd theta;
  Eigen::MatrixXcd S;

  const auto rayleigh_ritz = [&]() {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(T.topLeftCorner(e, e));
    theta = es.eigenvalues();
    S = es.eigenvectors();
  };
  const auto estimates_converged = [&]() {
    if (e < opt.count) return false;
    rayleigh_ritz();
    const Eigen::MatrixXcd coupling = T.block(e, 0, m - e, e);
    for (int i = 0; i < opt.count; ++i)
      if ((coupling * S.col(i)).norm() > est_factor * opt.tol) return false;
    return true;
  };

  for (;;) {
    bool done = false;
    while (m + b <= mmax) {
      for (Eigen::Index j = 0; j < b; ++j) apply(V.col(e + j).data(), W.col(j).data());
      res.matvecs += static_cast<int>(b);
      // Classical Gram-Schmidt with a second pass when cancellation is large.
      const Eigen::VectorXd norms_before = W.colwise().norm();
      Eigen::MatrixXcd C = V.leftCols(m).adjoint() * W;
      W.noalias() -= V.leftCols(m) * C;
      const Eigen::VectorXd norms_after = W.colwise().norm();
      if ((norms_after.array() < 0.7 * norms_before.array()).any()) {
        const Eigen::MatrixXcd C2 = V.leftCols(m).adjoint() * W;
        W.noalias() -= V.leftCols(m) * C2;
        C += C2;
      }
      T.block(0, e, m, b) = C;
      T.block(e, 0, b, m) = C.adjoint();
      const Eigen::MatrixXcd D = T.block(e, e, b, b);
      T.block(e, e, b, b) = 0.5 * (D + D.adjoint());
      scale = std::max(scale, C.cwiseAbs().maxCoeff());
      const Eigen::MatrixXcd R = append_block(V, m, W, scale, rng);
      T.block(m, e, b, b) = R;
      T.block(e, m, b, b) = R.adjoint();
      e += b;
      m += b;
      if (estimates_converged()) {
        done = true;
        break;
      }
    }
    if (!done) rayleigh_ritz();

    if (done) {
      // Explicit Ritz vectors and residuals.
      const Eigen::MatrixXcd Y = V.leftCols(e) * S.leftCols(opt.count);
      res.values.clear();
      res.residuals.clear();
      bool ok = true;
      Eigen::VectorXcd ay(nn);
      for (int i = 0; i < opt.count; ++i) {
        apply(Y.col(i).data(), ay.data());
        ++res.matvecs;
        res.values.push_back(theta(i));
        const double r = (ay - theta(i) * Y.col(i)).norm() / Y.col(i).norm();
        res.residuals.push_back(r);
        ok &= r <= opt.tol;
      }
      if (ok || res.restarts >= opt.max_restarts) {
        res.converged = ok;
        if (opt.want_vectors) res.vectors = Y;
        return res;
      }
      est_factor *= 0.1;
    }
    if (res.restarts >= opt.max_restarts) {
      // Best available approximations.
      const Eigen::MatrixXcd Y = V.leftCols(e) * S.leftCols(opt.count);
      Eigen::VectorXcd ay(nn);
      res.values.clear();
      res.residuals.clear();
      for (int i = 0; i < opt.count; ++i) {
        apply(Y.col(i).data(), ay.data());
        res.values.push_back(theta(i));
        res.residuals.push_back((ay - theta(i) * Y.col(i)).norm() / Y.col(i).norm());
      }
      res.converged = false;
      if (opt.want_vectors) res.vectors = Y;
      return res;
    }

    // Thick restart: keep the lowest Ritz vectors and the unexpanded block.
    const Eigen::Index keep = std::min<Eigen::Index>({opt.count + b, mmax - 2 * b, e});
    const Eigen::Index tail = m - e;
    const Eigen::MatrixXcd coupling = T.block(e, 0, tail, e) * S.leftCols(keep);
    const Eigen::MatrixXcd Sk = S.leftCols(keep);
    constexpr Eigen::Index chunk = 4096;
    for (Eigen::Index r0 = 0; r0 < nn; r0 += chunk) {
      const Eigen::Index rows = std::min(chunk, nn - r0);
      const Eigen::MatrixXcd tmp = V.block(r0, 0, rows, e) * Sk;
      V.block(r0, 0, rows, keep) = tmp;
    }
    for (Eigen::Index j = 0; j < tail; ++j) V.col(keep + j) = V.col(e + j);
    T.setZero();
    for (Eigen::Index i = 0; i < keep; ++i) T(i, i) = theta(i);
    T.block(keep, 0, tail, keep) = coupling;
    T.block(0, keep, keep, tail) = coupling.adjoint();
    e = keep;
    m = keep + tail;
    ++res.restarts;
  }
}

}  // namespace susyqm
