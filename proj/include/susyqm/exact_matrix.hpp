#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "susyqm/exact_scalar.hpp"

namespace susyqm {

/// Dense row-major matrix over ExactScalar. Used for the small fixed
/// structures (4x4, 8x8, 16x16) and for exact null-space computations.
class ExactMatrix {
 public:
  ExactMatrix() = default;
  ExactMatrix(std::size_t rows, std::size_t cols);
  /// Integer literal rows, e.g. {{0,-1},{1,0}}.
  ExactMatrix(std::initializer_list<std::initializer_list<std::int64_t>> rows);

  static ExactMatrix identity(std::size_t n);
  static ExactMatrix zero(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  static ExactMatrix block_diag(const ExactMatrix& a, const ExactMatrix& b);
  /// [[a, b], [c, d]] from four equally sized blocks.
  static ExactMatrix blocks(const ExactMatrix& a, const ExactMatrix& b, const ExactMatrix& c,
                            const ExactMatrix& d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  ExactScalar& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const ExactScalar& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  ExactMatrix transpose() const;
  ExactMatrix adjoint() const;
  ExactScalar trace() const;
  bool is_zero() const;
  bool is_integer() const;

  ExactMatrix operator-() const;
  ExactMatrix& operator+=(const ExactMatrix& o);
  ExactMatrix& operator-=(const ExactMatrix& o);
  ExactMatrix& operator*=(const ExactScalar& s);

  friend ExactMatrix operator+(ExactMatrix a, const ExactMatrix& b) { return a += b; }
  friend ExactMatrix operator-(ExactMatrix a, const ExactMatrix& b) { return a -= b; }
  friend ExactMatrix operator*(ExactMatrix a, const ExactScalar& s) { return a *= s; }
  friend ExactMatrix operator*(const ExactScalar& s, ExactMatrix a) { return a *= s; }
  friend ExactMatrix operator*(const ExactMatrix& a, const ExactMatrix& b);
  friend bool operator==(const ExactMatrix& a, const ExactMatrix& b);

  Eigen::MatrixXcd to_complex() const;
  Eigen::MatrixXd to_real() const;
  std::string to_string() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<ExactScalar> data_;
};

ExactMatrix commutator(const ExactMatrix& a, const ExactMatrix& b);
ExactMatrix anticommutator(const ExactMatrix& a, const ExactMatrix& b);

/// Basis of the right null space {v : A v = 0}, one column per basis vector,
/// obtained from the exact reduced row echelon form.
ExactMatrix null_space(const ExactMatrix& a);

/// Rank by exact Gaussian elimination.
std::size_t rank(const ExactMatrix& a);

}  // namespace susyqm
