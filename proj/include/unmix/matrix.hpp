#pragma once

#include <cstddef>
#include <vector>

namespace unmix {

using RealVector = std::vector<double>;

/// Dense row-major matrix of doubles. All reductions over its entries use a
/// fixed left-to-right accumulation order so results are bit-reproducible.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  bool all_finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Element-wise product. Throws std::invalid_argument on shape mismatch.
Matrix hadamard(const Matrix& a, const Matrix& b);

/// Entry (i,j) = base(i,j) ^ expo(i,j). Base entries must be nonnegative and
/// a zero base entry requires a positive exponent.
Matrix elem_pow(const Matrix& base, const Matrix& expo);

/// Euclidean norm of each row.
RealVector row_l2_norms(const Matrix& x);

/// Sum over rows of (row l2 norm)^p, 0 < p <= 1. p = 1 is the l2,1 norm.
double norm_l2p(const Matrix& x, double p);

/// Standard product with deterministic left-to-right dot products.
Matrix matmul(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& m);
Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);

/// diag(w) * m, i.e. row i scaled by w[i].
Matrix row_scale(const Matrix& m, const RealVector& w);

double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace unmix
