#include "unmix/matrix.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace unmix {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool Matrix::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

static void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (!a.same_shape(b))
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                " vs " + std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()));
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "hadamard");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] * b.data()[i];
  return out;
}

Matrix elem_pow(const Matrix& base, const Matrix& expo) {
  require_same_shape(base, expo, "elem_pow");
  Matrix out(base.rows(), base.cols());
  for (std::size_t i = 0; i < base.size(); ++i) {
    double b = base.data()[i];
    double e = expo.data()[i];
    if (b < 0.0) throw std::invalid_argument("elem_pow: negative base entry");
    if (b == 0.0 && e <= 0.0)
      throw std::invalid_argument("elem_pow: zero base with nonpositive exponent");
    out.data()[i] = std::pow(b, e);
  }
  return out;
}

RealVector row_l2_norms(const Matrix& x) {
  RealVector out(x.rows(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) s += x(i, j) * x(i, j);
    out[i] = std::sqrt(s);
  }
  return out;
}

double norm_l2p(const Matrix& x, double p) {
  if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("norm_l2p: p must be in (0,1]");
  RealVector norms = row_l2_norms(x);
  double total = 0.0;
  if (p == 1.0) {
    for (double n : norms) total += n;
  } else {
    for (double n : norms) total += std::pow(n, p);
  }
  return total;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("matmul: inner dimensions " + std::to_string(a.cols()) +
                                " vs " + std::to_string(b.rows()));
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  return out;
}

Matrix transpose(const Matrix& m) {
  Matrix out(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = m(i, j);
  return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "add");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] + b.data()[i];
  return out;
}

Matrix sub(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "sub");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] - b.data()[i];
  return out;
}

Matrix row_scale(const Matrix& m, const RealVector& w) {
  if (w.size() != m.rows()) throw std::invalid_argument("row_scale: weight length mismatch");
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = w[i] * m(i, j);
  return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double mx = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = std::fabs(a.data()[i] - b.data()[i]);
    if (d > mx) mx = d;
  }
  return mx;
}

}  // namespace unmix
