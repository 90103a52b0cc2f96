#include "unmix/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace unmix {

double sad(const RealVector& m, const RealVector& m_hat) {
  if (m.size() != m_hat.size()) throw std::invalid_argument("sad: length mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    dot += m[i] * m_hat[i];
    na += m[i] * m[i];
    nb += m_hat[i] * m_hat[i];
  }
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("sad: zero vector");
  double c = dot / (std::sqrt(na) * std::sqrt(nb));
  c = std::clamp(c, -1.0, 1.0);
  return std::acos(c);
}

double rmse(const RealVector& a, const RealVector& a_hat) {
  if (a.size() != a_hat.size()) throw std::invalid_argument("rmse: length mismatch");
  if (a.empty()) throw std::invalid_argument("rmse: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - a_hat[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(a.size()));
}

// O(n^3) Hungarian algorithm with row/column potentials.
std::vector<std::size_t> min_cost_assignment(const Matrix& cost) {
  if (cost.rows() != cost.cols()) throw std::invalid_argument("assignment: square matrix required");
  const std::size_t n = cost.rows();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, n);  // column -> row (n = unmatched)
  std::vector<std::size_t> way(n + 1, n);

  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    std::size_t j0 = n;  // virtual column holding row i
    match[j0] = i;
    do {
      used[j0] = 1;
      std::size_t i0 = match[j0], j1 = n;
      double delta = inf;
      for (std::size_t j = 0; j < n; ++j) {
        if (used[j]) continue;
        double cur = cost(i0, j) - u[i0 == n ? n : i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != n);
    // augment along the alternating path
    do {
      std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != n);
  }

  std::vector<std::size_t> row_to_col(n, n);
  for (std::size_t j = 0; j < n; ++j)
    if (match[j] < n) row_to_col[match[j]] = j;
  return row_to_col;
}

std::vector<std::size_t> match_endmembers(const Matrix& m_true, const Matrix& m_est) {
  if (!m_true.same_shape(m_est))
    throw std::invalid_argument("match_endmembers: shape mismatch");
  const std::size_t k = m_true.cols();
  if (k > 12) throw std::invalid_argument("match_endmembers: K > 12 unsupported");

  Matrix cost(k, k);
  RealVector col_t(m_true.rows()), col_e(m_true.rows());
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t l = 0; l < m_true.rows(); ++l) col_t[l] = m_true(l, i);
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t l = 0; l < m_est.rows(); ++l) col_e[l] = m_est(l, j);
      cost(i, j) = sad(col_t, col_e);
    }
  }
  return min_cost_assignment(cost);
}

EvalReport evaluate(const Matrix& m_true, const Matrix& a_true, const Matrix& m_est,
                    const Matrix& a_est) {
  if (!m_true.same_shape(m_est) || !a_true.same_shape(a_est))
    throw std::invalid_argument("evaluate: shape mismatch between truth and estimate");
  if (m_true.cols() != a_true.rows())
    throw std::invalid_argument("evaluate: endmember/abundance K mismatch");

  EvalReport rep;
  rep.assignment = match_endmembers(m_true, m_est);
  const std::size_t k = m_true.cols();
  rep.sad.resize(k);
  rep.rmse.resize(k);
  RealVector col_t(m_true.rows()), col_e(m_true.rows());
  RealVector row_t(a_true.cols()), row_e(a_true.cols());
  double sad_sum = 0.0, rmse_sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = rep.assignment[i];
    for (std::size_t l = 0; l < m_true.rows(); ++l) {
      col_t[l] = m_true(l, i);
      col_e[l] = m_est(l, j);
    }
    for (std::size_t n = 0; n < a_true.cols(); ++n) {
      row_t[n] = a_true(i, n);
      row_e[n] = a_est(j, n);
    }
    rep.sad[i] = sad(col_t, col_e);
    rep.rmse[i] = rmse(row_t, row_e);
    sad_sum += rep.sad[i];
    rmse_sum += rep.rmse[i];
  }
  rep.mean_sad = sad_sum / static_cast<double>(k);
  rep.mean_rmse = rmse_sum / static_cast<double>(k);
  return rep;
}

}  // namespace unmix
