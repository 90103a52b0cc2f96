#pragma once

#include <vector>

#include "unmix/matrix.hpp"

namespace unmix {

struct EvalReport {
  std::vector<std::size_t> assignment;  // truth index k -> estimated column assignment[k]
  RealVector sad;                       // radians, per matched endmember
  RealVector rmse;
  double mean_sad = 0.0;
  double mean_rmse = 0.0;
};

/// Spectral angle distance: arccos of the cosine similarity, cosine clamped to
/// [-1, 1]. Throws on zero vectors or length mismatch.
double sad(const RealVector& m, const RealVector& m_hat);

/// sqrt(mean squared difference). Throws on length mismatch or empty input.
double rmse(const RealVector& a, const RealVector& a_hat);

/// Bijection from truth columns to estimated columns minimizing total SAD,
/// via optimal assignment on the pairwise SAD cost matrix. Supports K <= 12.
std::vector<std::size_t> match_endmembers(const Matrix& m_true, const Matrix& m_est);

/// Match endmembers by SAD, then score per-endmember SAD (columns of M) and
/// RMSE (rows of A) under that matching.
EvalReport evaluate(const Matrix& m_true, const Matrix& a_true, const Matrix& m_est,
                    const Matrix& a_est);

/// Minimum-cost assignment on a square cost matrix (Hungarian algorithm).
/// Returns row -> column.
std::vector<std::size_t> min_cost_assignment(const Matrix& cost);

}  // namespace unmix
