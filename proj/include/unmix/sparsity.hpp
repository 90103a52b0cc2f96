#pragma once

#include "unmix/cube.hpp"
#include "unmix/matrix.hpp"

namespace unmix {

/// Per-pixel mixedness scores. Raw maps come straight from the spatial
/// heuristic or the Gini measure; rescaled maps live in [0, 0.5] and are the
/// only form the solver consumes.
struct GuidanceMap {
  enum class State { raw, rescaled };
  RealVector values;
  State state = State::raw;
};

/// Gini sparsity index of a nonnegative vector, in [0, 1). Uniform vectors
/// score 0, one-hot vectors score (K-1)/K. Throws on all-zero input.
double gini(const RealVector& a);

/// Spatial heuristic: h_i = sum over the 4-neighborhood of
/// exp(-||x_j - x_i||^2 / sigma). Out-of-grid neighbors mirror back to the
/// pixel itself and contribute similarity 1.
GuidanceMap initial_guidance(const SpectralCube& cube, double sigma);

/// Affine map of the values onto [0, 0.5]; a constant map becomes all zeros.
GuidanceMap rescale_half(const GuidanceMap& h);

/// Gini of each abundance column (all-zero columns map to 0), then rescaled.
GuidanceMap guidance_from_abundance(const Matrix& a);

/// K x N matrix with every row equal to h.
Matrix build_h_matrix(const GuidanceMap& h, std::size_t k);

/// sum_{k,n} (A_kn + xi)^(1 - H_kn); the caller multiplies by lambda.
double sparsity_penalty(const Matrix& a, const Matrix& h_mat, double xi);

}  // namespace unmix
