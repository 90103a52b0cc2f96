#pragma once

#include <cstdint>
#include <vector>

#include "unmix/cube.hpp"
#include "unmix/matrix.hpp"
#include "unmix/sparsity.hpp"

namespace unmix {

enum class Loss { frobenius, l21, l2p };
enum class Sparsity { none, fixed, learned };
enum class NormMode { l1_rows, l2_rows };
enum class InitStrategy { random, pixel_sample };

struct SolverConfig {
  std::size_t k = 2;
  double lambda = 0.1;
  Loss loss = Loss::l21;
  double p = 0.9;          // used when loss == l2p
  Sparsity sparsity = Sparsity::learned;
  double fixed_p = 0.5;    // used when sparsity == fixed
  double xi = 1e-6;
  double eps_guard = 1e-8;
  double phi = 1e-8;
  double sigma = 0.02;
  std::size_t q = 10;      // guidance refresh cadence (inner iterations)
  bool cadence = true;     // cap inner phases at q; otherwise run to max_inner
  double inner_tol = 1e-6;
  double outer_tol = 1e-6;
  std::size_t max_inner = 300;
  std::size_t max_outer = 10;
  std::uint64_t seed = 0;
  NormMode norm_mode = NormMode::l1_rows;
  InitStrategy init = InitStrategy::random;

  void validate() const;  // throws std::invalid_argument on out-of-range fields
};

struct TraceRecord {
  std::size_t outer = 0;
  std::size_t inner = 0;
  double objective = 0.0;
  double loss_term = 0.0;
  double penalty_term = 0.0;
  double max_change = 0.0;
};

using SolveTrace = std::vector<TraceRecord>;

struct UnmixResult {
  Matrix m;        // endmembers, L x K
  Matrix a;        // abundances, K x N
  GuidanceMap h;   // rescaled guidance map
  SolveTrace trace;
  SolverConfig config;
};

struct ObjectiveValue {
  double total = 0.0;
  double loss_term = 0.0;
  double penalty_term = 0.0;
};

/// Diagonal of the channel-weight matrix: entry l is
/// (p/2) * (||residual row l||^2 + eps)^((p-2)/2). p = 1 gives the inverse
/// row-norm weights; eps keeps zero-residual rows finite.
RealVector channel_weights(const Matrix& x, const Matrix& m, const Matrix& a,
                           double eps_guard, double p);

/// M_lk <- M_lk * (U X A^T)_lk / (U M A A^T)_lk. Denominators below phi are
/// clamped to phi (applied before the row weights so the clamp commutes with
/// the hat-form updates).
Matrix update_m(const Matrix& m, const Matrix& a, const Matrix& x, const RealVector& u,
                double phi);

/// A_kn <- A_kn * (M^T U X)_kn /
///         (M^T U M A + lambda (1 - H) o (A + xi)^(-H))_kn, clamped at phi.
Matrix update_a(const Matrix& a, const Matrix& m, const Matrix& x, const RealVector& u,
                double lambda, const Matrix& h_mat, double xi, double phi);

/// Scale each row of A to unit norm (l1 or l2) and the matching column of M by
/// the inverse factor; M*A is unchanged. All-zero rows are left alone.
void renormalize(Matrix& m, Matrix& a, NormMode mode);

/// Objective split into loss and penalty terms. lambda == 0 skips the penalty.
ObjectiveValue objective(const Matrix& x, const Matrix& m, const Matrix& a, double lambda,
                         const Matrix& h_mat, double xi, Loss loss, double p);

/// Seeded factor initialization. random: M ~ U(0,1] scaled by the grand mean
/// of X, A ~ U(0,1] with rows l1-normalized. pixel_sample: M columns are k
/// distinct pixels of X.
void init_factors(const Matrix& x, std::size_t k, std::uint64_t seed, InitStrategy strategy,
                  Matrix& m_out, Matrix& a_out);

/// Alternating multiplicative solve with guidance-map refreshes between inner
/// phases. Throws std::runtime_error if the objective turns non-finite.
UnmixResult solve(const SpectralCube& cube, const SolverConfig& config);

/// Same driver but factored through Uhat = U^{1/2}: updates run on
/// Mhat = U^{1/2} M and Xhat = U^{1/2} X. Exists to check the equivalence of
/// the two update forms.
UnmixResult solve_hat_form(const SpectralCube& cube, const SolverConfig& config);

/// Scale every column of A to unit l1 sum (zero columns untouched).
/// Reporting aid only; the solver never applies it.
Matrix normalize_columns_l1(const Matrix& a);

}  // namespace unmix
