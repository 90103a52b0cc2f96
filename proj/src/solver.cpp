#include "unmix/solver.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "unmix/rng.hpp"

namespace unmix {

void SolverConfig::validate() const {
  if (k < 1) throw std::invalid_argument("config: k must be >= 1");
  if (lambda < 0.0) throw std::invalid_argument("config: lambda must be >= 0");
  if (loss == Loss::l2p && (!(p > 0.0) || p > 1.0))
    throw std::invalid_argument("config: p must be in (0,1]");
  if (sparsity == Sparsity::fixed && (fixed_p < 0.5 || fixed_p > 1.0))
    throw std::invalid_argument("config: fixed_p must be in [0.5,1]");
  if (!(xi > 0.0)) throw std::invalid_argument("config: xi must be positive");
  if (!(eps_guard > 0.0)) throw std::invalid_argument("config: eps_guard must be positive");
  if (!(phi > 0.0)) throw std::invalid_argument("config: phi must be positive");
  if (!(sigma > 0.0)) throw std::invalid_argument("config: sigma must be positive");
  if (q < 1) throw std::invalid_argument("config: q must be >= 1");
  if (inner_tol < 0.0 || outer_tol < 0.0)
    throw std::invalid_argument("config: tolerances must be >= 0");
  if (max_inner < 1 || max_outer < 1)
    throw std::invalid_argument("config: iteration caps must be >= 1");
}

RealVector channel_weights(const Matrix& x, const Matrix& m, const Matrix& a,
                           double eps_guard, double p) {
  if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("channel_weights: p must be in (0,1]");
  Matrix residual = sub(matmul(m, a), x);
  RealVector u(residual.rows(), 0.0);
  for (std::size_t l = 0; l < residual.rows(); ++l) {
    double s = 0.0;
    for (std::size_t n = 0; n < residual.cols(); ++n) s += residual(l, n) * residual(l, n);
    u[l] = (p / 2.0) * std::pow(s + eps_guard, (p - 2.0) / 2.0);
  }
  return u;
}

// Clamp denominators at phi; away from the guard the ratio is untouched, so
// exact factorizations stay exact fixed points.
static inline double guarded(double denom, double phi) {
  return denom > phi ? denom : phi;
}

Matrix update_m(const Matrix& m, const Matrix& a, const Matrix& x, const RealVector& u,
                double phi) {
  Matrix at = transpose(a);
  Matrix numer = matmul(x, at);           // X A^T
  Matrix denom = matmul(matmul(m, a), at);  // (M A) A^T, same association as numer
  Matrix out(m.rows(), m.cols());
  for (std::size_t l = 0; l < m.rows(); ++l)
    for (std::size_t k = 0; k < m.cols(); ++k)
      out(l, k) = m(l, k) * (u[l] * numer(l, k)) / guarded(u[l] * denom(l, k), phi);
  return out;
}

Matrix update_a(const Matrix& a, const Matrix& m, const Matrix& x, const RealVector& u,
                double lambda, const Matrix& h_mat, double xi, double phi) {
  Matrix mt = transpose(m);
  Matrix numer = matmul(mt, row_scale(x, u));           // M^T U X
  Matrix base = matmul(mt, row_scale(matmul(m, a), u));  // M^T U (M A)
  Matrix out(a.rows(), a.cols());
  for (std::size_t k = 0; k < a.rows(); ++k)
    for (std::size_t n = 0; n < a.cols(); ++n) {
      double pen = 0.0;
      if (lambda > 0.0)
        pen = lambda * (1.0 - h_mat(k, n)) * std::pow(a(k, n) + xi, -h_mat(k, n));
      out(k, n) = a(k, n) * numer(k, n) / guarded(base(k, n) + pen, phi);
    }
  return out;
}

void renormalize(Matrix& m, Matrix& a, NormMode mode) {
  for (std::size_t k = 0; k < a.rows(); ++k) {
    double s = 0.0;
    if (mode == NormMode::l1_rows) {
      for (std::size_t n = 0; n < a.cols(); ++n) s += a(k, n);
    } else {
      for (std::size_t n = 0; n < a.cols(); ++n) s += a(k, n) * a(k, n);
      s = std::sqrt(s);
    }
    if (s == 0.0) continue;
    for (std::size_t n = 0; n < a.cols(); ++n) a(k, n) /= s;
    for (std::size_t l = 0; l < m.rows(); ++l) m(l, k) *= s;
  }
}

ObjectiveValue objective(const Matrix& x, const Matrix& m, const Matrix& a, double lambda,
                         const Matrix& h_mat, double xi, Loss loss, double p) {
  Matrix residual = sub(x, matmul(m, a));
  ObjectiveValue out;
  switch (loss) {
    case Loss::frobenius: {
      double s = 0.0;
      for (std::size_t i = 0; i < residual.size(); ++i)
        s += residual.data()[i] * residual.data()[i];
      out.loss_term = 0.5 * s;
      break;
    }
    case Loss::l21:
      out.loss_term = 0.5 * norm_l2p(residual, 1.0);
      break;
    case Loss::l2p:
      out.loss_term = 0.5 * norm_l2p(residual, p);
      break;
  }
  out.penalty_term = lambda > 0.0 ? lambda * sparsity_penalty(a, h_mat, xi) : 0.0;
  out.total = out.loss_term + out.penalty_term;
  return out;
}

void init_factors(const Matrix& x, std::size_t k, std::uint64_t seed, InitStrategy strategy,
                  Matrix& m_out, Matrix& a_out) {
  if (k < 1) throw std::invalid_argument("init_factors: k must be >= 1");
  const std::size_t rows = x.rows();
  const std::size_t pixels = x.cols();
  Rng rng(seed);

  m_out = Matrix(rows, k);
  if (strategy == InitStrategy::pixel_sample) {
    if (k > pixels) throw std::invalid_argument("init_factors: k exceeds pixel count");
    std::vector<std::size_t> idx(pixels);
    for (std::size_t i = 0; i < pixels; ++i) idx[i] = i;
    for (std::size_t j = 0; j < k; ++j) {
      std::size_t pick = j + rng.index(pixels - j);
      std::swap(idx[j], idx[pick]);
    }
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t l = 0; l < rows; ++l) m_out(l, j) = x(l, idx[j]);
  } else {
    double mean = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) mean += x.data()[i];
    mean /= static_cast<double>(x.size());
    for (std::size_t l = 0; l < rows; ++l)
      for (std::size_t j = 0; j < k; ++j) m_out(l, j) = rng.uniform_open() * mean;
  }

  a_out = Matrix(k, pixels);
  for (std::size_t r = 0; r < k; ++r) {
    double sum = 0.0;
    for (std::size_t n = 0; n < pixels; ++n) {
      a_out(r, n) = rng.uniform_open();
      sum += a_out(r, n);
    }
    for (std::size_t n = 0; n < pixels; ++n) a_out(r, n) /= sum;
  }
}

Matrix normalize_columns_l1(const Matrix& a) {
  Matrix out = a;
  for (std::size_t n = 0; n < a.cols(); ++n) {
    double sum = 0.0;
    for (std::size_t k = 0; k < a.rows(); ++k) sum += a(k, n);
    if (sum <= 0.0) continue;
    for (std::size_t k = 0; k < a.rows(); ++k) out(k, n) /= sum;
  }
  return out;
}

namespace {

RealVector half_weights(std::size_t n) { return RealVector(n, 0.5); }

UnmixResult run_solver(const SpectralCube& cube, const SolverConfig& cfg, bool hat_form) {
  cfg.validate();
  const Matrix& x = cube.data;
  if (x.rows() != cube.channels || x.cols() != cube.pixels())
    throw std::invalid_argument("solve: cube data shape disagrees with header");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!(x.data()[i] >= 0.0) || !std::isfinite(x.data()[i]))
      throw std::invalid_argument("solve: cube must be nonnegative and finite");

  const std::size_t channels = x.rows();
  const double p_eff = cfg.loss == Loss::l2p ? cfg.p : 1.0;
  const double lambda_eff = cfg.sparsity == Sparsity::none ? 0.0 : cfg.lambda;

  UnmixResult res;
  res.config = cfg;
  init_factors(x, cfg.k, cfg.seed, cfg.init, res.m, res.a);

  switch (cfg.sparsity) {
    case Sparsity::learned:
      res.h = rescale_half(initial_guidance(cube, cfg.sigma));
      break;
    case Sparsity::fixed:
      res.h.values.assign(cube.pixels(), 1.0 - cfg.fixed_p);
      res.h.state = GuidanceMap::State::rescaled;
      break;
    case Sparsity::none:
      res.h.values.assign(cube.pixels(), 0.0);
      res.h.state = GuidanceMap::State::rescaled;
      break;
  }
  Matrix h_mat = build_h_matrix(res.h, cfg.k);

  auto eval = [&]() {
    return objective(x, res.m, res.a, lambda_eff, h_mat, cfg.xi, cfg.loss, cfg.p);
  };
  auto check_finite = [&](const ObjectiveValue& ov, std::size_t outer, std::size_t inner) {
    if (!std::isfinite(ov.total))
      throw std::runtime_error("solve: non-finite objective at outer " + std::to_string(outer) +
                               " inner " + std::to_string(inner) + " (loss=" +
                               std::to_string(ov.loss_term) + ", penalty=" +
                               std::to_string(ov.penalty_term) + ")");
  };
  auto rel_change = [](double prev, double cur) {
    double scale = std::fabs(prev);
    return std::fabs(prev - cur) / (scale > 0.0 ? scale : 1.0);
  };

  ObjectiveValue ov = eval();
  check_finite(ov, 0, 0);
  res.trace.push_back({0, 0, ov.total, ov.loss_term, ov.penalty_term, 0.0});
  double prev_outer_obj = ov.total;

  const bool refresh_h = cfg.sparsity == Sparsity::learned;
  std::size_t inner_limit = cfg.max_inner;
  if (refresh_h && cfg.cadence && cfg.q < inner_limit) inner_limit = cfg.q;

  for (std::size_t outer = 1; outer <= cfg.max_outer; ++outer) {
    double prev = ov.total;
    for (std::size_t inner = 1; inner <= inner_limit; ++inner) {
      RealVector u = cfg.loss == Loss::frobenius
                         ? half_weights(channels)
                         : channel_weights(x, res.m, res.a, cfg.eps_guard, p_eff);
      Matrix m_prev = res.m;
      Matrix a_prev = res.a;

      if (!hat_form) {
        res.a = update_a(res.a, res.m, x, u, lambda_eff, h_mat, cfg.xi, cfg.phi);
        res.m = update_m(res.m, res.a, x, u, cfg.phi);
      } else {
        RealVector sqrt_u(channels), ones(channels, 1.0);
        for (std::size_t l = 0; l < channels; ++l) sqrt_u[l] = std::sqrt(u[l]);
        Matrix m_hat = row_scale(res.m, sqrt_u);
        Matrix x_hat = row_scale(x, sqrt_u);
        res.a = update_a(res.a, m_hat, x_hat, ones, lambda_eff, h_mat, cfg.xi, cfg.phi);
        m_hat = update_m(m_hat, res.a, x_hat, ones, cfg.phi);
        for (std::size_t l = 0; l < channels; ++l)
          for (std::size_t k = 0; k < cfg.k; ++k) res.m(l, k) = m_hat(l, k) / sqrt_u[l];
      }
      renormalize(res.m, res.a, cfg.norm_mode);

      ov = eval();
      check_finite(ov, outer, inner);
      double max_change =
          std::max(max_abs_diff(res.m, m_prev), max_abs_diff(res.a, a_prev));
      res.trace.push_back({outer, inner, ov.total, ov.loss_term, ov.penalty_term, max_change});

      double rel = rel_change(prev, ov.total);
      prev = ov.total;
      if (rel < cfg.inner_tol) break;
    }

    if (refresh_h) {
      res.h = guidance_from_abundance(res.a);
      h_mat = build_h_matrix(res.h, cfg.k);
      ov = eval();
      check_finite(ov, outer, 0);
    }
    double rel_outer = rel_change(prev_outer_obj, ov.total);
    prev_outer_obj = ov.total;
    if (!refresh_h || rel_outer < cfg.outer_tol) break;
  }
  return res;
}

}  // namespace

UnmixResult solve(const SpectralCube& cube, const SolverConfig& config) {
  return run_solver(cube, config, false);
}

UnmixResult solve_hat_form(const SpectralCube& cube, const SolverConfig& config) {
  return run_solver(cube, config, true);
}

}  // namespace unmix
