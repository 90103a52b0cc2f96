#include "unmix/sparsity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace unmix {

double gini(const RealVector& a) {
  if (a.empty()) throw std::invalid_argument("gini: empty vector");
  double l1 = 0.0;
  for (double v : a) {
    if (v < 0.0) throw std::invalid_argument("gini: negative entry");
    l1 += v;
  }
  if (l1 == 0.0) throw std::invalid_argument("gini: all-zero vector");

  RealVector sorted = a;
  std::stable_sort(sorted.begin(), sorted.end());
  const double k_count = static_cast<double>(sorted.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    double rank = static_cast<double>(k + 1);  // 1-based, ascending
    acc += (sorted[k] / l1) * ((k_count - rank + 0.5) / k_count);
  }
  return 1.0 - 2.0 * acc;
}

GuidanceMap initial_guidance(const SpectralCube& cube, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("initial_guidance: sigma must be positive");
  const std::size_t w = cube.width;
  const std::size_t h = cube.height;
  if (w < 1 || h < 1) throw std::invalid_argument("initial_guidance: empty grid");
  const Matrix& x = cube.data;
  const std::size_t channels = x.rows();

  auto sq_dist = [&](std::size_t n1, std::size_t n2) {
    double s = 0.0;
    for (std::size_t l = 0; l < channels; ++l) {
      double d = x(l, n1) - x(l, n2);
      s += d * d;
    }
    return s;
  };

  GuidanceMap out;
  out.state = GuidanceMap::State::raw;
  out.values.assign(w * h, 0.0);
  // mirror reflection: an out-of-grid neighbor is the pixel itself
  const long dr[4] = {-1, 1, 0, 0};
  const long dc[4] = {0, 0, -1, 1};
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const std::size_t n = r * w + c;
      double sum = 0.0;
      for (int d = 0; d < 4; ++d) {
        long rr = static_cast<long>(r) + dr[d];
        long cc = static_cast<long>(c) + dc[d];
        if (rr < 0 || rr >= static_cast<long>(h) || cc < 0 || cc >= static_cast<long>(w)) {
          sum += 1.0;  // exp(0)
          continue;
        }
        std::size_t j = static_cast<std::size_t>(rr) * w + static_cast<std::size_t>(cc);
        sum += std::exp(-sq_dist(j, n) / sigma);
      }
      out.values[n] = sum;
    }
  }
  return out;
}

GuidanceMap rescale_half(const GuidanceMap& h) {
  GuidanceMap out;
  out.state = GuidanceMap::State::rescaled;
  out.values.assign(h.values.size(), 0.0);
  if (h.values.empty()) return out;
  double lo = h.values[0], hi = h.values[0];
  for (double v : h.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi == lo) return out;  // degenerate: uninformative map, weakest constraint
  const double denom = 2.0 * (hi - lo);
  for (std::size_t n = 0; n < h.values.size(); ++n) out.values[n] = (h.values[n] - lo) / denom;
  return out;
}

GuidanceMap guidance_from_abundance(const Matrix& a) {
  GuidanceMap raw;
  raw.state = GuidanceMap::State::raw;
  raw.values.assign(a.cols(), 0.0);
  RealVector column(a.rows());
  for (std::size_t n = 0; n < a.cols(); ++n) {
    double sum = 0.0;
    for (std::size_t k = 0; k < a.rows(); ++k) {
      column[k] = a(k, n);
      sum += column[k];
    }
    raw.values[n] = sum > 0.0 ? gini(column) : 0.0;
  }
  return rescale_half(raw);
}

Matrix build_h_matrix(const GuidanceMap& h, std::size_t k) {
  if (h.state != GuidanceMap::State::rescaled)
    throw std::invalid_argument("build_h_matrix: guidance map must be rescaled");
  Matrix out(k, h.values.size());
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t n = 0; n < h.values.size(); ++n) out(r, n) = h.values[n];
  return out;
}

double sparsity_penalty(const Matrix& a, const Matrix& h_mat, double xi) {
  if (!a.same_shape(h_mat)) throw std::invalid_argument("sparsity_penalty: shape mismatch");
  if (!(xi > 0.0)) throw std::invalid_argument("sparsity_penalty: xi must be positive");
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    total += std::pow(a.data()[i] + xi, 1.0 - h_mat.data()[i]);
  return total;
}

}  // namespace unmix
