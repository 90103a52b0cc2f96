#include "unmix/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "unmix/metrics.hpp"
#include "unmix/rng.hpp"

namespace unmix {

void SceneSpec::validate() const {
  if (width < 1 || height < 1) throw std::invalid_argument("scene: empty grid");
  if (endmembers < 1) throw std::invalid_argument("scene: endmembers must be >= 1");
  if (endmembers > std::min(channels, pixels()))
    throw std::invalid_argument("scene: endmembers must be <= min(channels, pixels)");
  if (noise_sigma < 0.0) throw std::invalid_argument("scene: noise_sigma must be >= 0");
  if (outlier_fraction < 0.0 || outlier_fraction >= 1.0)
    throw std::invalid_argument("scene: outlier_fraction must be in [0,1)");
}

Matrix gen_endmembers(std::size_t l, std::size_t k, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("gen_endmembers: k must be >= 1");
  if (l < 4 * k) throw std::invalid_argument("gen_endmembers: need L >= 4K channels");
  Rng rng(seed);
  const double min_sad = 0.15;

  Matrix m(l, k);
  std::vector<RealVector> accepted;
  std::size_t attempts = 0;
  while (accepted.size() < k) {
    if (++attempts > 1000)
      throw std::runtime_error("gen_endmembers: could not place distinct spectra");
    std::size_t bumps = 2 + rng.index(3);  // 2..4
    RealVector spec(l, 0.0);
    for (std::size_t b = 0; b < bumps; ++b) {
      double center = rng.uniform(0.0, static_cast<double>(l - 1));
      double width = rng.uniform(static_cast<double>(l) / 20.0, static_cast<double>(l) / 8.0);
      double amp = rng.uniform(0.3, 1.0);
      for (std::size_t i = 0; i < l; ++i) {
        double d = (static_cast<double>(i) - center) / width;
        spec[i] += amp * std::exp(-0.5 * d * d);
      }
    }
    double peak = *std::max_element(spec.begin(), spec.end());
    for (double& v : spec) v /= peak;

    bool distinct = true;
    for (const RealVector& other : accepted)
      if (sad(spec, other) < min_sad) {
        distinct = false;
        break;
      }
    if (distinct) accepted.push_back(std::move(spec));
  }
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < l; ++i) m(i, j) = accepted[j][i];
  return m;
}

Matrix gen_abundances(const SceneSpec& spec) {
  spec.validate();
  const std::size_t w = spec.width, h = spec.height, k = spec.endmembers;
  const std::size_t n = spec.pixels();
  Rng rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);  // distinct stream from the endmember draw

  // Voronoi sites, distinct pixels
  std::vector<std::size_t> sites;
  while (sites.size() < k) {
    std::size_t cand = rng.index(n);
    if (std::find(sites.begin(), sites.end(), cand) == sites.end()) sites.push_back(cand);
  }

  std::vector<std::size_t> label(n, 0);
  for (std::size_t px = 0; px < n; ++px) {
    double rr = static_cast<double>(px / w), cc = static_cast<double>(px % w);
    double best = -1.0;
    for (std::size_t j = 0; j < k; ++j) {
      double sr = static_cast<double>(sites[j] / w), sc = static_cast<double>(sites[j] % w);
      double d = (rr - sr) * (rr - sr) + (cc - sc) * (cc - sc);
      if (best < 0.0 || d < best) {  // ties keep the lowest site index
        best = d;
        label[px] = j;
      }
    }
  }

  // box blur of the indicator maps, window clamped at the border
  const long r = static_cast<long>(spec.blur_radius);
  Matrix a(k, n);
  for (std::size_t px = 0; px < n; ++px) {
    long pr = static_cast<long>(px / w), pc = static_cast<long>(px % w);
    long r0 = std::max(0L, pr - r), r1 = std::min(static_cast<long>(h) - 1, pr + r);
    long c0 = std::max(0L, pc - r), c1 = std::min(static_cast<long>(w) - 1, pc + r);
    double count = static_cast<double>((r1 - r0 + 1) * (c1 - c0 + 1));
    for (long rr = r0; rr <= r1; ++rr)
      for (long cc = c0; cc <= c1; ++cc) {
        std::size_t q = static_cast<std::size_t>(rr) * w + static_cast<std::size_t>(cc);
        a(label[q], px) += 1.0 / count;
      }
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) sum += a(j, px);
    for (std::size_t j = 0; j < k; ++j) a(j, px) /= sum;
  }
  return a;
}

void assemble_cube(const Matrix& m, const Matrix& a, const SceneSpec& spec,
                   SpectralCube& cube_out, GroundTruth& truth_out) {
  spec.validate();
  if (m.cols() != a.rows()) throw std::invalid_argument("assemble_cube: K mismatch");
  if (m.rows() != spec.channels || a.cols() != spec.pixels())
    throw std::invalid_argument("assemble_cube: shapes disagree with the scene spec");

  Rng rng(spec.seed ^ 0xd1b54a32d192ed03ULL);
  Matrix x = matmul(m, a);
  if (spec.noise_sigma > 0.0) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      double v = x.data()[i] + spec.noise_sigma * rng.gaussian();
      x.data()[i] = v < 0.0 ? 0.0 : v;
    }
  }

  const std::size_t l = spec.channels;
  const std::size_t bad =
      static_cast<std::size_t>(spec.outlier_fraction * static_cast<double>(l));
  std::vector<std::size_t> rows(l);
  for (std::size_t i = 0; i < l; ++i) rows[i] = i;
  for (std::size_t j = 0; j < bad; ++j) {
    std::size_t pick = j + rng.index(l - j);
    std::swap(rows[j], rows[pick]);
  }
  std::vector<std::size_t> corrupted(rows.begin(), rows.begin() + bad);
  std::sort(corrupted.begin(), corrupted.end());

  Matrix clean = matmul(m, a);
  for (std::size_t row : corrupted) {
    if (spec.outlier_kind == OutlierKind::blank) {
      for (std::size_t n = 0; n < x.cols(); ++n) x(row, n) = 0.0;
    } else {
      // uniform noise with amplitude 3x the clean row maximum
      double row_max = 0.0;
      for (std::size_t n = 0; n < clean.cols(); ++n) row_max = std::max(row_max, clean(row, n));
      for (std::size_t n = 0; n < x.cols(); ++n) x(row, n) = rng.uniform01() * 3.0 * row_max;
    }
  }

  cube_out.channels = spec.channels;
  cube_out.width = spec.width;
  cube_out.height = spec.height;
  cube_out.data = std::move(x);
  cube_out.wavelengths.clear();

  truth_out.m_true = m;
  truth_out.a_true = a;
  truth_out.outlier_channels = std::move(corrupted);
  truth_out.h_true = guidance_from_abundance(a);
}

void make_scene(const SceneSpec& spec, SpectralCube& cube_out, GroundTruth& truth_out) {
  Matrix m = gen_endmembers(spec.channels, spec.endmembers, spec.seed);
  Matrix a = gen_abundances(spec);
  assemble_cube(m, a, spec, cube_out, truth_out);
}

}  // namespace unmix
