#pragma once

#include <cstdint>
#include <vector>

#include "unmix/cube.hpp"
#include "unmix/matrix.hpp"
#include "unmix/sparsity.hpp"

namespace unmix {

enum class OutlierKind { blank, heavy_noise };

struct SceneSpec {
  std::size_t width = 20;
  std::size_t height = 20;
  std::size_t channels = 30;
  std::size_t endmembers = 3;
  double noise_sigma = 0.0;
  double outlier_fraction = 0.0;
  OutlierKind outlier_kind = OutlierKind::blank;
  std::size_t blur_radius = 1;
  std::uint64_t seed = 0;

  std::size_t pixels() const { return width * height; }
  void validate() const;
};

struct GroundTruth {
  Matrix m_true;  // L x K
  Matrix a_true;  // K x N, columns sum to 1
  std::vector<std::size_t> outlier_channels;
  GuidanceMap h_true;  // rescaled Gini of the true abundance columns
};

/// K smooth nonnegative spectra of length L, each a sum of 2-4 seeded Gaussian
/// bumps, peak-normalized to 1. Pairwise SAD >= 0.15 enforced by rejection
/// resampling; throws after 1000 failed attempts.
Matrix gen_endmembers(std::size_t l, std::size_t k, std::uint64_t seed);

/// Seeded Voronoi partition of the grid, box-blurred by blur_radius, columns
/// renormalized to sum 1. Pure cores with mixed transition bands.
Matrix gen_abundances(const SceneSpec& spec);

/// X = M*A plus seeded Gaussian noise clipped at 0, with
/// floor(outlier_fraction * L) channel rows corrupted per outlier_kind.
void assemble_cube(const Matrix& m, const Matrix& a, const SceneSpec& spec,
                   SpectralCube& cube_out, GroundTruth& truth_out);

/// gen_endmembers + gen_abundances + assemble_cube in one call.
void make_scene(const SceneSpec& spec, SpectralCube& cube_out, GroundTruth& truth_out);

}  // namespace unmix
