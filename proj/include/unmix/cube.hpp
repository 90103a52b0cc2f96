#pragma once

#include <vector>

#include "unmix/matrix.hpp"

namespace unmix {

/// A hyperspectral image stored channel-major: data is L x N with pixel index
/// n = row * width + col.
struct SpectralCube {
  std::size_t channels = 0;
  std::size_t width = 0;
  std::size_t height = 0;
  Matrix data;  // channels x (width*height)
  std::vector<double> wavelengths;  // optional, empty or size == channels

  std::size_t pixels() const { return width * height; }
};

}  // namespace unmix
