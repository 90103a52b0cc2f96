#pragma once

#include <string>

#include "unmix/cube.hpp"
#include "unmix/matrix.hpp"
#include "unmix/metrics.hpp"
#include "unmix/solver.hpp"

namespace unmix {

/// All formats are plain text. Writers emit 17 significant digits so that
/// write-then-read round-trips are value-exact.

/// "HSC1 <L> <W> <H>" header line, then L lines of N whitespace-separated
/// reals (channel row l). Rejects negatives, NaN, and count mismatches with a
/// line-numbered error.
SpectralCube read_cube(const std::string& path);
void write_cube(const SpectralCube& cube, const std::string& path);

/// Comma-separated, one matrix row per line, no header.
Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const Matrix& m, const std::string& path);

/// Plain P3 PPM, pixel color = sum_k A_kn * palette_k with the palette order
/// red, blue, green, black plus four fixed extension colors. K <= 8.
void write_abundance_ppm(const Matrix& a, std::size_t w, std::size_t h,
                         const std::string& path);

/// Grayscale P3 image of per-pixel abundance error ||a_n - a_hat_n||, scaled
/// so the maximum error maps to 255.
void write_error_ppm(const Matrix& a_true, const Matrix& a_est, std::size_t w, std::size_t h,
                     const std::string& path);

/// Grayscale P3 image of a rescaled guidance map; value 0.5 maps to 255.
void write_guidance_ppm(const GuidanceMap& h, std::size_t w, std::size_t height,
                        const std::string& path);

/// CSV with header outer,inner,objective,loss,penalty,max_change.
void write_trace_csv(const SolveTrace& trace, const std::string& path);

/// Flat key-value document; read_report round-trips it.
void write_report(const EvalReport& report, const std::string& path);
EvalReport read_report(const std::string& path);

}  // namespace unmix
