#include "unmix/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace unmix {

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return in;
}

[[noreturn]] void parse_fail(const std::string& path, std::size_t line, const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

int to_gray255(double v) {
  long g = std::lround(v * 255.0);
  if (g < 0) g = 0;
  if (g > 255) g = 255;
  return static_cast<int>(g);
}

}  // namespace

SpectralCube read_cube(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) parse_fail(path, 1, "missing header");
  std::istringstream hdr(line);
  std::string magic;
  SpectralCube cube;
  if (!(hdr >> magic >> cube.channels >> cube.width >> cube.height) || magic != "HSC1")
    parse_fail(path, 1, "malformed header, expected 'HSC1 <L> <W> <H>'");
  if (cube.channels == 0 || cube.width == 0 || cube.height == 0)
    parse_fail(path, 1, "dimensions must be positive");

  const std::size_t n = cube.pixels();
  cube.data = Matrix(cube.channels, n);
  for (std::size_t l = 0; l < cube.channels; ++l) {
    if (!std::getline(in, line)) parse_fail(path, l + 2, "missing channel row");
    std::istringstream row(line);
    double v;
    std::size_t count = 0;
    while (row >> v) {
      if (count >= n) parse_fail(path, l + 2, "too many values, expected " + std::to_string(n));
      if (std::isnan(v)) parse_fail(path, l + 2, "NaN entry");
      if (v < 0.0) parse_fail(path, l + 2, "negative entry");
      cube.data(l, count++) = v;
    }
    if (!row.eof()) parse_fail(path, l + 2, "invalid number");
    if (count != n)
      parse_fail(path, l + 2, "expected " + std::to_string(n) + " values, got " +
                                  std::to_string(count));
  }
  return cube;
}

void write_cube(const SpectralCube& cube, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "HSC1 " << cube.channels << " " << cube.width << " " << cube.height << "\n";
  for (std::size_t l = 0; l < cube.channels; ++l) {
    for (std::size_t n = 0; n < cube.pixels(); ++n) {
      if (n) out << ' ';
      out << fmt17(cube.data(l, n));
    }
    out << '\n';
  }
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() && in.eof()) break;
    std::vector<double> row;
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        double v = std::stod(cell, &used);
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
        if (used != cell.size()) throw std::invalid_argument(cell);
        row.push_back(v);
      } catch (const std::exception&) {
        parse_fail(path, lineno, "invalid number '" + cell + "'");
      }
    }
    if (row.empty()) parse_fail(path, lineno, "empty row");
    if (!rows.empty() && row.size() != rows.front().size())
      parse_fail(path, lineno, "ragged row: expected " + std::to_string(rows.front().size()) +
                                   " columns, got " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) parse_fail(path, 1, "empty matrix");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

void write_matrix_csv(const Matrix& m, const std::string& path) {
  std::ofstream out = open_out(path);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << fmt17(m(i, j));
    }
    out << '\n';
  }
}

void write_abundance_ppm(const Matrix& a, std::size_t w, std::size_t h,
                         const std::string& path) {
  static const int palette[8][3] = {
      {255, 0, 0},    // red
      {0, 0, 255},    // blue
      {0, 255, 0},    // green
      {0, 0, 0},      // black
      {255, 255, 0},  // yellow
      {0, 255, 255},  // cyan
      {255, 0, 255},  // magenta
      {255, 165, 0},  // orange
  };
  if (a.rows() > 8) throw std::invalid_argument("write_abundance_ppm: K exceeds the palette");
  if (a.cols() != w * h) throw std::invalid_argument("write_abundance_ppm: size mismatch");

  std::ofstream out = open_out(path);
  out << "P3\n" << w << " " << h << "\n255\n";
  for (std::size_t n = 0; n < a.cols(); ++n) {
    double rgb[3] = {0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < a.rows(); ++k)
      for (int c = 0; c < 3; ++c) rgb[c] += a(k, n) * palette[k][c];
    for (int c = 0; c < 3; ++c) {
      long v = std::lround(rgb[c]);
      if (v < 0) v = 0;
      if (v > 255) v = 255;
      out << v << (c < 2 ? ' ' : '\n');
    }
  }
}

void write_error_ppm(const Matrix& a_true, const Matrix& a_est, std::size_t w, std::size_t h,
                     const std::string& path) {
  if (!a_true.same_shape(a_est)) throw std::invalid_argument("write_error_ppm: shape mismatch");
  if (a_true.cols() != w * h) throw std::invalid_argument("write_error_ppm: size mismatch");

  RealVector err(a_true.cols(), 0.0);
  double max_err = 0.0;
  for (std::size_t n = 0; n < a_true.cols(); ++n) {
    double s = 0.0;
    for (std::size_t k = 0; k < a_true.rows(); ++k) {
      double d = a_true(k, n) - a_est(k, n);
      s += d * d;
    }
    err[n] = std::sqrt(s);
    max_err = std::max(max_err, err[n]);
  }

  std::ofstream out = open_out(path);
  out << "P3\n" << w << " " << h << "\n255\n";
  for (std::size_t n = 0; n < err.size(); ++n) {
    int g = max_err > 0.0 ? to_gray255(err[n] / max_err) : 0;
    out << g << ' ' << g << ' ' << g << '\n';
  }
}

void write_guidance_ppm(const GuidanceMap& h, std::size_t w, std::size_t height,
                        const std::string& path) {
  if (h.state != GuidanceMap::State::rescaled)
    throw std::invalid_argument("write_guidance_ppm: map must be rescaled");
  if (h.values.size() != w * height)
    throw std::invalid_argument("write_guidance_ppm: size mismatch");
  std::ofstream out = open_out(path);
  out << "P3\n" << w << " " << height << "\n255\n";
  for (double v : h.values) {
    int g = to_gray255(v / 0.5);
    out << g << ' ' << g << ' ' << g << '\n';
  }
}

void write_trace_csv(const SolveTrace& trace, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "outer,inner,objective,loss,penalty,max_change\n";
  for (const TraceRecord& r : trace)
    out << r.outer << ',' << r.inner << ',' << fmt17(r.objective) << ',' << fmt17(r.loss_term)
        << ',' << fmt17(r.penalty_term) << ',' << fmt17(r.max_change) << '\n';
}

void write_report(const EvalReport& report, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "k = " << report.assignment.size() << '\n';
  out << "assignment =";
  for (std::size_t j : report.assignment) out << ' ' << j;
  out << '\n';
  for (std::size_t i = 0; i < report.sad.size(); ++i)
    out << "sad_" << i << " = " << fmt17(report.sad[i]) << '\n';
  for (std::size_t i = 0; i < report.rmse.size(); ++i)
    out << "rmse_" << i << " = " << fmt17(report.rmse[i]) << '\n';
  out << "mean_sad = " << fmt17(report.mean_sad) << '\n';
  out << "mean_rmse = " << fmt17(report.mean_rmse) << '\n';
}

EvalReport read_report(const std::string& path) {
  std::ifstream in = open_in(path);
  EvalReport rep;
  std::string line;
  std::size_t lineno = 0;
  std::size_t k = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto eq = line.find('=');
    if (eq == std::string::npos) parse_fail(path, lineno, "expected 'key = value'");
    std::string key = line.substr(0, eq);
    while (!key.empty() && key.back() == ' ') key.pop_back();
    std::istringstream val(line.substr(eq + 1));
    if (key == "k") {
      val >> k;
      rep.sad.assign(k, 0.0);
      rep.rmse.assign(k, 0.0);
    } else if (key == "assignment") {
      std::size_t j;
      while (val >> j) rep.assignment.push_back(j);
      if (!val.eof()) parse_fail(path, lineno, "invalid value for 'assignment'");
      continue;  // reading until eof leaves the stream failed; skip the check below
    } else if (key == "mean_sad") {
      val >> rep.mean_sad;
    } else if (key == "mean_rmse") {
      val >> rep.mean_rmse;
    } else if (key.rfind("sad_", 0) == 0) {
      std::size_t i = std::stoul(key.substr(4));
      if (i >= k) parse_fail(path, lineno, "sad index out of range");
      val >> rep.sad[i];
    } else if (key.rfind("rmse_", 0) == 0) {
      std::size_t i = std::stoul(key.substr(5));
      if (i >= k) parse_fail(path, lineno, "rmse index out of range");
      val >> rep.rmse[i];
    } else {
      parse_fail(path, lineno, "unknown key '" + key + "'");
    }
    if (val.fail()) parse_fail(path, lineno, "invalid value for '" + key + "'");
  }
  if (rep.assignment.size() != k) parse_fail(path, lineno, "assignment length disagrees with k");
  return rep;
}

}  // namespace unmix
