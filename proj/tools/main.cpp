// Command-line front end: scene generation, unmixing, evaluation, lambda
// sweeps, and timing runs. Every subcommand writes a flat key-value manifest
// with the fully resolved configuration and an FNV-1a checksum per artifact,
// so a run can be reproduced and verified byte for byte.
//
// Exit codes: 0 success, 1 usage error, 2 runtime/solver failure.

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "unmix/io.hpp"
#include "unmix/metrics.hpp"
#include "unmix/solver.hpp"
#include "unmix/sparsity.hpp"
#include "unmix/synth.hpp"

namespace fs = std::filesystem;
using namespace unmix;

namespace {

std::string fnv1a_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot checksum missing file: " + path);
  std::uint64_t hash = 1469598103934665603ull;
  char c;
  while (in.get(c)) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string fmt_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Ordered key-value document; insertion order is preserved so manifests are
/// byte-reproducible.
class Manifest {
 public:
  void set(const std::string& key, const std::string& value) { lines_.push_back(key + " = " + value); }
  void set(const std::string& key, double value) { set(key, fmt_value(value)); }
  void set(const std::string& key, std::uint64_t value) { set(key, std::to_string(value)); }

  void add_artifact(const std::string& path) {
    set("checksum_" + fs::path(path).filename().string(), fnv1a_hex(path));
  }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (const std::string& line : lines_) out << line << '\n';
  }

 private:
  std::vector<std::string> lines_;
};

std::string loss_name(Loss loss) {
  switch (loss) {
    case Loss::frobenius: return "fro";
    case Loss::l21: return "l21";
    case Loss::l2p: return "l2p";
  }
  return "?";
}

std::string sparsity_name(Sparsity s) {
  switch (s) {
    case Sparsity::none: return "none";
    case Sparsity::fixed: return "fixed";
    case Sparsity::learned: return "learned";
  }
  return "?";
}

Matrix guidance_row(const GuidanceMap& h) {
  Matrix row(1, h.values.size());
  for (std::size_t i = 0; i < h.values.size(); ++i) row(0, i) = h.values[i];
  return row;
}

GuidanceMap guidance_from_row(const Matrix& row) {
  GuidanceMap h;
  h.state = GuidanceMap::State::rescaled;
  h.values.assign(row.data(), row.data() + row.size());
  return h;
}

void ensure_dir(const std::string& dir) { fs::create_directories(dir); }

// ---- synth ----

struct SynthArgs {
  SceneSpec spec;
  std::string outlier_kind = "blank";
  std::string out;
};

void add_synth(CLI::App& app, SynthArgs& args) {
  CLI::App* cmd = app.add_subcommand("synth", "Generate a synthetic scene with ground truth");
  cmd->add_option("--width", args.spec.width, "Scene width in pixels")->capture_default_str();
  cmd->add_option("--height", args.spec.height, "Scene height in pixels")->capture_default_str();
  cmd->add_option("--channels", args.spec.channels, "Spectral channels")->capture_default_str();
  cmd->add_option("--endmembers", args.spec.endmembers, "Number of endmembers")
      ->capture_default_str();
  cmd->add_option("--noise-sigma", args.spec.noise_sigma, "Gaussian noise level")
      ->capture_default_str();
  cmd->add_option("--outlier-fraction", args.spec.outlier_fraction,
                  "Fraction of channels to corrupt")
      ->capture_default_str();
  cmd->add_option("--outlier-kind", args.outlier_kind, "Corruption kind")
      ->check(CLI::IsMember({"blank", "heavy"}))
      ->capture_default_str();
  cmd->add_option("--blur-radius", args.spec.blur_radius, "Abundance box-blur radius")
      ->capture_default_str();
  cmd->add_option("--seed", args.spec.seed, "Random seed")->capture_default_str();
  cmd->add_option("--out", args.out, "Output directory")->required();
}

int cmd_synth(const SynthArgs& args) {
  SceneSpec spec = args.spec;
  spec.outlier_kind = args.outlier_kind == "heavy" ? OutlierKind::heavy_noise : OutlierKind::blank;
  spec.validate();

  SpectralCube cube;
  GroundTruth truth;
  make_scene(spec, cube, truth);

  ensure_dir(args.out);
  const fs::path out(args.out);
  write_cube(cube, (out / "cube.hsc").string());
  write_matrix_csv(truth.m_true, (out / "M_true.csv").string());
  write_matrix_csv(truth.a_true, (out / "A_true.csv").string());
  write_matrix_csv(guidance_row(truth.h_true), (out / "h_true.csv").string());

  Manifest manifest;
  manifest.set("subcommand", std::string("synth"));
  manifest.set("width", spec.width);
  manifest.set("height", spec.height);
  manifest.set("channels", spec.channels);
  manifest.set("endmembers", spec.endmembers);
  manifest.set("noise_sigma", spec.noise_sigma);
  manifest.set("outlier_fraction", spec.outlier_fraction);
  manifest.set("outlier_kind", args.outlier_kind);
  manifest.set("blur_radius", spec.blur_radius);
  manifest.set("seed", spec.seed);
  manifest.set("out", args.out);
  manifest.set("corrupted_channels", truth.outlier_channels.size());
  for (const char* name : {"cube.hsc", "M_true.csv", "A_true.csv", "h_true.csv"})
    manifest.add_artifact((out / name).string());
  manifest.write((out / "manifest.txt").string());
  return 0;
}

// ---- unmix ----

struct UnmixArgs {
  SolverConfig cfg;
  std::string input;
  std::string loss = "l21";
  std::string sparsity = "learned";
  std::string norm = "l1";
  std::string init = "random";
  std::string out;
};

void add_solver_flags(CLI::App* cmd, UnmixArgs& args) {
  cmd->add_option("--k", args.cfg.k, "Number of endmembers")->capture_default_str();
  cmd->add_option("--lambda", args.cfg.lambda, "Sparsity weight")->capture_default_str();
  cmd->add_option("--loss", args.loss, "Representation loss")
      ->check(CLI::IsMember({"fro", "l21", "l2p"}))
      ->capture_default_str();
  cmd->add_option("--p", args.cfg.p, "Row-norm exponent for --loss l2p")->capture_default_str();
  cmd->add_option("--sparsity", args.sparsity, "Sparsity constraint mode")
      ->check(CLI::IsMember({"none", "fixed", "learned"}))
      ->capture_default_str();
  cmd->add_option("--fixed-p", args.cfg.fixed_p, "Exponent for --sparsity fixed")
      ->capture_default_str();
  cmd->add_option("--sigma", args.cfg.sigma, "Initial guidance kernel width")
      ->capture_default_str();
  cmd->add_option("--xi", args.cfg.xi, "Penalty smoothing offset")->capture_default_str();
  cmd->add_option("--q", args.cfg.q, "Guidance refresh cadence (inner iterations)")
      ->capture_default_str();
  cmd->add_option("--inner-tol", args.cfg.inner_tol, "Inner relative-change tolerance")
      ->capture_default_str();
  cmd->add_option("--outer-tol", args.cfg.outer_tol, "Outer relative-change tolerance")
      ->capture_default_str();
  cmd->add_option("--max-inner", args.cfg.max_inner, "Inner iteration cap")
      ->capture_default_str();
  cmd->add_option("--max-outer", args.cfg.max_outer, "Outer phase cap")->capture_default_str();
  cmd->add_option("--seed", args.cfg.seed, "Random seed")->capture_default_str();
  cmd->add_option("--norm", args.norm, "Abundance row normalization")
      ->check(CLI::IsMember({"l1", "l2"}))
      ->capture_default_str();
  cmd->add_option("--init", args.init, "Factor initialization")
      ->check(CLI::IsMember({"random", "pixel"}))
      ->capture_default_str();
}

SolverConfig resolve_config(const UnmixArgs& args) {
  SolverConfig cfg = args.cfg;
  cfg.loss = args.loss == "fro" ? Loss::frobenius : args.loss == "l2p" ? Loss::l2p : Loss::l21;
  cfg.sparsity = args.sparsity == "none"    ? Sparsity::none
                 : args.sparsity == "fixed" ? Sparsity::fixed
                                            : Sparsity::learned;
  cfg.norm_mode = args.norm == "l2" ? NormMode::l2_rows : NormMode::l1_rows;
  cfg.init = args.init == "pixel" ? InitStrategy::pixel_sample : InitStrategy::random;
  cfg.validate();
  return cfg;
}

void manifest_config(Manifest& manifest, const UnmixArgs& args, const SolverConfig& cfg) {
  manifest.set("k", cfg.k);
  manifest.set("lambda", cfg.lambda);
  manifest.set("loss", args.loss);
  manifest.set("p", cfg.p);
  manifest.set("sparsity", args.sparsity);
  manifest.set("fixed_p", cfg.fixed_p);
  manifest.set("sigma", cfg.sigma);
  manifest.set("xi", cfg.xi);
  manifest.set("q", cfg.q);
  manifest.set("inner_tol", cfg.inner_tol);
  manifest.set("outer_tol", cfg.outer_tol);
  manifest.set("max_inner", cfg.max_inner);
  manifest.set("max_outer", cfg.max_outer);
  manifest.set("seed", cfg.seed);
  manifest.set("norm", args.norm);
  manifest.set("init", args.init);
}

void add_unmix(CLI::App& app, UnmixArgs& args) {
  CLI::App* cmd = app.add_subcommand("unmix", "Factor a scene into endmembers and abundances");
  cmd->add_option("--input", args.input, "Input cube (HSC1)")->required();
  add_solver_flags(cmd, args);
  cmd->add_option("--out", args.out, "Output directory")->required();
}

int cmd_unmix(const UnmixArgs& args) {
  SolverConfig cfg = resolve_config(args);
  SpectralCube cube = read_cube(args.input);
  UnmixResult res = solve(cube, cfg);

  ensure_dir(args.out);
  const fs::path out(args.out);
  write_matrix_csv(res.m, (out / "M.csv").string());
  write_matrix_csv(res.a, (out / "A.csv").string());
  write_matrix_csv(guidance_row(res.h), (out / "h.csv").string());
  write_trace_csv(res.trace, (out / "trace.csv").string());
  write_abundance_ppm(normalize_columns_l1(res.a), cube.width, cube.height,
                      (out / "abundance.ppm").string());
  write_guidance_ppm(res.h, cube.width, cube.height, (out / "guidance.ppm").string());

  Manifest manifest;
  manifest.set("subcommand", std::string("unmix"));
  manifest.set("input", args.input);
  manifest_config(manifest, args, cfg);
  manifest.set("out", args.out);
  manifest.set("iterations", res.trace.size() - 1);
  manifest.set("final_objective", res.trace.back().objective);
  for (const char* name : {"M.csv", "A.csv", "h.csv", "trace.csv", "abundance.ppm", "guidance.ppm"})
    manifest.add_artifact((out / name).string());
  manifest.write((out / "manifest.txt").string());
  return 0;
}

// ---- eval ----

struct EvalArgs {
  std::string truth;
  std::string est;
  std::string out;
};

void add_eval(CLI::App& app, EvalArgs& args) {
  CLI::App* cmd = app.add_subcommand("eval", "Score an estimate against ground truth");
  cmd->add_option("--truth", args.truth, "Directory with M_true.csv and A_true.csv")->required();
  cmd->add_option("--est", args.est, "Directory with M.csv and A.csv")->required();
  cmd->add_option("--out", args.out, "Report file")->required();
}

EvalReport eval_dirs(const std::string& truth_dir, const std::string& est_dir) {
  const fs::path truth(truth_dir), est(est_dir);
  Matrix m_true = read_matrix_csv((truth / "M_true.csv").string());
  Matrix a_true = read_matrix_csv((truth / "A_true.csv").string());
  Matrix m_est = read_matrix_csv((est / "M.csv").string());
  Matrix a_est = read_matrix_csv((est / "A.csv").string());
  // the solver normalizes abundance rows; put columns back on the simplex
  // scale before comparing against the ground truth
  return evaluate(m_true, a_true, m_est, normalize_columns_l1(a_est));
}

int cmd_eval(const EvalArgs& args) {
  EvalReport report = eval_dirs(args.truth, args.est);
  write_report(report, args.out);
  return 0;
}

// ---- sweep ----

struct SweepArgs {
  UnmixArgs unmix;
  std::string truth;
  double lambda_min = 0.01;
  double lambda_max = 1.0;
  std::size_t steps = 5;
  std::string out;
};

void add_sweep(CLI::App& app, SweepArgs& args) {
  CLI::App* cmd = app.add_subcommand("sweep", "Evaluate a geometric lambda grid");
  cmd->add_option("--input", args.unmix.input, "Input cube (HSC1)")->required();
  cmd->add_option("--truth", args.truth, "Ground-truth directory")->required();
  cmd->add_option("--lambda-min", args.lambda_min, "Smallest lambda")->capture_default_str();
  cmd->add_option("--lambda-max", args.lambda_max, "Largest lambda")->capture_default_str();
  cmd->add_option("--steps", args.steps, "Grid points")->capture_default_str();
  add_solver_flags(cmd, args.unmix);
  cmd->add_option("--out", args.out, "Output directory")->required();
}

int cmd_sweep(const SweepArgs& args) {
  if (!(args.lambda_min < args.lambda_max))
    throw CLI::ValidationError("--lambda-min must be below --lambda-max");
  if (args.steps < 2) throw CLI::ValidationError("--steps must be at least 2");

  SolverConfig cfg = resolve_config(args.unmix);
  SpectralCube cube = read_cube(args.unmix.input);

  ensure_dir(args.out);
  const fs::path out(args.out);
  std::ofstream summary((out / "summary.csv").string());
  if (!summary) throw std::runtime_error("cannot open summary for writing");
  summary << "lambda,mean_sad,mean_rmse\n";

  const double log_lo = std::log(args.lambda_min);
  const double log_hi = std::log(args.lambda_max);
  for (std::size_t i = 0; i < args.steps; ++i) {
    double t = static_cast<double>(i) / static_cast<double>(args.steps - 1);
    cfg.lambda = std::exp(log_lo + t * (log_hi - log_lo));
    UnmixResult res = solve(cube, cfg);

    const fs::path truth(args.truth);
    Matrix m_true = read_matrix_csv((truth / "M_true.csv").string());
    Matrix a_true = read_matrix_csv((truth / "A_true.csv").string());
    EvalReport rep = evaluate(m_true, a_true, res.m, normalize_columns_l1(res.a));
    summary << fmt_value(cfg.lambda) << ',' << fmt_value(rep.mean_sad) << ','
            << fmt_value(rep.mean_rmse) << '\n';
  }
  summary.close();

  Manifest manifest;
  manifest.set("subcommand", std::string("sweep"));
  manifest.set("input", args.unmix.input);
  manifest.set("truth", args.truth);
  manifest.set("lambda_min", args.lambda_min);
  manifest.set("lambda_max", args.lambda_max);
  manifest.set("steps", args.steps);
  manifest_config(manifest, args.unmix, cfg);
  manifest.set("out", args.out);
  manifest.add_artifact((out / "summary.csv").string());
  manifest.write((out / "manifest.txt").string());
  return 0;
}

// ---- bench ----

struct BenchArgs {
  std::vector<std::size_t> sides = {25, 50};
  std::size_t channels = 100;
  std::size_t k = 4;
  std::size_t iterations = 15;
  std::uint64_t seed = 5;
  std::string out;
};

void add_bench(CLI::App& app, BenchArgs& args) {
  CLI::App* cmd = app.add_subcommand("bench", "Time the robust loss against the baseline");
  cmd->add_option("--sides", args.sides, "Square scene side lengths")->capture_default_str();
  cmd->add_option("--channels", args.channels, "Spectral channels")->capture_default_str();
  cmd->add_option("--k", args.k, "Number of endmembers")->capture_default_str();
  cmd->add_option("--iterations", args.iterations, "Timed iterations per run")
      ->capture_default_str();
  cmd->add_option("--seed", args.seed, "Random seed")->capture_default_str();
  cmd->add_option("--out", args.out, "Output directory")->required();
}

int cmd_bench(const BenchArgs& args) {
  ensure_dir(args.out);
  const fs::path out(args.out);
  std::ofstream timing((out / "timing.csv").string());
  if (!timing) throw std::runtime_error("cannot open timing file for writing");
  timing << "pixels,loss,seconds_per_iteration,ratio_to_fro\n";

  using clock = std::chrono::steady_clock;
  for (std::size_t side : args.sides) {
    SceneSpec spec;
    spec.width = side;
    spec.height = side;
    spec.channels = args.channels;
    spec.endmembers = args.k;
    spec.noise_sigma = 0.01;
    spec.seed = args.seed;
    SpectralCube cube;
    GroundTruth truth;
    make_scene(spec, cube, truth);

    double per_iter[2] = {0.0, 0.0};
    const Loss losses[2] = {Loss::frobenius, Loss::l21};
    for (int i = 0; i < 2; ++i) {
      SolverConfig cfg;
      cfg.k = args.k;
      cfg.seed = args.seed;
      cfg.loss = losses[i];
      cfg.sparsity = Sparsity::none;
      cfg.cadence = false;
      cfg.inner_tol = 0.0;
      cfg.max_inner = args.iterations;
      cfg.max_outer = 1;
      auto start = clock::now();
      solve(cube, cfg);
      per_iter[i] = std::chrono::duration<double>(clock::now() - start).count() /
                    static_cast<double>(args.iterations);
    }
    timing << spec.pixels() << ",fro," << fmt_value(per_iter[0]) << ",1\n";
    timing << spec.pixels() << ",l21," << fmt_value(per_iter[1]) << ','
           << fmt_value(per_iter[1] / per_iter[0]) << '\n';
  }
  timing.close();

  Manifest manifest;
  manifest.set("subcommand", std::string("bench"));
  manifest.set("channels", args.channels);
  manifest.set("k", args.k);
  manifest.set("iterations", args.iterations);
  manifest.set("seed", args.seed);
  manifest.set("out", args.out);
  manifest.add_artifact((out / "timing.csv").string());
  manifest.write((out / "manifest.txt").string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral unmixing with a robust loss and a learned per-pixel sparsity map"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  UnmixArgs unmix_args;
  EvalArgs eval_args;
  SweepArgs sweep_args;
  BenchArgs bench_args;
  add_synth(app, synth_args);
  add_unmix(app, unmix_args);
  add_eval(app, eval_args);
  add_sweep(app, sweep_args);
  add_bench(app, bench_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand("synth")) return cmd_synth(synth_args);
    if (app.got_subcommand("unmix")) return cmd_unmix(unmix_args);
    if (app.got_subcommand("eval")) return cmd_eval(eval_args);
    if (app.got_subcommand("sweep")) return cmd_sweep(sweep_args);
    if (app.got_subcommand("bench")) return cmd_bench(bench_args);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
