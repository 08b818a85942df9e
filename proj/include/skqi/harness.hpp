#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "skqi/baselines.hpp"
#include "skqi/metrics.hpp"
#include "skqi/multilevel.hpp"

namespace skqi {

/// Franke's four-term exponential test function on S^2.
double franke(PointRef x);

enum class Experiment { Convergence, Multilevel, NoiseCompare, Timing };
enum class KernelFamily { Gaussian, Wendland };

/// Kernel family plus order label m. Wendland uses k = m/2, l = k + 2 unless overridden.
struct KernelChoice {
  KernelFamily family = KernelFamily::Gaussian;
  int order = 2;
  std::optional<int> wendland_l;
  std::optional<int> wendland_k;

  RadialProfile profile() const;
  ZonalKernel make(double rho) const { return make_kernel(profile(), rho, 2, order); }
  std::string label() const;
};

struct RhoRule {
  enum class Kind { PowQMC, PowMC, Explicit };
  Kind kind = Kind::PowQMC;
  double exponent = -0.25;
  double constant = 1.0;
  std::vector<double> values;  // Explicit: one per grid entry

  double rho(std::size_t n, std::size_t index) const;
};

struct Target {
  enum class Kind { Harmonic, Franke };
  Kind kind = Kind::Harmonic;
  int ell = 6;
  int k = 4;

  SphereFunction function() const;
  std::string label() const;
};

struct NoiseConfig {
  NoiseModel::Kind kind = NoiseModel::Kind::GaussianStd;
  std::vector<double> levels;  // sigma_eps (or M_eps) values; the multilevel run adds a clean pass
};

enum class L2Measure { Normalized, Surface };

struct ExperimentConfig {
  Experiment experiment = Experiment::Convergence;
  KernelChoice kernel;
  std::vector<int> orders;  // noise-compare: QI orders to run (defaults to kernel.order)
  PointKind point_kind = PointKind::Spiral;
  std::vector<std::string> point_files;  // one per grid entry for loaded kinds
  std::vector<std::size_t> n_grid;
  RhoRule rho_rule;
  Target target;
  std::optional<NoiseConfig> noise;
  std::uint64_t seed = 1;
  std::filesystem::path output = "out";

  // metrics
  int l2_degree = kDefaultL2Degree;
  L2Measure l2_measure = L2Measure::Normalized;
  std::size_t trials = 20;        // J
  std::size_t eval_points = 5000;  // M

  // multilevel
  double nu = 1.5;
  FillMode h_mode = FillMode::Nominal;
  double c_delta = 0.9;

  // baselines and timing
  double filter_a = 1.2;
  std::size_t timing_repeats = 3;
  std::size_t timing_grid = 10000;

  bool paper_scale = false;
};

std::string to_string(Experiment e);

/// Parses a JSON config; unknown keys and invalid values raise ConfigError naming the field.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Round-trippable JSON rendering (used for the manifest echo).
std::string config_to_json(const ExperimentConfig& cfg);

/// Throws ConfigError for meaningless settings before any compute.
void validate(const ExperimentConfig& cfg);

/// Built-in desk-scale config for each experiment.
ExperimentConfig default_config(Experiment e);

/// Full-size runs: J = 100 trials, M = 50000 evaluation points.
void apply_paper_scale(ExperimentConfig& cfg);

/// Points of the configured kind and size; `index` selects the file for loaded kinds.
PointSet make_points(const ExperimentConfig& cfg, std::size_t n, std::size_t index, std::uint64_t seed);

struct ConvergenceRow {
  double rho;
  ErrorReport report;
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  std::string metric;  // "L2" or "MMSE"
  SlopeFit fit;
};

ConvergenceResult run_convergence(const ExperimentConfig& cfg);

struct MultilevelRow {
  double noise;
  std::size_t level;
  std::size_t n;
  double rho;
  double ml_l2, ml_linf;
  double sl_l2, sl_linf;
};

struct MultilevelResult {
  std::vector<MultilevelRow> rows;
  std::vector<std::string> warnings;
  double beta;  // contraction factor with sigma = order
};

MultilevelResult run_multilevel_compare(const ExperimentConfig& cfg);

struct NoiseCompareRow {
  std::string method;  // qmcqi_m<order>, mcqi_m<order>, fhi
  std::size_t n;       // requested grid entry
  std::size_t nodes;   // points actually used
  int degree;          // FHI degree L (-1 for QI)
  ErrorReport report;
};

struct NoiseCompareResult {
  double noise;
  std::vector<NoiseCompareRow> rows;

  std::vector<double> l2_series(const std::string& method) const;
};

/// One result per configured noise level (clean if none).
std::vector<NoiseCompareResult> run_noise_compare(const ExperimentConfig& cfg);

struct TimingRow {
  std::string method;  // hi, fhi, qmcqi
  std::size_t n;
  double median_s;
};

std::vector<TimingRow> run_timing(const ExperimentConfig& cfg);

/// Writes manifest.json (config echo, version, seeds, artifacts) into `dir`.
void write_manifest(const std::filesystem::path& dir, const std::string& command, const std::string& config_json,
                    std::uint64_t seed, const std::vector<std::string>& artifacts);

}  // namespace skqi
