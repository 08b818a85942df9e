#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "skqi/quasi_interpolation.hpp"

namespace skqi {

enum class FillMode { Empirical, Nominal };

struct Level {
  PointSet sites;
  double rho;
  double h;
};

struct LevelSchedule {
  std::vector<Level> levels;
  double nu;
  double delta;    // largest observed h_{j+1} / h_j (1 level: 0)
  double c_delta;  // configured lower ratio bound factor
  FillMode mode;
  std::vector<std::string> warnings;
};

struct ScheduleOptions {
  double c_delta = 0.9;
  double probe_factor = 20.0;
  std::uint64_t probe_seed = 0x5eed;
};

/// Fill distances per level (probed or N^(-1/d)) and scales rho_j = nu sqrt(h_j).
LevelSchedule build_schedule(const std::vector<PointSet>& base_sites, double nu, FillMode mode,
                             const ScheduleOptions& options = {});

/// M_n = s_1 + ... + s_n with s_j the equal-weight quasi-interpolant of the level-j residual.
class MultilevelApproximant {
 public:
  double evaluate(PointRef x) const { return evaluate_partial(x, levels()); }
  double operator()(PointRef x) const { return evaluate(x); }
  /// M_j at x (j = 0 gives 0).
  double evaluate_partial(PointRef x, std::size_t j) const;

  std::size_t levels() const { return stages_.size(); }
  const Approximant& stage(std::size_t j) const { return stages_.at(j); }
  /// Residual samples r_j(x) = y(x) - M_{j-1}(x) at the level-j sites.
  const std::vector<double>& residuals(std::size_t j) const { return residuals_.at(j); }
  /// Measured (possibly noisy) samples of f at the level-j sites.
  const std::vector<double>& measurements(std::size_t j) const { return measurements_.at(j); }

  void add_stage(Approximant stage, std::vector<double> residuals, std::vector<double> measurements);

 private:
  std::vector<Approximant> stages_;
  std::vector<std::vector<double>> residuals_;
  std::vector<std::vector<double>> measurements_;
};

struct MultilevelOptions {
  int order = 2;                           // kernel order m
  std::optional<NoiseModel> noise;         // seed is offset per level
  const QuadratureRule* error_rule = nullptr;  // when set, per-level errors are logged
  const PointSet* linf_points = nullptr;
};

struct LevelLog {
  std::size_t level;
  std::size_t n;
  double rho;
  double l2;
  double linf;
};

MultilevelApproximant multilevel_approximate(const LevelSchedule& schedule, const SphereFunction& f,
                                             const RadialProfile& profile, const MultilevelOptions& options,
                                             std::vector<LevelLog>* log = nullptr);

/// CSV rows `level,N,rho,L2err,Linferr`.
void write_level_log_csv(const std::vector<LevelLog>& log, const std::filesystem::path& path);

struct ExpansionCheck {
  std::size_t levels;
  double max_diff_m;  // recursion vs expanded product-sum for M_n
  double max_diff_e;  // f - M_n vs expanded product (I - Q_n)...(I - Q_1) f
};

/// Evaluates M_n both by the residual recursion and by the fully expanded operator
/// sum over compositions Q_j Q_{i_k} ... Q_{i_1} f; n <= 4.
ExpansionCheck expand_operators(const LevelSchedule& schedule, const SphereFunction& f,
                                const RadialProfile& profile, int order, const PointSet& eval_points);

}  // namespace skqi

namespace skqi {

/// beta = (1 + nu^(-2 sigma)) delta^(sigma / 2); the level errors contract when beta < 1.
double contraction_factor(const LevelSchedule& schedule, double sigma);

}  // namespace skqi
