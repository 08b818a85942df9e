#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "skqi/sphere_geometry.hpp"

namespace skqi {

/// sqrt(sum_j w_j (approx(x_j) - f(x_j))^2) under the rule's unit-mass weights.
double l2_error(const SphereFunction& approx, const SphereFunction& f, const QuadratureRule& rule);

/// Max |approx - f| over the evaluation points.
double linf_error(const SphereFunction& approx, const SphereFunction& f, const PointSet& eval_points);

/// Builds an approximant from a trial seed.
using SeededBuilder = std::function<SphereFunction(std::uint64_t seed)>;

/// Max over eval points of the mean squared error across trials, one trial per seed.
double mmse(const SeededBuilder& builder, const SphereFunction& f, std::span<const std::uint64_t> seeds,
            const PointSet& eval_points);

/// J trials with seeds derive_seed(base_seed, i).
double mmse(const SeededBuilder& builder, const SphereFunction& f, std::size_t trials,
            const PointSet& eval_points, std::uint64_t base_seed = 1);

struct SlopeFit {
  double slope;
  double intercept;  // log10 scale
};

/// Least-squares line through (log10 n, log10 err).
SlopeFit fit_slope(std::span<const double> ns, std::span<const double> errs);

struct ErrorReport {
  std::size_t n = 0;
  double l2 = 0.0;
  double linf = 0.0;
  std::optional<double> mmse;
  double wall_time_s = 0.0;

  static std::string csv_header() { return "N,L2err,Linferr,MMSE,time_s"; }
  std::string csv_row() const;
};

/// Degree of the default L2 error rule.
inline constexpr int kDefaultL2Degree = 60;

}  // namespace skqi
