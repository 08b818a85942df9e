#include "skqi/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace skqi {

double l2_error(const SphereFunction& approx, const SphereFunction& f, const QuadratureRule& rule) {
  CompensatedSum s;
  for (std::size_t j = 0; j < rule.size(); ++j) {
    const double e = approx(rule.nodes[j]) - f(rule.nodes[j]);
    s.add(rule.weights[j] * e * e);
  }
  return std::sqrt(std::max(0.0, s.value()));
}

double linf_error(const SphereFunction& approx, const SphereFunction& f, const PointSet& eval_points) {
  double worst = 0.0;
  for (std::size_t i = 0; i < eval_points.size(); ++i)
    worst = std::max(worst, std::abs(approx(eval_points[i]) - f(eval_points[i])));
  return worst;
}

double mmse(const SeededBuilder& builder, const SphereFunction& f, std::span<const std::uint64_t> seeds,
            const PointSet& eval_points) {
  if (seeds.empty()) throw InvalidArgument("mmse: need at least one trial");
  const std::size_t m = eval_points.size();
  std::vector<double> target(m);
  for (std::size_t k = 0; k < m; ++k) target[k] = f(eval_points[k]);
  std::vector<CompensatedSum> sq(m);
  for (const std::uint64_t seed : seeds) {
    const SphereFunction approx = builder(seed);
    for (std::size_t k = 0; k < m; ++k) {
      const double e = approx(eval_points[k]) - target[k];
      sq[k].add(e * e);
    }
  }
  double worst = 0.0;
  for (const auto& s : sq) worst = std::max(worst, s.value() / static_cast<double>(seeds.size()));
  return worst;
}

double mmse(const SeededBuilder& builder, const SphereFunction& f, std::size_t trials, const PointSet& eval_points,
            std::uint64_t base_seed) {
  std::vector<std::uint64_t> seeds(trials);
  for (std::size_t i = 0; i < trials; ++i) seeds[i] = derive_seed(base_seed, i);
  return mmse(builder, f, seeds, eval_points);
}

SlopeFit fit_slope(std::span<const double> ns, std::span<const double> errs) {
  if (ns.size() != errs.size() || ns.size() < 2) throw InvalidArgument("fit_slope: need >= 2 paired points");
  const double n = static_cast<double>(ns.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(errs[i] > 0.0) || !(ns[i] > 0.0)) throw InvalidArgument("fit_slope: values must be positive");
    const double x = std::log10(ns[i]);
    const double y = std::log10(errs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw InvalidArgument("fit_slope: all counts are equal");
  const double slope = (n * sxy - sx * sy) / denom;
  return {slope, (sy - slope * sx) / n};
}

std::string ErrorReport::csv_row() const {
  char buf[256];
  if (mmse)
    std::snprintf(buf, sizeof buf, "%zu,%.10g,%.10g,%.10g,%.6f", n, l2, linf, *mmse, wall_time_s);
  else
    std::snprintf(buf, sizeof buf, "%zu,%.10g,%.10g,,%.6f", n, l2, linf, wall_time_s);
  return buf;
}

}  // namespace skqi
