#include "skqi/multilevel.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>

#include "skqi/metrics.hpp"

namespace skqi {

LevelSchedule build_schedule(const std::vector<PointSet>& base_sites, double nu, FillMode mode,
                             const ScheduleOptions& options) {
  if (base_sites.empty()) throw InvalidSchedule("build_schedule: need at least one level");
  if (!(nu > 1.0)) throw InvalidSchedule("build_schedule: nu must be > 1");
  LevelSchedule schedule{{}, nu, 0.0, options.c_delta, mode, {}};
  for (std::size_t j = 0; j < base_sites.size(); ++j) {
    const PointSet& sites = base_sites[j];
    double h;
    if (mode == FillMode::Nominal)
      h = std::pow(static_cast<double>(sites.size()), -1.0 / sites.dim());
    else
      h = fill_distance_estimate(sites, derive_seed(options.probe_seed, j), options.probe_factor);
    const double rho = nu * std::sqrt(h);
    if (!(rho < 1.0))
      throw InvalidSchedule("build_schedule: level " + std::to_string(j + 1) + " has rho = " +
                            std::to_string(rho) + " >= 1");
    schedule.levels.push_back({sites, rho, h});
  }
  for (std::size_t j = 1; j < schedule.levels.size(); ++j) {
    const double ratio = schedule.levels[j].h / schedule.levels[j - 1].h;
    if (!(ratio < 1.0))
      throw InvalidSchedule("build_schedule: fill distance does not decrease at level " + std::to_string(j + 1));
    schedule.delta = std::max(schedule.delta, ratio);
  }
  for (std::size_t j = 1; j < schedule.levels.size(); ++j) {
    const double ratio = schedule.levels[j].h / schedule.levels[j - 1].h;
    if (mode == FillMode::Empirical && ratio < options.c_delta * schedule.delta)
      schedule.warnings.push_back("level " + std::to_string(j + 1) + ": h ratio " + std::to_string(ratio) +
                                  " below c_delta * delta");
  }
  return schedule;
}

double contraction_factor(const LevelSchedule& schedule, double sigma) {
  return (1.0 + std::pow(schedule.nu, -2.0 * sigma)) * std::pow(schedule.delta, sigma / 2.0);
}

double MultilevelApproximant::evaluate_partial(PointRef x, std::size_t j) const {
  if (j > stages_.size()) throw InvalidArgument("evaluate_partial: level out of range");
  double s = 0.0;
  for (std::size_t i = 0; i < j; ++i) s += stages_[i].evaluate(x);
  return s;
}

void MultilevelApproximant::add_stage(Approximant stage, std::vector<double> residuals,
                                      std::vector<double> measurements) {
  stages_.push_back(std::move(stage));
  residuals_.push_back(std::move(residuals));
  measurements_.push_back(std::move(measurements));
}

MultilevelApproximant multilevel_approximate(const LevelSchedule& schedule, const SphereFunction& f,
                                             const RadialProfile& profile, const MultilevelOptions& options,
                                             std::vector<LevelLog>* log) {
  MultilevelApproximant result;
  for (std::size_t j = 0; j < schedule.levels.size(); ++j) {
    const Level& level = schedule.levels[j];
    std::vector<double> measured = sample(f, level.sites);
    if (options.noise) {
      NoiseModel model = *options.noise;
      model.seed = derive_seed(options.noise->seed, j);
      measured = add_noise(measured, model);
    }
    std::vector<double> residual(measured.size());
    for (std::size_t i = 0; i < residual.size(); ++i)
      residual[i] = measured[i] - result.evaluate(level.sites[i]);
    const ZonalKernel kernel = make_kernel(profile, level.rho, level.sites.dim(), options.order);
    Approximant stage = qi_qmc(level.sites, residual, kernel);
    result.add_stage(std::move(stage), std::move(residual), std::move(measured));
    if (log) {
      LevelLog row{j + 1, level.sites.size(), level.rho, std::nan(""), std::nan("")};
      auto approx = [&](PointRef x) { return result.evaluate(x); };
      if (options.error_rule) row.l2 = l2_error(approx, f, *options.error_rule);
      if (options.linf_points) row.linf = linf_error(approx, f, *options.linf_points);
      log->push_back(row);
    }
  }
  return result;
}

void write_level_log_csv(const std::vector<LevelLog>& log, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("write_level_log_csv: cannot write " + path.string());
  out << "level,N,rho,L2err,Linferr\n" << std::setprecision(10);
  for (const auto& row : log) {
    out << row.level << ',' << row.n << ',' << row.rho << ',';
    if (!std::isnan(row.l2)) out << row.l2;
    out << ',';
    if (!std::isnan(row.linf)) out << row.linf;
    out << '\n';
  }
}

ExpansionCheck expand_operators(const LevelSchedule& schedule, const SphereFunction& f,
                                const RadialProfile& profile, int order, const PointSet& eval_points) {
  const std::size_t n = schedule.levels.size();
  if (n == 0 || n > 4) throw InvalidArgument("expand_operators: supports 1 to 4 levels");

  const MultilevelApproximant recursive = multilevel_approximate(schedule, f, profile, MultilevelOptions{order, std::nullopt, nullptr, nullptr});

  std::vector<ZonalKernel> kernels;
  for (const auto& level : schedule.levels)
    kernels.push_back(make_kernel(profile, level.rho, level.sites.dim(), order));

  // chain[mask] = Q_{i_k} ... Q_{i_1} f for the levels in mask, applied in increasing order.
  std::map<unsigned, SphereFunction> chain;
  std::vector<std::shared_ptr<Approximant>> keep;
  chain[0] = f;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    unsigned top = 0;
    for (unsigned b = 0; b < n; ++b)
      if (mask & (1u << b)) top = b;
    const SphereFunction& inner = chain.at(mask & ~(1u << top));
    const Level& level = schedule.levels[top];
    auto q = std::make_shared<Approximant>(qi_qmc(level.sites, sample(inner, level.sites), kernels[top]));
    keep.push_back(q);
    chain[mask] = [q](PointRef x) { return q->evaluate(x); };
  }

  auto sign = [](unsigned mask) { return (std::popcount(mask) % 2 == 0) ? 1.0 : -1.0; };
  ExpansionCheck check{n, 0.0, 0.0};
  for (std::size_t i = 0; i < eval_points.size(); ++i) {
    const PointRef x = eval_points[i];
    // M_n = sum_j Q_j prod_{l<j} (I - Q_l) f
    double m_expanded = 0.0;
    for (unsigned j = 0; j < n; ++j)
      for (unsigned sub = 0; sub < (1u << j); ++sub) m_expanded += sign(sub) * chain.at(sub | (1u << j))(x);
    // E_n = prod_j (I - Q_j) f
    double e_expanded = 0.0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) e_expanded += sign(mask) * chain.at(mask)(x);
    const double m_rec = recursive.evaluate(x);
    check.max_diff_m = std::max(check.max_diff_m, std::abs(m_rec - m_expanded));
    check.max_diff_e = std::max(check.max_diff_e, std::abs((f(x) - m_rec) - e_expanded));
  }
  return check;
}

}  // namespace skqi
