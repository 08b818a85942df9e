#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "skqi/harness.hpp"
#include "skqi/metrics.hpp"
#include "skqi/multilevel.hpp"

using namespace skqi;
using doctest::Approx;

namespace {

std::vector<PointSet> spiral_levels(std::initializer_list<std::size_t> ns) {
  std::vector<PointSet> out;
  for (std::size_t n : ns) out.push_back(spiral_points(n));
  return out;
}

const RadialProfile kWendland = RadialProfile::wendland(3, 1);

}  // namespace

TEST_CASE("build_schedule: nominal fill distances, scales and contraction") {
  const auto s = build_schedule(spiral_levels({144, 576, 2304}), 2.0, FillMode::Nominal);
  REQUIRE(s.levels.size() == 3);
  CHECK(s.levels[0].h == Approx(1.0 / 12));
  CHECK(s.levels[1].h == Approx(1.0 / 24));
  CHECK(s.levels[2].h == Approx(1.0 / 48));
  for (const auto& l : s.levels) CHECK(l.rho == Approx(2.0 * std::sqrt(l.h)));
  CHECK(s.delta == Approx(0.5));
  CHECK(s.warnings.empty());
  // (1 + 2^-4) * 0.5
  CHECK(contraction_factor(s, 2.0) == Approx(0.53125));
  CHECK(contraction_factor(s, 0.0) == Approx(2.0));
}

TEST_CASE("build_schedule: empirical fill distances") {
  const auto s = build_schedule(spiral_levels({200, 800, 3200}), 1.5, FillMode::Empirical);
  for (std::size_t j = 0; j < s.levels.size(); ++j) {
    const double nominal = std::pow(double(s.levels[j].sites.size()), -0.5);
    CHECK(s.levels[j].h > 0.5 * nominal);
    CHECK(s.levels[j].h < 3.0 * nominal);
  }
  CHECK(s.delta > 0.35);
  CHECK(s.delta < 0.65);
  // Same probe seed, same result.
  const auto again = build_schedule(spiral_levels({200, 800, 3200}), 1.5, FillMode::Empirical);
  CHECK(again.levels[1].h == s.levels[1].h);

  // A ratio far below delta triggers a warning.
  const auto uneven = build_schedule(spiral_levels({100, 200, 20000}), 1.1, FillMode::Empirical);
  CHECK_FALSE(uneven.warnings.empty());
}

TEST_CASE("build_schedule: invalid schedules") {
  CHECK_THROWS_AS(build_schedule({}, 2.0, FillMode::Nominal), InvalidSchedule);
  CHECK_THROWS_AS(build_schedule(spiral_levels({144, 576}), 1.0, FillMode::Nominal), InvalidSchedule);
  // nu sqrt(h) = 3 / sqrt(2) >= 1
  CHECK_THROWS_AS(build_schedule(spiral_levels({4, 576}), 3.0, FillMode::Nominal), InvalidSchedule);
  CHECK_THROWS_AS(build_schedule(spiral_levels({576, 576}), 2.0, FillMode::Nominal), InvalidSchedule);
  CHECK_THROWS_AS(build_schedule(spiral_levels({576, 144}), 2.0, FillMode::Nominal), InvalidSchedule);
}

TEST_CASE("one level reduces to the plain quasi-interpolant") {
  const auto s = build_schedule(spiral_levels({400}), 2.0, FillMode::Nominal);
  const auto ml = multilevel_approximate(s, franke, kWendland, {});
  const auto& lv = s.levels[0];
  const auto q = qi_qmc(lv.sites, sample(franke, lv.sites), make_kernel(kWendland, lv.rho, 2));
  const auto pts = random_points(50, 2, 1);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(ml(pts[i]) == Approx(q(pts[i])).epsilon(1e-14));
  CHECK(s.delta == 0.0);
}

TEST_CASE("zero data gives the zero approximant") {
  const auto s = build_schedule(spiral_levels({144, 576}), 2.0, FillMode::Nominal);
  const auto ml = multilevel_approximate(s, [](PointRef) { return 0.0; }, kWendland, {});
  const auto pts = random_points(30, 2, 2);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(ml(pts[i]) == 0.0);
}

TEST_CASE("residual bookkeeping telescopes") {
  const auto s = build_schedule(spiral_levels({144, 576, 2304}), 2.5, FillMode::Nominal);
  MultilevelOptions opt;
  opt.noise = NoiseModel{NoiseModel::Kind::GaussianStd, 0.05, 77};
  const auto ml = multilevel_approximate(s, franke, kWendland, opt);
  REQUIRE(ml.levels() == 3);
  for (std::size_t j = 0; j < 3; ++j) {
    const auto& sites = s.levels[j].sites;
    const auto expect = add_noise(sample(franke, sites), {NoiseModel::Kind::GaussianStd, 0.05, derive_seed(77, j)});
    CHECK(ml.measurements(j) == expect);
    for (std::size_t i = 0; i < sites.size(); i += 37)
      CHECK(ml.residuals(j)[i] == Approx(expect[i] - ml.evaluate_partial(sites[i], j)).epsilon(1e-13));
  }
  const auto pts = random_points(20, 2, 3);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(ml.evaluate_partial(pts[i], 0) == 0.0);
    double sum = 0.0;
    for (std::size_t j = 0; j < 3; ++j) sum += ml.stage(j)(pts[i]);
    CHECK(ml(pts[i]) == Approx(sum));
  }
  CHECK_THROWS_AS(ml.evaluate_partial(pts[0], 4), InvalidArgument);
}

TEST_CASE("recursion matches the expanded operator form") {
  const auto pts = random_points(40, 2, 4);
  for (std::size_t n = 1; n <= 3; ++n) {
    std::vector<PointSet> base;
    for (std::size_t j = 0; j < n; ++j) base.push_back(spiral_points(100u << (2 * j)));
    const auto s = build_schedule(base, 2.0, FillMode::Nominal);
    const auto chk = expand_operators(s, franke, kWendland, 2, pts);
    CHECK(chk.levels == n);
    CHECK(chk.max_diff_m < 1e-12);
    CHECK(chk.max_diff_e < 1e-12);
  }
}

TEST_CASE("clean data: the error shrinks level by level") {
  const auto s = build_schedule(spiral_levels({144, 576, 2304, 9216}), 2.8, FillMode::Nominal);
  const auto rule = product_quadrature(kDefaultL2Degree);
  const auto pts = random_points(2000, 2, 5);
  MultilevelOptions opt;
  opt.error_rule = &rule;
  opt.linf_points = &pts;
  std::vector<LevelLog> log;
  multilevel_approximate(s, franke, kWendland, opt, &log);
  REQUIRE(log.size() == 4);
  for (std::size_t j = 1; j < log.size(); ++j) {
    CHECK(log[j].l2 < log[j - 1].l2);
    CHECK(log[j].linf < log[j - 1].linf);
  }

  const auto path = std::filesystem::temp_directory_path() / "skqi_test_levels.csv";
  write_level_log_csv(log, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "level,N,rho,L2err,Linferr");
  std::getline(in, line);
  CHECK(line.rfind("1,144,", 0) == 0);
}

TEST_CASE("smooth target, order 4 Gaussian: errors decay geometrically") {
  const auto f = [](PointRef x) { return eval_harmonic({3, 2}, x); };
  const auto s = build_schedule(spiral_levels({256, 1024, 4096}), 2.0, FillMode::Nominal);
  const auto rule = product_quadrature(30);
  MultilevelOptions opt;
  opt.order = 4;
  opt.error_rule = &rule;
  std::vector<LevelLog> log;
  multilevel_approximate(s, f, RadialProfile::gaussian(), opt, &log);
  for (std::size_t j = 1; j < log.size(); ++j) CHECK(log[j].l2 < 0.5 * log[j - 1].l2);
}
