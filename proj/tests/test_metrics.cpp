#include <cmath>
#include <random>

#include "doctest.h"
#include "skqi/harness.hpp"
#include "skqi/metrics.hpp"

using namespace skqi;
using doctest::Approx;

TEST_CASE("l2_error and linf_error on known differences") {
  const auto rule = product_quadrature(10);
  const auto zero = [](PointRef) { return 0.0; };
  CHECK(l2_error(franke, franke, rule) == 0.0);
  CHECK(l2_error([](PointRef) { return 0.25; }, zero, rule) == Approx(0.25));
  // ||x_3|| in unit-mass L2 is 1/sqrt(3).
  CHECK(l2_error([](PointRef x) { return x[2]; }, zero, rule) == Approx(1.0 / std::sqrt(3.0)));
  const auto pts = random_points(1000, 2, 1);
  CHECK(linf_error([](PointRef x) { return x[0]; }, zero, pts) <= 1.0);
  CHECK(linf_error([](PointRef x) { return x[0]; }, zero, pts) > 0.99);
  const PointSet one(2, {0, 0, 1}, PointKind::Loaded);
  CHECK(linf_error([](PointRef x) { return 2 * x[2]; }, zero, one) == Approx(2.0));
}

TEST_CASE("mmse: constant offsets per seed") {
  const auto pts = random_points(20, 2, 2);
  const auto builder = [](std::uint64_t seed) {
    return SphereFunction([seed](PointRef x) { return franke(x) + static_cast<double>(seed); });
  };
  const std::vector<std::uint64_t> seeds{1, 2, 3};
  CHECK(mmse(builder, franke, seeds, pts) == Approx(14.0 / 3.0));
  const std::vector<std::uint64_t> perm{3, 1, 2};
  CHECK(mmse(builder, franke, perm, pts) == Approx(14.0 / 3.0));
  CHECK(mmse(builder, franke, std::vector<std::uint64_t>{0}, pts) == 0.0);
  CHECK_THROWS_AS(mmse(builder, franke, std::vector<std::uint64_t>{}, pts), InvalidArgument);
}

TEST_CASE("mmse: max over points of the mean square") {
  const double p[6] = {0, 0, 1, 1, 0, 0};
  const PointSet pts(2, std::vector<double>(p, p + 6), PointKind::Loaded);
  // error e(x) = seed * x_3: mean square is (1 + 4) / 2 at the pole, 0 at the equator point
  const auto builder = [](std::uint64_t seed) {
    return SphereFunction([seed](PointRef x) { return static_cast<double>(seed) * x[2]; });
  };
  const auto zero = [](PointRef) { return 0.0; };
  CHECK(mmse(builder, zero, std::vector<std::uint64_t>{1, 2}, pts) == Approx(2.5));

  // trials + base_seed goes through derive_seed
  std::vector<std::uint64_t> seen;
  const auto recording = [&](std::uint64_t seed) {
    seen.push_back(seed);
    return SphereFunction(zero);
  };
  mmse(recording, zero, 3, pts, 42);
  REQUIRE(seen.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(seen[i] == derive_seed(42, i));
}

TEST_CASE("fit_slope: exact power laws") {
  const std::vector<double> ns{100, 1000, 10000};
  std::vector<double> errs;
  for (double n : ns) errs.push_back(5.0 / n);
  const auto f = fit_slope(ns, errs);
  CHECK(f.slope == Approx(-1.0));
  CHECK(f.intercept == Approx(std::log10(5.0)));

  const std::vector<double> ns2{1024, 2048, 4096, 8192, 16384};
  std::vector<double> e2;
  for (double n : ns2) e2.push_back(10.31 * std::pow(n, -0.96));
  CHECK(fit_slope(ns2, e2).slope == Approx(-0.96));
  CHECK(fit_slope(ns2, e2).intercept == Approx(std::log10(10.31)));

  CHECK_THROWS_AS(fit_slope(std::vector<double>{1}, std::vector<double>{1}), InvalidArgument);
  CHECK_THROWS_AS(fit_slope(std::vector<double>{1, 2}, std::vector<double>{1}), InvalidArgument);
  CHECK_THROWS_AS(fit_slope(std::vector<double>{4, 4}, std::vector<double>{1, 2}), InvalidArgument);
  CHECK_THROWS_AS(fit_slope(std::vector<double>{1, 2}, std::vector<double>{1, 0}), InvalidArgument);
}

TEST_CASE("fit_slope: 5% multiplicative noise keeps the slope within 0.05") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<double> ns, errs;
  for (double n = 1024; n <= 16384; n *= 2) {
    ns.push_back(n);
    errs.push_back(3.0 * std::pow(n, -0.5) * (1.0 + noise(rng)));
  }
  CHECK(std::abs(fit_slope(ns, errs).slope + 0.5) < 0.05);
}

TEST_CASE("ErrorReport CSV") {
  ErrorReport r;
  r.n = 1024;
  r.l2 = 0.5;
  r.linf = 0.25;
  r.wall_time_s = 1.5;
  CHECK(ErrorReport::csv_header() == "N,L2err,Linferr,MMSE,time_s");
  CHECK(r.csv_row() == "1024,0.5,0.25,,1.500000");
  r.mmse = 0.125;
  CHECK(r.csv_row() == "1024,0.5,0.25,0.125,1.500000");
}
