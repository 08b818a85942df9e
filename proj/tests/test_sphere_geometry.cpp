#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "skqi/harmonics.hpp"
#include "skqi/sphere_geometry.hpp"

using namespace skqi;
using doctest::Approx;

namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  auto p = std::filesystem::temp_directory_path() / ("skqi_test_" + name);
  std::ofstream(p) << body;
  return p;
}

double brute_fill(const PointSet& x, const PointSet& probe) {
  double worst = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    double best = 10.0;
    for (std::size_t j = 0; j < x.size(); ++j) best = std::min(best, geodesic(probe[i], x[j]));
    worst = std::max(worst, best);
  }
  return worst;
}

double norm(PointRef p) { return std::sqrt(dot(p, p)); }

}  // namespace

TEST_CASE("random_points: unit norms, determinism, seed tag") {
  const auto a = random_points(1, 2, 7);
  CHECK(a.size() == 1);
  CHECK(norm(a[0]) == Approx(1.0).epsilon(1e-12));
  const auto b = random_points(500, 3, 99);
  const auto c = random_points(500, 3, 99);
  CHECK(b.coords() == c.coords());
  CHECK(b.kind() == PointKind::Random);
  CHECK(b.seed() == 99u);
  CHECK(b.ambient() == 4);
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(std::abs(norm(b[i]) - 1.0) < 1e-12);
  CHECK(random_points(10, 2, 1).coords() != random_points(10, 2, 2).coords());
}

TEST_CASE("random_points: uniform mean vector shrinks like N^-1/2") {
  const auto pts = random_points(100000, 2, 2024);
  double m[3] = {0, 0, 0};
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (int c = 0; c < 3; ++c) m[c] += pts[i][c];
  const double mean_norm = std::sqrt(m[0] * m[0] + m[1] * m[1] + m[2] * m[2]) / pts.size();
  CHECK(mean_norm < 0.02);
}

TEST_CASE("random_points: n = 0 is rejected") { CHECK_THROWS_AS(random_points(0, 2, 1), InvalidArgument); }

TEST_CASE("spiral_points: explicit small cases") {
  const auto one = spiral_points(1);
  const double phi1 = 1.8 * std::numbers::pi / 2;
  CHECK(one[0][2] == Approx(0.0).epsilon(1e-15));
  CHECK(one[0][0] == Approx(std::cos(phi1)).epsilon(1e-14));
  CHECK(one[0][1] == Approx(std::sin(phi1)).epsilon(1e-14));
  CHECK(phi1 == Approx(2.8274).epsilon(1e-4));

  const auto two = spiral_points(2);
  CHECK(two[0][2] == Approx(0.5));
  const double phi = std::atan2(two[0][1], two[0][0]);
  CHECK(std::fmod(phi + 2 * std::numbers::pi, 2 * std::numbers::pi) == Approx(2.6657).epsilon(1e-4));

  const auto many = spiral_points(777);
  for (std::size_t j = 0; j < many.size(); ++j) {
    CHECK(std::abs(many[j][2]) <= 1.0);
    CHECK(std::abs(norm(many[j]) - 1.0) < 1e-12);
    if (j > 0) CHECK(many[j][2] < many[j - 1][2]);
  }
}

TEST_CASE("load_points: formats, metadata and errors") {
  const auto pole = load_points(temp_file("pole.txt", "# a comment\n0 0 1\n"));
  CHECK(pole.size() == 1);
  CHECK(pole[0][2] == 1.0);
  CHECK(pole.kind() == PointKind::Loaded);

  const auto crlf = load_points(temp_file("crlf.txt", "# kind: maxdet\r\n1 0 0   \r\n  0 1 0\r\n\r\n"));
  CHECK(crlf.size() == 2);
  CHECK(crlf.kind() == PointKind::MaxDeterminant);

  const auto renorm = load_points(temp_file("renorm.txt", "0 0 1.0000004\n"));
  CHECK(renorm[0][2] == Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(load_points(temp_file("far.txt", "0 0 2\n")), DataError);
  try {
    load_points(temp_file("bad.txt", "0 0 1\n# ok\n0 zero 1\n"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
  }
  CHECK_THROWS_AS(load_points(temp_file("short.txt", "0 1\n")), ParseError);
  CHECK_THROWS_AS(load_points(temp_file("extra.txt", "0 0 1 4\n")), ParseError);
  CHECK_THROWS(load_points("/nonexistent/skqi/points.txt"));
}

TEST_CASE("load_points: shipped design fixtures") {
  const auto ico = load_points(std::filesystem::path(SKQI_DATA_DIR) / "icosahedron.txt");
  CHECK(ico.size() == 12);
  CHECK(ico.kind() == PointKind::TDesign);
  const auto rule = design_quadrature(ico, 5);
  CHECK(rule.exact_degree == 5);
  CHECK_THROWS_AS(design_quadrature(ico, 6), DataError);
  const auto oct = load_points(std::filesystem::path(SKQI_DATA_DIR) / "octahedron.txt");
  CHECK(oct.size() == 6);
  CHECK_NOTHROW(design_quadrature(oct, 3));
  CHECK_THROWS_AS(design_quadrature(oct, 4), DataError);
}

TEST_CASE("save_points round trip") {
  const auto pts = random_points(50, 2, 3);
  const auto p = std::filesystem::temp_directory_path() / "skqi_test_roundtrip.txt";
  save_points(pts, p);
  const auto back = load_points(p);
  REQUIRE(back.size() == pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (int c = 0; c < 3; ++c) CHECK(back[i][c] == Approx(pts[i][c]).epsilon(1e-15));
}

TEST_CASE("fill_distance: trivial cases") {
  const PointSet north(2, {0, 0, 1}, PointKind::Loaded);
  const PointSet south(2, {0, 0, -1}, PointKind::Loaded);
  CHECK(fill_distance(north, south) == Approx(std::numbers::pi));
  const auto s = spiral_points(300);
  CHECK(fill_distance(s, s) == Approx(0.0).epsilon(1e-7));
}

TEST_CASE("fill_distance: matches brute force and scales like N^-1/2") {
  const auto x = spiral_points(400);
  const auto probe = random_points(8000, 2, 11);
  const double fast = fill_distance(x, probe);
  CHECK(fast == Approx(brute_fill(x, probe)).epsilon(1e-12));
  // c fitted once from the brute-force scan on this set.
  const double c = brute_fill(x, probe) * std::sqrt(400.0);
  for (std::size_t n : {1600u, 6400u}) {
    const double h = fill_distance(spiral_points(n), random_points(20 * n, 2, n));
    CHECK(h >= 0.5 * c / std::sqrt(double(n)));
    CHECK(h <= 2.0 * c / std::sqrt(double(n)));
  }
  const double est = fill_distance_estimate(x, 5);
  CHECK(est > 0.0);
  CHECK(est <= fast * 1.5);
}

TEST_CASE("fill_distance: brute-force path for d = 3") {
  const auto x = random_points(60, 3, 1);
  const auto probe = random_points(500, 3, 2);
  CHECK(fill_distance(x, probe) == Approx(brute_fill(x, probe)));
}

TEST_CASE("separation_distance") {
  const PointSet antipodal(2, {0, 0, 1, 0, 0, -1}, PointKind::Loaded);
  CHECK(separation_distance(antipodal) == Approx(std::numbers::pi / 2));
  const PointSet dup(2, {1, 0, 0, 0, 1, 0, 1, 0, 0}, PointKind::Loaded);
  CHECK(separation_distance(dup) == Approx(0.0).epsilon(1e-7));
  CHECK_THROWS_AS(separation_distance(PointSet(2, {0, 0, 1}, PointKind::Loaded)), InvalidArgument);

  const auto s = spiral_points(100);
  double best = 10.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j) best = std::min(best, geodesic(s[i], s[j]));
  CHECK(separation_distance(s) == Approx(0.5 * best).epsilon(1e-12));

  const auto r = random_points(80, 4, 9);
  double best_r = 10.0;
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = i + 1; j < r.size(); ++j) best_r = std::min(best_r, geodesic(r[i], r[j]));
  CHECK(separation_distance(r) == Approx(0.5 * best_r));
}

TEST_CASE("separation does not exceed fill distance on quasi-uniform sets") {
  for (std::size_t n : {100u, 1000u, 5000u}) {
    const auto s = spiral_points(n);
    CHECK(separation_distance(s) <= fill_distance_estimate(s, 3));
  }
  const auto ico = load_points(std::filesystem::path(SKQI_DATA_DIR) / "icosahedron.txt");
  CHECK(separation_distance(ico) <= fill_distance_estimate(ico, 3));
}

TEST_CASE("product_quadrature: weights and exactness") {
  const auto q0 = product_quadrature(0);
  CHECK(q0.integrate([](PointRef) { return 1.0; }) == Approx(1.0).epsilon(1e-15));

  for (int deg : {0, 1, 5, 10, 31}) {
    const auto q = product_quadrature(deg);
    CHECK(q.size() == product_quadrature_size(deg));
    double s = 0.0;
    for (double w : q.weights) {
      CHECK(w > 0.0);
      s += w;
    }
    CHECK(s == Approx(1.0).epsilon(1e-12));
  }

  const auto q10 = product_quadrature(10);
  CHECK(std::abs(q10.integrate([](PointRef x) { return eval_harmonic({5, 3}, x); })) < 1e-12);
  CHECK(q10.integrate([](PointRef x) {
    const double y = eval_harmonic({4, 2}, x);
    return y * y;
  }) == Approx(1.0).epsilon(1e-10));
}

TEST_CASE("product_quadrature: Gram matrix is the identity up to the exact degree") {
  const int deg = 12;
  const auto q = product_quadrature(deg);
  std::vector<double> y;
  const int L = deg / 2;
  const std::size_t m = static_cast<std::size_t>((L + 1) * (L + 1));
  std::vector<double> gram(m * m, 0.0);
  for (std::size_t j = 0; j < q.size(); ++j) {
    eval_harmonics_upto(L, q.nodes[j], y);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) gram[a * m + b] += q.weights[j] * y[a] * y[b];
  }
  double worst = 0.0;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) worst = std::max(worst, std::abs(gram[a * m + b] - (a == b ? 1.0 : 0.0)));
  CHECK(worst < 1e-10);
  // Single harmonics integrate to zero up to the full degree.
  eval_harmonics_upto(deg, q.nodes[0], y);
  std::vector<double> sums(y.size(), 0.0);
  for (std::size_t j = 0; j < q.size(); ++j) {
    eval_harmonics_upto(deg, q.nodes[j], y);
    for (std::size_t c = 0; c < y.size(); ++c) sums[c] += q.weights[j] * y[c];
  }
  for (std::size_t c = 1; c < sums.size(); ++c) CHECK(std::abs(sums[c]) < 1e-10);
}

TEST_CASE("PointSet rejects invalid input") {
  CHECK_THROWS_AS(PointSet(2, {}, PointKind::Loaded), InvalidArgument);
  CHECK_THROWS_AS(PointSet(2, {0, 0}, PointKind::Loaded), InvalidArgument);
  CHECK_THROWS_AS(PointSet(2, {0, 0, 1.001}, PointKind::Loaded), InvalidArgument);
}

TEST_CASE("CapIndex candidates cover every point in the cap") {
  const auto pts = random_points(3000, 2, 77);
  const auto queries = random_points(50, 2, 78);
  CapIndex index(pts, 0.1);
  for (double angle : {0.05, 0.3, 1.2, 3.0}) {
    for (std::size_t q = 0; q < queries.size(); ++q) {
      std::vector<char> seen(pts.size(), 0);
      index.for_each_candidate(queries[q], angle, [&](std::size_t i) { seen[i] = 1; });
      for (std::size_t i = 0; i < pts.size(); ++i)
        if (geodesic(queries[q], pts[i]) <= angle) CHECK(seen[i]);
    }
  }
}
