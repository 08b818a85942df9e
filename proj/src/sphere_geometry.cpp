#include "skqi/sphere_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "skqi/harmonics.hpp"
#include "skqi/numerics.hpp"

namespace skqi {

std::string to_string(PointKind kind) {
  switch (kind) {
    case PointKind::Random: return "random";
    case PointKind::Spiral: return "spiral";
    case PointKind::TDesign: return "tdesign";
    case PointKind::MaxDeterminant: return "maxdet";
    case PointKind::Loaded: return "loaded";
  }
  return "unknown";
}

PointSet::PointSet(int dim, std::vector<double> coords, PointKind kind,
                   std::optional<std::uint64_t> seed)
    : dim_(dim), coords_(std::move(coords)), kind_(kind), seed_(seed) {
  if (dim_ < 1) throw InvalidArgument("PointSet: dimension must be >= 1");
  const auto stride = static_cast<std::size_t>(ambient());
  if (coords_.empty()) throw InvalidArgument("PointSet: empty point list");
  if (coords_.size() % stride != 0)
    throw InvalidArgument("PointSet: coordinate count is not a multiple of d+1");
  for (std::size_t i = 0; i < size(); ++i) {
    const auto p = (*this)[i];
    const double norm = std::sqrt(dot(p, p));
    if (std::abs(norm - 1.0) > 1e-12)
      throw InvalidArgument("PointSet: point " + std::to_string(i) + " is not unit norm");
  }
}

double QuadratureRule::integrate(const SphereFunction& f) const {
  CompensatedSum s;
  for (std::size_t j = 0; j < weights.size(); ++j) s.add(weights[j] * f(nodes[j]));
  return s.value();
}

PointSet random_points(std::size_t n, int d, std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("random_points: n must be >= 1");
  if (d < 1) throw InvalidArgument("random_points: d must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto stride = static_cast<std::size_t>(d + 1);
  std::vector<double> coords(n * stride);
  for (std::size_t i = 0; i < n; ++i) {
    double* p = coords.data() + i * stride;
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (std::size_t c = 0; c < stride; ++c) {
        p[c] = normal(rng);
        norm2 += p[c] * p[c];
      }
    } while (norm2 < 1e-300);
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t c = 0; c < stride; ++c) p[c] *= inv;
  }
  return PointSet(d, std::move(coords), PointKind::Random, seed);
}

PointSet spiral_points(std::size_t n) {
  if (n == 0) throw InvalidArgument("spiral_points: n must be >= 1");
  std::vector<double> coords(3 * n);
  const double nn = static_cast<double>(n);
  const double twist = 1.8 * std::sqrt(nn);
  for (std::size_t j = 1; j <= n; ++j) {
    const double z = 1.0 - (2.0 * j - 1.0) / nn;
    const double theta = std::acos(z);
    const double phi = std::fmod(twist * theta, 2.0 * std::numbers::pi);
    const double r = std::sqrt((1.0 - z) * (1.0 + z));
    coords[3 * (j - 1)] = r * std::cos(phi);
    coords[3 * (j - 1) + 1] = r * std::sin(phi);
    coords[3 * (j - 1) + 2] = z;
  }
  return PointSet(2, std::move(coords), PointKind::Spiral);
}

PointSet load_points(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("load_points: cannot open " + path.string());
  std::vector<double> coords;
  PointKind kind = PointKind::Loaded;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      std::string meta = line.substr(first + 1);
      std::transform(meta.begin(), meta.end(), meta.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      meta.erase(std::remove_if(meta.begin(), meta.end(), ::isspace), meta.end());
      if (meta == "kind:tdesign") kind = PointKind::TDesign;
      if (meta == "kind:maxdet") kind = PointKind::MaxDeterminant;
      continue;
    }
    std::istringstream row(line);
    double v[3];
    for (double& c : v)
      if (!(row >> c)) throw ParseError("load_points: expected three numbers", lineno);
    std::string extra;
    if (row >> extra) throw ParseError("load_points: trailing token '" + extra + "'", lineno);
    const double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-6)
      throw DataError("load_points: row " + std::to_string(lineno) + " has norm " +
                      std::to_string(norm));
    for (double c : v) coords.push_back(c / norm);
  }
  if (coords.empty()) throw DataError("load_points: no points in " + path.string());
  return PointSet(2, std::move(coords), kind);
}

void save_points(const PointSet& points, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("save_points: cannot write " + path.string());
  out << "# kind: " << to_string(points.kind()) << '\n';
  if (points.seed()) out << "# seed: " << *points.seed() << '\n';
  out << std::setprecision(17);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto p = points[i];
    for (std::size_t c = 0; c < p.size(); ++c) out << (c ? " " : "") << p[c];
    out << '\n';
  }
}

namespace {
double typical_spacing(std::size_t n) { return std::sqrt(4.0 * std::numbers::pi / n); }
}  // namespace

double fill_distance(const PointSet& sites, const PointSet& probe) {
  if (sites.size() == 0) throw InvalidArgument("fill_distance: empty site set");
  if (sites.dim() != probe.dim()) throw InvalidArgument("fill_distance: dimension mismatch");
  double worst = 0.0;
  if (sites.dim() == 2) {
    CapIndex index(sites, typical_spacing(sites.size()));
    for (std::size_t i = 0; i < probe.size(); ++i)
      worst = std::max(worst, index.nearest(probe[i]).second);
    return worst;
  }
  for (std::size_t i = 0; i < probe.size(); ++i) {
    double best = std::numbers::pi;
    for (std::size_t j = 0; j < sites.size(); ++j) best = std::min(best, geodesic(probe[i], sites[j]));
    worst = std::max(worst, best);
  }
  return worst;
}

double fill_distance_estimate(const PointSet& sites, std::uint64_t probe_seed, double factor) {
  const auto n = static_cast<std::size_t>(std::ceil(factor * sites.size()));
  return fill_distance(sites, random_points(std::max<std::size_t>(n, 1), sites.dim(), probe_seed));
}

double separation_distance(const PointSet& sites) {
  if (sites.size() < 2) throw InvalidArgument("separation_distance: need at least two points");
  double best = std::numbers::pi;
  if (sites.dim() == 2) {
    CapIndex index(sites, typical_spacing(sites.size()));
    for (std::size_t i = 0; i < sites.size(); ++i)
      best = std::min(best, index.nearest(sites[i], i).second);
  } else {
    for (std::size_t i = 0; i < sites.size(); ++i)
      for (std::size_t j = i + 1; j < sites.size(); ++j)
        best = std::min(best, geodesic(sites[i], sites[j]));
  }
  return 0.5 * best;
}

std::size_t product_quadrature_size(int degree) {
  const auto nz = static_cast<std::size_t>((degree + 2) / 2);
  return nz * static_cast<std::size_t>(degree + 1);
}

QuadratureRule product_quadrature(int degree) {
  if (degree < 0) throw InvalidArgument("product_quadrature: degree must be >= 0");
  const int nz = (degree + 2) / 2;
  const int nphi = degree + 1;
  const auto gl = numerics::gauss_legendre(nz);
  std::vector<double> coords;
  std::vector<double> weights;
  coords.reserve(3 * static_cast<std::size_t>(nz) * nphi);
  weights.reserve(static_cast<std::size_t>(nz) * nphi);
  for (int i = 0; i < nz; ++i) {
    const double z = gl.nodes[i];
    const double r = std::sqrt((1.0 - z) * (1.0 + z));
    for (int k = 0; k < nphi; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / nphi;
      coords.insert(coords.end(), {r * std::cos(phi), r * std::sin(phi), z});
      weights.push_back(0.5 * gl.weights[i] / nphi);
    }
  }
  return QuadratureRule{PointSet(2, std::move(coords), PointKind::Loaded), std::move(weights),
                        degree};
}

QuadratureRule design_quadrature(const PointSet& design, int claimed_degree) {
  if (design.dim() != 2) throw InvalidArgument("design_quadrature: S^2 only");
  const std::size_t n = design.size();
  const int L = std::max(claimed_degree, 0);
  std::vector<double> sums(static_cast<std::size_t>(L + 1) * (L + 1), 0.0);
  std::vector<double> y;
  for (std::size_t j = 0; j < n; ++j) {
    eval_harmonics_upto(L, design[j], y);
    for (std::size_t c = 0; c < sums.size(); ++c) sums[c] += y[c];
  }
  for (std::size_t c = 1; c < sums.size(); ++c) {
    if (std::abs(sums[c] / n) > 1e-10)
      throw DataError("design_quadrature: set is not exact to degree " +
                      std::to_string(claimed_degree));
  }
  return QuadratureRule{design, std::vector<double>(n, 1.0 / n), claimed_degree};
}

CapIndex::CapIndex(const PointSet& points, double cell_angle) : points_(&points) {
  if (points.dim() != 2) throw InvalidArgument("CapIndex: S^2 only");
  // Cap the cell count at a few cells per point.
  const double min_angle = std::sqrt(4.0 * std::numbers::pi / (4.0 * points.size() + 16.0));
  cell_angle = std::clamp(cell_angle, min_angle, std::numbers::pi);
  bands_ = std::max(1, static_cast<int>(std::ceil(std::numbers::pi / cell_angle)));
  band_angle_ = std::numbers::pi / bands_;
  sectors_.resize(bands_);
  band_first_.resize(bands_ + 1);
  std::size_t cells = 0;
  for (int b = 0; b < bands_; ++b) {
    const double lo = b * band_angle_;
    const double hi = (b + 1) * band_angle_;
    const double smax = (lo <= std::numbers::pi / 2 && hi >= std::numbers::pi / 2)
                            ? 1.0
                            : std::max(std::sin(lo), std::sin(hi));
    sectors_[b] = std::max(1, static_cast<int>(std::ceil(2.0 * std::numbers::pi * smax / band_angle_)));
    band_first_[b] = cells;
    cells += sectors_[b];
  }
  band_first_[bands_] = cells;

  std::vector<std::size_t> cell(points.size());
  std::vector<std::uint32_t> counts(cells + 1, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto p = points[i];
    double phi = std::atan2(p[1], p[0]);
    if (phi < 0.0) phi += 2.0 * std::numbers::pi;
    cell[i] = cell_of(std::acos(std::clamp(p[2], -1.0, 1.0)), phi);
    ++counts[cell[i] + 1];
  }
  for (std::size_t c = 0; c < cells; ++c) counts[c + 1] += counts[c];
  cell_start_ = counts;
  order_.resize(points.size());
  std::vector<std::uint32_t> cursor(counts.begin(), counts.end() - 1);
  for (std::size_t i = 0; i < points.size(); ++i) order_[cursor[cell[i]]++] = static_cast<std::uint32_t>(i);
}

std::size_t CapIndex::cell_of(double theta, double phi) const {
  const int b = std::clamp(static_cast<int>(theta / band_angle_), 0, bands_ - 1);
  const int sectors = sectors_[b];
  const int s = std::clamp(static_cast<int>(phi / (2.0 * std::numbers::pi / sectors)), 0, sectors - 1);
  return band_first_[b] + s;
}

std::pair<std::size_t, double> CapIndex::nearest(PointRef x, std::optional<std::size_t> exclude) const {
  const std::size_t n = points_->size();
  double radius = band_angle_;
  while (true) {
    std::size_t best_i = n;
    double best_c = -2.0;
    const double cos_r = std::cos(std::min(radius, std::numbers::pi));
    for_each_candidate(x, radius, [&](std::size_t i) {
      if (exclude && *exclude == i) return;
      const double c = dot(x, (*points_)[i]);
      if (c > best_c) {
        best_c = c;
        best_i = i;
      }
    });
    if (best_i < n && (best_c >= cos_r || radius >= std::numbers::pi))
      return {best_i, geodesic(x, (*points_)[best_i])};
    if (radius >= std::numbers::pi) return {n, std::numbers::pi};
    radius *= 2.0;
  }
}

}  // namespace skqi
