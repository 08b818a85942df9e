#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "skqi/common.hpp"

namespace skqi {

enum class PointKind { Random, Spiral, TDesign, MaxDeterminant, Loaded };

std::string to_string(PointKind kind);

/// Unit-norm sample sites on S^d, stored row-major with d+1 coordinates per point.
class PointSet {
 public:
  /// Validates the invariants: non-empty, rows of length d+1, unit norm within 1e-12.
  PointSet(int dim, std::vector<double> coords, PointKind kind,
           std::optional<std::uint64_t> seed = std::nullopt);

  int dim() const { return dim_; }
  int ambient() const { return dim_ + 1; }
  std::size_t size() const { return coords_.size() / ambient(); }
  PointKind kind() const { return kind_; }
  const std::optional<std::uint64_t>& seed() const { return seed_; }
  const std::vector<double>& coords() const { return coords_; }

  PointRef operator[](std::size_t i) const {
    return PointRef(coords_.data() + i * ambient(), static_cast<std::size_t>(ambient()));
  }

 private:
  int dim_;
  std::vector<double> coords_;
  PointKind kind_;
  std::optional<std::uint64_t> seed_;
};

/// Positive weights summing to one over nodes on S^2, exact to `exact_degree`.
struct QuadratureRule {
  PointSet nodes;
  std::vector<double> weights;
  int exact_degree;

  std::size_t size() const { return weights.size(); }
  double integrate(const SphereFunction& f) const;
};

PointSet random_points(std::size_t n, int d, std::uint64_t seed);

/// Generalized spiral points on S^2.
PointSet spiral_points(std::size_t n);

/// Reads an ASCII point file (three floats per line, '#' comments). A comment line
/// `# kind: tdesign` or `# kind: maxdet` tags the set accordingly.
PointSet load_points(const std::filesystem::path& path);

/// Writes the same format read by load_points.
void save_points(const PointSet& points, const std::filesystem::path& path);

/// Max over probe points of the geodesic distance to the nearest site.
double fill_distance(const PointSet& sites, const PointSet& probe);

/// Dense random probe of `factor` times |sites| points, then fill_distance.
double fill_distance_estimate(const PointSet& sites, std::uint64_t probe_seed,
                              double factor = 20.0);

/// Half the minimum pairwise geodesic distance.
double separation_distance(const PointSet& sites);

/// Gauss-Legendre in z times equispaced longitudes; exact for degree <= `degree`.
QuadratureRule product_quadrature(int degree);

/// Number of nodes product_quadrature(degree) produces.
std::size_t product_quadrature_size(int degree);

/// Equal-weight rule from a loaded design; exactness up to `claimed_degree` is
/// verified against the harmonic basis before the rule is returned.
QuadratureRule design_quadrature(const PointSet& design, int claimed_degree);

/// Bucket index over points on S^2 for radius queries.
///
/// Cells are latitude bands of equal polar angle subdivided into longitude sectors
/// of roughly equal arc length. Queries visit all cells intersecting the cap.
class CapIndex {
 public:
  /// `cell_angle` is the target angular cell size in radians.
  CapIndex(const PointSet& points, double cell_angle);

  /// Calls visit(i) for every point within geodesic angle `angle` of x (may include a
  /// few points slightly outside; callers filter on the exact kernel value).
  template <typename Visit>
  void for_each_candidate(PointRef x, double angle, Visit&& visit) const {
    visit_cells(x, angle, [&](std::size_t cell) {
      for (std::uint32_t k = cell_start_[cell]; k < cell_start_[cell + 1]; ++k) visit(order_[k]);
    });
  }

  /// Index and geodesic distance of the nearest point, optionally excluding one index.
  std::pair<std::size_t, double> nearest(PointRef x,
                                         std::optional<std::size_t> exclude = std::nullopt) const;

  double cell_angle() const { return band_angle_; }

 private:
  template <typename F>
  void visit_cells(PointRef x, double angle, F&& f) const;

  std::size_t cell_of(double theta, double phi) const;

  const PointSet* points_;
  double band_angle_;
  int bands_;
  std::vector<int> sectors_;           // per band
  std::vector<std::size_t> band_first_;  // first cell index per band
  std::vector<std::uint32_t> cell_start_;
  std::vector<std::uint32_t> order_;
};

}  // namespace skqi

#include "skqi/detail/cap_index.ipp"
