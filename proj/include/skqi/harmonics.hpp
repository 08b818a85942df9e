#pragma once

#include <cstdint>
#include <vector>

#include "skqi/common.hpp"
#include "skqi/sphere_geometry.hpp"

namespace skqi {

/// Degree ell and order index k in 1..Z(d, ell). On S^2, k = m + ell + 1 with m in -ell..ell.
struct HarmonicIndex {
  int ell;
  int k;
  int dim = 2;
};

/// Dimension Z(d, ell) of the degree-ell harmonics on S^d, exact.
std::uint64_t harmonic_dim(int d, int ell);

/// Legendre (Gegenbauer) polynomial P_ell(d+1; t) normalized so that P_ell(d+1; 1) = 1.
double legendre(int ell, int d, double t);

/// Real spherical harmonic on S^2, orthonormal under the unit-mass surface measure.
double eval_harmonic(const HarmonicIndex& idx, PointRef x);

/// All real harmonics of degree <= L at x. out[ell*ell + k - 1] holds Y_{ell,k}(x).
void eval_harmonics_upto(int L, PointRef x, std::vector<double>& out);

inline std::size_t coeff_index(int ell, int k) {
  return static_cast<std::size_t>(ell) * ell + static_cast<std::size_t>(k - 1);
}

/// Fourier-Legendre coefficients on S^2 up to degree L_max.
class SpectralFunction {
 public:
  explicit SpectralFunction(int L_max);
  SpectralFunction(int L_max, std::vector<double> coeffs);

  int L_max() const { return L_max_; }
  double operator()(int ell, int k) const { return coeffs_[coeff_index(ell, k)]; }
  double& operator()(int ell, int k) { return coeffs_[coeff_index(ell, k)]; }
  const std::vector<double>& coeffs() const { return coeffs_; }

  double evaluate(PointRef x) const;
  /// Sum over ell, k of (1 + ell)^(2s) |coeff|^2, square-rooted.
  double sobolev_norm(double s) const;
  /// L2 norm by Parseval.
  double l2_norm() const { return sobolev_norm(0.0); }

 private:
  int L_max_;
  std::vector<double> coeffs_;
};

/// Discrete projection f_hat(ell,k) = sum_j w_j f(x_j) Y_{ell,k}(x_j). The rule should be
/// exact to at least 2 * L_max for the result to be the true projection.
SpectralFunction project(const SphereFunction& f, int L_max, const QuadratureRule& rule);

/// Same as project() but takes already sampled values at the rule nodes.
SpectralFunction project_values(std::span<const double> values, int L_max, const QuadratureRule& rule);

}  // namespace skqi
