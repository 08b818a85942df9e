#pragma once

#include <filesystem>
#include <optional>

#include "skqi/harmonics.hpp"

namespace skqi {

/// Smooth cutoff: 1 on [0,1], 0 on [a, inf), C-infinity transition in between.
double filter_h(double x, double a);

struct FilterSpec {
  double a = 1.2;
  double operator()(double x) const { return filter_h(x, a); }
};

/// max(ceil(a L) - 1, L)
int filtered_degree(int L, double a);

class Hyperinterpolant {
 public:
  Hyperinterpolant(int L, SpectralFunction coeffs, std::optional<FilterSpec> filter);

  double evaluate(PointRef x) const { return coeffs_.evaluate(x); }
  double operator()(PointRef x) const { return evaluate(x); }
  int L() const { return L_; }
  const SpectralFunction& coeffs() const { return coeffs_; }
  const std::optional<FilterSpec>& filter() const { return filter_; }

  /// CSV with header `ell,k,coeff`.
  void write_coeffs_csv(const std::filesystem::path& path) const;

 private:
  int L_;
  SpectralFunction coeffs_;
  std::optional<FilterSpec> filter_;
};

/// Discrete projection onto degree <= L; the rule must be exact to degree 2L.
Hyperinterpolant hyperinterpolate(int L, const QuadratureRule& rule, std::span<const double> values);

/// Coefficients h(ell / L) f_hat(ell, k) up to filtered_degree(L, a); the rule must be exact
/// to twice that degree.
Hyperinterpolant filtered_hyperinterpolate(int L, double a, const QuadratureRule& rule,
                                           std::span<const double> values);

/// Largest L whose filtered rule product_quadrature(2 * filtered_degree(L, a)) has at most n nodes
/// (a = 1 gives plain hyperinterpolation). Returns -1 when even L = 0 does not fit.
int matched_degree(std::size_t n, double a);

}  // namespace skqi
