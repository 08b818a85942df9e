#include "skqi/baselines.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

namespace skqi {

double filter_h(double x, double a) {
  if (!(a > 1.0)) throw InvalidArgument("filter_h: a must be > 1");
  if (x < 0.0) throw InvalidArgument("filter_h: x must be >= 0");
  if (x <= 1.0) return 1.0;
  if (x >= a) return 0.0;
  const double y = (x - 1.0) / (a - 1.0);
  if (y < 1e-12) return 1.0;
  const double u = std::exp(-2.0 / y);
  return std::exp(2.0 * u / (y - 1.0));
}

int filtered_degree(int L, double a) {
  return std::max(static_cast<int>(std::ceil(a * L)) - 1, L);
}

Hyperinterpolant::Hyperinterpolant(int L, SpectralFunction coeffs, std::optional<FilterSpec> filter)
    : L_(L), coeffs_(std::move(coeffs)), filter_(filter) {}

void Hyperinterpolant::write_coeffs_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("write_coeffs_csv: cannot write " + path.string());
  out << "ell,k,coeff\n" << std::setprecision(17);
  for (int ell = 0; ell <= coeffs_.L_max(); ++ell)
    for (int k = 1; k <= 2 * ell + 1; ++k) out << ell << ',' << k << ',' << coeffs_(ell, k) << '\n';
}

Hyperinterpolant hyperinterpolate(int L, const QuadratureRule& rule, std::span<const double> values) {
  if (L < 0) throw InvalidArgument("hyperinterpolate: L must be >= 0");
  if (rule.exact_degree < 2 * L)
    throw InvalidArgument("hyperinterpolate: rule exact to degree " + std::to_string(rule.exact_degree) +
                          " but 2L = " + std::to_string(2 * L) + " is required");
  return Hyperinterpolant(L, project_values(values, L, rule), std::nullopt);
}

Hyperinterpolant filtered_hyperinterpolate(int L, double a, const QuadratureRule& rule,
                                           std::span<const double> values) {
  if (L < 1) throw InvalidArgument("filtered_hyperinterpolate: L must be >= 1");
  const int top = filtered_degree(L, a);
  if (rule.exact_degree < 2 * top)
    throw InvalidArgument("filtered_hyperinterpolate: rule exact to degree " + std::to_string(rule.exact_degree) +
                          " but " + std::to_string(2 * top) + " is required");
  SpectralFunction coeffs = project_values(values, top, rule);
  const FilterSpec filter{a};
  for (int ell = 0; ell <= top; ++ell) {
    const double h = filter(static_cast<double>(ell) / L);
    for (int k = 1; k <= 2 * ell + 1; ++k) coeffs(ell, k) *= h;
  }
  return Hyperinterpolant(L, std::move(coeffs), filter);
}

int matched_degree(std::size_t n, double a) {
  int best = -1;
  for (int L = 0; L < 4096; ++L) {
    const int top = a > 1.0 ? filtered_degree(L, a) : L;
    if (product_quadrature_size(2 * top) > n) break;
    best = L;
  }
  return best;
}

}  // namespace skqi
