#include "skqi/harmonics.hpp"

#include <algorithm>
#include <cmath>

namespace skqi {

namespace {
unsigned __int128 binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}
}  // namespace

std::uint64_t harmonic_dim(int d, int ell) {
  if (d < 1 || ell < 0) throw InvalidArgument("harmonic_dim: need d >= 1 and ell >= 0");
  if (ell == 0) return 1;
  // Homogeneous harmonic polynomials of degree ell in d+1 variables.
  const auto a = binomial(static_cast<std::uint64_t>(ell + d), static_cast<std::uint64_t>(d));
  const auto b = ell >= 2 ? binomial(static_cast<std::uint64_t>(ell + d - 2), static_cast<std::uint64_t>(d)) : 0;
  return static_cast<std::uint64_t>(a - b);
}

double legendre(int ell, int d, double t) {
  if (!(std::abs(t) <= 1.0)) throw InvalidArgument("legendre: |t| must be <= 1");
  if (ell < 0 || d < 1) throw InvalidArgument("legendre: need ell >= 0, d >= 1");
  if (ell == 0) return 1.0;
  double p0 = 1.0, p1 = t;
  for (int n = 1; n < ell; ++n) {
    const double p2 = ((2.0 * n + d - 1.0) * t * p1 - n * p0) / (n + d - 1.0);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

void eval_harmonics_upto(int L, PointRef x, std::vector<double>& out) {
  if (L < 0) throw InvalidArgument("eval_harmonics_upto: L must be >= 0");
  const std::size_t count = static_cast<std::size_t>(L + 1) * (L + 1);
  out.assign(count, 0.0);
  const double t = std::clamp(x[2], -1.0, 1.0);
  const double u = std::sqrt(x[0] * x[0] + x[1] * x[1]);
  double cphi = 1.0, sphi = 0.0;
  if (u > 0.0) {
    cphi = x[0] / u;
    sphi = x[1] / u;
  }
  // cos(m phi), sin(m phi) by the angle-addition recurrence.
  std::vector<double> cm(L + 1), sm(L + 1);
  cm[0] = 1.0;
  sm[0] = 0.0;
  for (int m = 1; m <= L; ++m) {
    cm[m] = cm[m - 1] * cphi - sm[m - 1] * sphi;
    sm[m] = sm[m - 1] * cphi + cm[m - 1] * sphi;
  }
  // Fully normalized associated Legendre functions (unit mean square on S^2).
  double pmm = 1.0;
  for (int m = 0; m <= L; ++m) {
    if (m == 1)
      pmm = std::sqrt(3.0) * u;
    else if (m >= 2)
      pmm *= u * std::sqrt((2.0 * m + 1.0) / (2.0 * m));
    double pl2 = 0.0;
    double pl1 = pmm;
    for (int ell = m; ell <= L; ++ell) {
      double p;
      if (ell == m) {
        p = pmm;
      } else if (ell == m + 1) {
        p = std::sqrt(2.0 * m + 3.0) * t * pmm;
        pl2 = pmm;
        pl1 = p;
      } else {
        const double a = std::sqrt((2.0 * ell - 1.0) * (2.0 * ell + 1.0) /
                                   (static_cast<double>(ell - m) * (ell + m)));
        const double b = std::sqrt((2.0 * ell + 1.0) * (ell + m - 1.0) * (ell - m - 1.0) /
                                   (static_cast<double>(ell - m) * (ell + m) * (2.0 * ell - 3.0)));
        p = a * t * pl1 - b * pl2;
        pl2 = pl1;
        pl1 = p;
      }
      const std::size_t base = static_cast<std::size_t>(ell) * ell + ell;  // m = 0 slot
      if (m == 0) {
        out[base] = p;
      } else {
        out[base + m] = p * cm[m];
        out[base - m] = p * sm[m];
      }
    }
  }
}

double eval_harmonic(const HarmonicIndex& idx, PointRef x) {
  if (idx.dim != 2) throw InvalidArgument("eval_harmonic: S^2 only");
  if (idx.ell < 0 || idx.k < 1 || idx.k > 2 * idx.ell + 1)
    throw InvalidArgument("eval_harmonic: order index out of range");
  std::vector<double> y;
  eval_harmonics_upto(idx.ell, x, y);
  return y[coeff_index(idx.ell, idx.k)];
}

SpectralFunction::SpectralFunction(int L_max)
    : L_max_(L_max), coeffs_(static_cast<std::size_t>(L_max + 1) * (L_max + 1), 0.0) {
  if (L_max < 0) throw InvalidArgument("SpectralFunction: L_max must be >= 0");
}

SpectralFunction::SpectralFunction(int L_max, std::vector<double> coeffs)
    : L_max_(L_max), coeffs_(std::move(coeffs)) {
  if (L_max < 0 || coeffs_.size() != static_cast<std::size_t>(L_max + 1) * (L_max + 1))
    throw InvalidArgument("SpectralFunction: coefficient count must be (L_max+1)^2");
}

double SpectralFunction::evaluate(PointRef x) const {
  std::vector<double> y;
  eval_harmonics_upto(L_max_, x, y);
  double s = 0.0;
  for (std::size_t c = 0; c < y.size(); ++c) s += coeffs_[c] * y[c];
  return s;
}

double SpectralFunction::sobolev_norm(double s) const {
  double total = 0.0;
  for (int ell = 0; ell <= L_max_; ++ell) {
    const double w = std::pow(1.0 + ell, 2.0 * s);
    for (int k = 1; k <= 2 * ell + 1; ++k) total += w * (*this)(ell, k) * (*this)(ell, k);
  }
  return std::sqrt(total);
}

SpectralFunction project_values(std::span<const double> values, int L_max, const QuadratureRule& rule) {
  if (values.size() != rule.size()) throw InvalidArgument("project_values: one value per node required");
  const std::size_t count = static_cast<std::size_t>(L_max + 1) * (L_max + 1);
  std::vector<CompensatedSum> acc(count);
  std::vector<double> y;
  for (std::size_t j = 0; j < rule.size(); ++j) {
    eval_harmonics_upto(L_max, rule.nodes[j], y);
    const double wv = rule.weights[j] * values[j];
    for (std::size_t c = 0; c < count; ++c) acc[c].add(wv * y[c]);
  }
  std::vector<double> coeffs(count);
  for (std::size_t c = 0; c < count; ++c) coeffs[c] = acc[c].value();
  return SpectralFunction(L_max, std::move(coeffs));
}

SpectralFunction project(const SphereFunction& f, int L_max, const QuadratureRule& rule) {
  std::vector<double> values(rule.size());
  for (std::size_t j = 0; j < rule.size(); ++j) values[j] = f(rule.nodes[j]);
  return project_values(values, L_max, rule);
}

}  // namespace skqi
