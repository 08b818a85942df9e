#include "skqi/kernels.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>

#include "skqi/harmonics.hpp"
#include "skqi/numerics.hpp"

namespace skqi {

namespace {

// Gauss points per panel for the polar-angle integrals.
constexpr int kPanelOrder = 20;
// exp(-r^2) < 1e-20 beyond this radius.
const double kGaussianCutoff = std::sqrt(20.0 * std::log(10.0));

double wendland_value(int l, int k, double r) {
  if (r >= 1.0) return 0.0;
  const double s = 1.0 - r;
  const double L = l;
  switch (k) {
    case 0:
      return std::pow(s, l);
    case 1:
      return std::pow(s, l + 1) * ((L + 1.0) * r + 1.0);
    case 2:
      return std::pow(s, l + 2) * ((L * L + 4.0 * L + 3.0) * r * r + (3.0 * L + 6.0) * r + 3.0) / 3.0;
    default:
      return std::pow(s, l + 3) *
             ((L * L * L + 9.0 * L * L + 23.0 * L + 15.0) * r * r * r +
              (6.0 * L * L + 36.0 * L + 45.0) * r * r + (15.0 * L + 45.0) * r + 15.0) /
             15.0;
  }
}

// 1 / integral_0^pi sin^(d-1)(theta) d theta
double sphere_constant(int d) {
  return std::tgamma((d + 1) / 2.0) / (std::sqrt(std::numbers::pi) * std::tgamma(d / 2.0));
}

// Polar angle beyond which phi(|x - y| / rho) vanishes numerically.
double cutoff_angle(const RadialProfile& profile, double rho) {
  const double chord = profile.cutoff_radius() * rho;
  if (!(chord < 2.0)) return std::numbers::pi;
  return 2.0 * std::asin(0.5 * chord);
}

}  // namespace

RadialProfile RadialProfile::gaussian() {
  RadialProfile p;
  p.family_ = ProfileFamily::Gaussian;
  return p;
}

RadialProfile RadialProfile::wendland(int l, int k) {
  if (k < 0 || k > 3 || l < k + 1)
    throw InvalidArgument("wendland_profile: need k in {0,1,2,3} and l >= k+1 (got l=" +
                          std::to_string(l) + ", k=" + std::to_string(k) + ")");
  RadialProfile p;
  p.family_ = ProfileFamily::Wendland;
  p.l_ = l;
  p.k_ = k;
  p.support_ = 1.0;
  return p;
}

RadialProfile RadialProfile::custom(std::function<double(double)> f, std::string name, double support) {
  RadialProfile p;
  p.family_ = ProfileFamily::Custom;
  p.custom_ = std::move(f);
  p.custom_name_ = std::move(name);
  p.support_ = support;
  return p;
}

double RadialProfile::operator()(double r) const {
  switch (family_) {
    case ProfileFamily::Gaussian:
      return std::exp(-r * r);
    case ProfileFamily::Wendland:
      return wendland_value(l_, k_, r);
    case ProfileFamily::Custom:
      return r >= support_ ? 0.0 : custom_(r);
  }
  return 0.0;
}

double RadialProfile::cutoff_radius() const {
  if (family_ == ProfileFamily::Gaussian) return kGaussianCutoff;
  return support_;
}

std::string RadialProfile::name() const {
  switch (family_) {
    case ProfileFamily::Gaussian:
      return "gaussian";
    case ProfileFamily::Wendland:
      return "wendland(l=" + std::to_string(l_) + ",k=" + std::to_string(k_) + ")";
    case ProfileFamily::Custom:
      return custom_name_;
  }
  return "";
}

namespace {
double lambda_unchecked(const RadialProfile& profile, double rho, int d, int panels) {
  const double theta_max = cutoff_angle(profile, rho);
  const double value =
      sphere_constant(d) *
      numerics::integrate(
          [&](double theta) {
            return profile(2.0 * std::sin(0.5 * theta) / rho) * std::pow(std::sin(theta), d - 1);
          },
          0.0, theta_max, panels, kPanelOrder);
  if (!(value > 0.0)) throw DegenerateKernel("normalization_lambda: kernel integrates to " + std::to_string(value));
  return value;
}
}  // namespace

double normalization_lambda(const RadialProfile& profile, double rho, int d, int panels) {
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidArgument("normalization_lambda: rho must lie in (0,1)");
  if (d < 1) throw InvalidArgument("normalization_lambda: d must be >= 1");
  if (panels < 1) throw InvalidArgument("normalization_lambda: panels must be >= 1");
  return lambda_unchecked(profile, rho, d, panels);
}

ZonalKernel::ZonalKernel(RadialProfile profile, double rho, int dim, std::vector<Term> terms, int order)
    : profile_(std::move(profile)), rho_(rho), dim_(dim), terms_(std::move(terms)), order_(order) {
  if (terms_.empty()) throw InvalidArgument("ZonalKernel: no terms");
  cutoff_chord_ = 0.0;
  for (const auto& t : terms_) cutoff_chord_ = std::max(cutoff_chord_, profile_.cutoff_radius() * t.rho);
  cutoff_chord_ = std::min(cutoff_chord_, 2.0);
}

double ZonalKernel::operator()(double t) const {
  const double chord = std::sqrt(std::max(0.0, 2.0 - 2.0 * t));
  double v = 0.0;
  for (const auto& term : terms_) v += term.weight * profile_(chord / term.rho) / term.lambda;
  return v;
}

std::vector<double> extrapolation_weights(int terms) {
  if (terms < 1) throw InvalidArgument("extrapolation_weights: need at least one term");
  const auto p = static_cast<std::size_t>(terms);
  // Rows q = 0..p-1: sum_i w_i c_i^q = [q == 0], c_i = 2^-i.
  std::vector<std::vector<double>> a(p, std::vector<double>(p + 1, 0.0));
  for (std::size_t q = 0; q < p; ++q) {
    for (std::size_t i = 0; i < p; ++i) a[q][i] = std::pow(2.0, -static_cast<double>(i * q));
    a[q][p] = q == 0 ? 1.0 : 0.0;
  }
  for (std::size_t c = 0; c < p; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < p; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    for (std::size_t r = 0; r < p; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t j = c; j <= p; ++j) a[r][j] -= f * a[c][j];
    }
  }
  std::vector<double> w(p);
  for (std::size_t i = 0; i < p; ++i) w[i] = a[i][p] / a[i][i];
  return w;
}

ZonalKernel make_kernel(const RadialProfile& profile, double rho, int d) { return make_kernel(profile, rho, d, 2); }

ZonalKernel make_kernel(const RadialProfile& profile, double rho, int d, int order) {
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidArgument("make_kernel: rho must lie in (0,1)");
  if (order < 2 || order % 2 != 0) throw InvalidArgument("make_kernel: order must be an even integer >= 2");
  const int p = order / 2;
  const auto weights = extrapolation_weights(p);
  std::vector<ZonalKernel::Term> terms;
  for (int i = 0; i < p; ++i) {
    const double r = rho * std::pow(2.0, -0.5 * i);
    terms.push_back({weights[i], r, lambda_unchecked(profile, r, d, 64)});
  }
  return ZonalKernel(profile, rho, d, std::move(terms), order);
}

KernelSpectrum spectrum_quadrature(const ZonalKernel& kernel, int L_max) {
  if (L_max < 0) throw InvalidArgument("spectrum_quadrature: L_max must be >= 0");
  const int d = kernel.dim();
  const double cd = sphere_constant(d);
  std::vector<double> coeffs(static_cast<std::size_t>(L_max) + 1, 0.0);
  const auto& profile = kernel.profile();
  const auto& gauss = numerics::gauss_legendre(kPanelOrder);
  std::vector<double> p(static_cast<std::size_t>(L_max) + 1);
  for (const auto& term : kernel.terms()) {
    const double theta_max = cutoff_angle(profile, term.rho);
    const int points = 8 * (L_max + static_cast<int>(std::ceil(1.0 / term.rho)));
    const int panels = std::max(4, (points + kPanelOrder - 1) / kPanelOrder);
    const double h = theta_max / panels;
    std::vector<CompensatedSum> acc(coeffs.size());
    for (int pan = 0; pan < panels; ++pan) {
      const double mid = (pan + 0.5) * h;
      for (int i = 0; i < kPanelOrder; ++i) {
        const double theta = mid + 0.5 * h * gauss.nodes[i];
        const double t = std::cos(theta);
        const double w = 0.5 * h * gauss.weights[i] * std::pow(std::sin(theta), d - 1) *
                         profile(2.0 * std::sin(0.5 * theta) / term.rho) / term.lambda;
        if (w == 0.0) continue;
        // P_ell(d+1; t) by the normalized three-term recurrence.
        p[0] = 1.0;
        if (L_max >= 1) p[1] = t;
        for (int n = 1; n < L_max; ++n)
          p[n + 1] = ((2.0 * n + d - 1.0) * t * p[n] - n * p[n - 1]) / (n + d - 1.0);
        for (int ell = 0; ell <= L_max; ++ell) acc[ell].add(w * p[ell]);
      }
    }
    for (int ell = 0; ell <= L_max; ++ell) coeffs[ell] += term.weight * cd * acc[ell].value();
  }
  return KernelSpectrum{kernel.rho(), d, SpectrumMethod::Quadrature, std::move(coeffs)};
}

double spectrum_wendland_closed(int ell, double rho, int n, int k) {
  using Real = boost::multiprecision::cpp_bin_float_50;
  if (ell < 0 || n < 0 || k < 0) throw InvalidArgument("spectrum_wendland_closed: negative index");
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidArgument("spectrum_wendland_closed: rho must lie in (0,1)");
  const Real mu = n + k + 2;
  const Real half = Real(1) / 2;
  const Real z = Real(rho) * Real(rho) / 4;
  const int top = ell + n;
  Real term = 1;
  Real sum = 1;
  for (int j = 0; j < top; ++j) {
    term *= Real(j - top) * Real(top + 1 + j) * (mu - half + j);
    term /= ((3 * mu - 1) / 2 + j) * (3 * mu / 2 + j) * Real(j + 1);
    term *= z;
    sum += term;
  }
  return static_cast<double>(sum);
}

KernelSpectrum spectrum_closed(const ZonalKernel& kernel, int L_max) {
  const auto& profile = kernel.profile();
  const int d = kernel.dim();
  if (profile.family() != ProfileFamily::Wendland || d % 2 != 0)
    throw InvalidArgument("spectrum_closed: Wendland kernels on even-dimensional spheres only");
  const int n = (d - 2) / 2;
  if (profile.l() != n + profile.k() + 2)
    throw InvalidArgument("spectrum_closed: closed form requires l = d/2 + k + 1");
  std::vector<double> coeffs(static_cast<std::size_t>(L_max) + 1, 0.0);
  for (const auto& term : kernel.terms())
    for (int ell = 0; ell <= L_max; ++ell)
      coeffs[ell] += term.weight * spectrum_wendland_closed(ell, term.rho, n, profile.k());
  return KernelSpectrum{kernel.rho(), d, SpectrumMethod::ClosedForm, std::move(coeffs)};
}

AssumptionReport assumption_diagnostics(const KernelSpectrum& spectrum, double m, double s) {
  AssumptionReport r{};
  const double rho = spectrum.rho;
  r.ell_rho = static_cast<int>(std::floor(1.0 / rho - 1.0));
  r.low_degree_ratio = 0.0;
  r.high_degree_max = -std::numeric_limits<double>::infinity();
  r.decay_min = std::numeric_limits<double>::infinity();
  r.decay_max = -std::numeric_limits<double>::infinity();
  for (int ell = 1; ell <= spectrum.L_max(); ++ell) {
    const double c = spectrum[ell];
    if (ell <= r.ell_rho)
      r.low_degree_ratio = std::max(r.low_degree_ratio, std::abs(1.0 - c) / std::pow(ell * rho, m));
    else
      r.high_degree_max = std::max(r.high_degree_max, c);
    const double scaled = c * std::pow(1.0 + rho * ell, 2.0 * s);
    r.decay_min = std::min(r.decay_min, scaled);
    r.decay_max = std::max(r.decay_max, scaled);
  }
  return r;
}

void write_spectrum_csv(const KernelSpectrum& spectrum, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("write_spectrum_csv: cannot write " + path.string());
  out << "ell,coeff\n" << std::setprecision(17);
  for (int ell = 0; ell <= spectrum.L_max(); ++ell) out << ell << ',' << spectrum[ell] << '\n';
}

}  // namespace skqi
