#include "skqi/quasi_interpolation.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>

namespace skqi {

namespace {
// Compensated summation kicks in at this many sites.
constexpr std::size_t kCompensatedThreshold = 10000;
}  // namespace

Approximant::Approximant(PointSet sites, std::vector<double> weights, std::vector<double> values,
                         ZonalKernel kernel, ApproximantKind kind)
    : sites_(std::make_shared<const PointSet>(std::move(sites))),
      weights_(std::move(weights)),
      values_(std::move(values)),
      kernel_(std::move(kernel)),
      kind_(kind) {
  if (weights_.size() != sites_->size() || values_.size() != sites_->size())
    throw InvalidArgument("Approximant: sites, weights and values must have equal length");
  if (kernel_.dim() != sites_->dim()) throw InvalidArgument("Approximant: kernel and sites differ in dimension");
  coeffs_.resize(sites_->size());
  for (std::size_t j = 0; j < coeffs_.size(); ++j) {
    if (!std::isfinite(weights_[j])) throw InvalidArgument("Approximant: non-finite weight");
    coeffs_[j] = weights_[j] * values_[j];
  }
  const double chord = kernel_.cutoff_chord();
  cutoff_cos_ = 1.0 - 0.5 * chord * chord;
  // Bucket sites by spherical cap when the kernel support covers a small part of S^2.
  if (sites_->dim() == 2 && chord < 1.0 && sites_->size() >= 64) {
    const double angle = 2.0 * std::asin(0.5 * chord);
    index_ = std::make_shared<CapIndex>(*sites_, 0.5 * angle);
  }
}

double Approximant::evaluate(PointRef x) const {
  const bool compensated = sites_->size() >= kCompensatedThreshold;
  CompensatedSum csum;
  double sum = 0.0;
  auto term = [&](std::size_t j) {
    const double t = dot(x, (*sites_)[j]);
    if (t < cutoff_cos_) return;
    const double v = coeffs_[j] * kernel_(t);
    if (compensated)
      csum.add(v);
    else
      sum += v;
  };
  if (index_) {
    const double angle = 2.0 * std::asin(0.5 * kernel_.cutoff_chord());
    index_->for_each_candidate(x, angle, term);
  } else {
    for (std::size_t j = 0; j < sites_->size(); ++j) term(j);
  }
  return compensated ? csum.value() : sum;
}

std::vector<double> Approximant::evaluate_many(const PointSet& points) const {
  std::vector<double> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = evaluate(points[i]);
  return out;
}

void Approximant::write_samples_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("write_samples_csv: cannot write " + path.string());
  out << "x,y,z,value\n" << std::setprecision(17);
  for (std::size_t j = 0; j < sites_->size(); ++j) {
    const auto p = (*sites_)[j];
    for (std::size_t c = 0; c < p.size(); ++c) out << p[c] << ',';
    out << values_[j] << '\n';
  }
}

Approximant qi_weighted(const PointSet& sites, std::span<const double> weights, std::span<const double> values,
                        const ZonalKernel& kernel) {
  if (weights.size() != sites.size() || values.size() != sites.size())
    throw InvalidArgument("qi_weighted: sites, weights and values must have equal length");
  return Approximant(sites, {weights.begin(), weights.end()}, {values.begin(), values.end()}, kernel,
                     ApproximantKind::Weighted);
}

Approximant qi_qmc(const PointSet& sites, std::span<const double> values, const ZonalKernel& kernel) {
  if (values.size() != sites.size()) throw InvalidArgument("qi_qmc: one value per site required");
  std::vector<double> w(sites.size(), 1.0 / static_cast<double>(sites.size()));
  return Approximant(sites, std::move(w), {values.begin(), values.end()}, kernel, ApproximantKind::QMC);
}

Approximant qi_mc(std::size_t n, std::uint64_t seed, const SphereFunction& f, const ZonalKernel& kernel) {
  if (n == 0) throw InvalidArgument("qi_mc: n must be >= 1");
  PointSet sites = random_points(n, kernel.dim(), seed);
  auto values = sample(f, sites);
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  return Approximant(std::move(sites), std::move(w), std::move(values), kernel, ApproximantKind::MC);
}

std::vector<double> add_noise(std::span<const double> values, const NoiseModel& model) {
  if (!(model.level >= 0.0)) throw InvalidArgument("add_noise: noise level must be >= 0");
  std::vector<double> out(values.begin(), values.end());
  if (model.level == 0.0) return out;
  std::mt19937_64 rng(model.seed);
  if (model.kind == NoiseModel::Kind::GaussianStd) {
    std::normal_distribution<double> dist(0.0, model.level);
    for (double& v : out) v += dist(rng);
  } else {
    std::uniform_real_distribution<double> dist(-model.level, model.level);
    for (double& v : out) v += dist(rng);
  }
  return out;
}

Approximant qi_noisy(const PointSet& sites, std::span<const double> clean_values, const NoiseModel& model,
                     const ZonalKernel& kernel) {
  if (clean_values.size() != sites.size()) throw InvalidArgument("qi_noisy: one value per site required");
  std::vector<double> w(sites.size(), 1.0 / static_cast<double>(sites.size()));
  return Approximant(sites, std::move(w), add_noise(clean_values, model), kernel, ApproximantKind::Noisy);
}

SpectralFunction convolution_reference(const SpectralFunction& f, const KernelSpectrum& spectrum) {
  if (f.L_max() > spectrum.L_max())
    throw InvalidArgument("convolution_reference: kernel spectrum is truncated below the function degree");
  SpectralFunction out(f.L_max());
  for (int ell = 0; ell <= f.L_max(); ++ell)
    for (int k = 1; k <= 2 * ell + 1; ++k) out(ell, k) = spectrum[ell] * f(ell, k);
  return out;
}

std::vector<double> sample(const SphereFunction& f, const PointSet& points) {
  std::vector<double> v(points.size());
  for (std::size_t j = 0; j < points.size(); ++j) v[j] = f(points[j]);
  return v;
}

}  // namespace skqi
