#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "skqi/harmonics.hpp"
#include "skqi/kernels.hpp"
#include "skqi/sphere_geometry.hpp"

namespace skqi {

enum class ApproximantKind { Weighted, QMC, MC, Noisy };

/// x -> sum_j alpha_j v_j phi_rho(x . x_j). Immutable; evaluate() is thread-safe.
class Approximant {
 public:
  Approximant(PointSet sites, std::vector<double> weights, std::vector<double> values,
              ZonalKernel kernel, ApproximantKind kind);

  double evaluate(PointRef x) const;
  double operator()(PointRef x) const { return evaluate(x); }
  std::vector<double> evaluate_many(const PointSet& points) const;

  const PointSet& sites() const { return *sites_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& values() const { return values_; }
  const ZonalKernel& kernel() const { return kernel_; }
  ApproximantKind kind() const { return kind_; }

  /// Sample dump with header `x,y,z,value`.
  void write_samples_csv(const std::filesystem::path& path) const;

 private:
  std::shared_ptr<const PointSet> sites_;  // shared with index_
  std::vector<double> weights_;
  std::vector<double> values_;
  ZonalKernel kernel_;
  ApproximantKind kind_;
  std::vector<double> coeffs_;  // alpha_j * v_j
  double cutoff_cos_;           // kernel vanishes for x . x_j below this
  std::shared_ptr<const CapIndex> index_;
};

Approximant qi_weighted(const PointSet& sites, std::span<const double> weights,
                        std::span<const double> values, const ZonalKernel& kernel);

/// Equal weights 1/N.
Approximant qi_qmc(const PointSet& sites, std::span<const double> values, const ZonalKernel& kernel);

/// i.i.d. uniform sites from random_points(n, d, seed), equal weights.
Approximant qi_mc(std::size_t n, std::uint64_t seed, const SphereFunction& f, const ZonalKernel& kernel);

struct NoiseModel {
  enum class Kind { GaussianStd, UniformBounded };
  Kind kind = Kind::GaussianStd;
  double level = 0.0;  // standard deviation, or the bound M
  std::uint64_t seed = 0;
};

/// values + i.i.d. zero-mean draws; draw j depends only on (seed, j).
std::vector<double> add_noise(std::span<const double> values, const NoiseModel& model);

/// Equal-weight quasi-interpolant of noisy samples f(x_j) + eps_j.
Approximant qi_noisy(const PointSet& sites, std::span<const double> clean_values, const NoiseModel& model,
                     const ZonalKernel& kernel);

/// Coefficient-wise product phi_hat(ell) f_hat(ell, k): the exact convolution f * phi_rho.
SpectralFunction convolution_reference(const SpectralFunction& f, const KernelSpectrum& spectrum);

std::vector<double> sample(const SphereFunction& f, const PointSet& points);

}  // namespace skqi
