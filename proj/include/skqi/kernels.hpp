#pragma once

#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "skqi/common.hpp"

namespace skqi {

enum class ProfileFamily { Gaussian, Wendland, Custom };

/// A univariate profile r >= 0 -> phi(r), unscaled.
class RadialProfile {
 public:
  static RadialProfile gaussian();
  /// Wendland function of smoothness 2k with exponent l + k, phi(0) = 1. Supports k = 0..3, l >= k + 1.
  static RadialProfile wendland(int l, int k);
  /// Arbitrary profile; `support` is the radius beyond which phi vanishes (infinity if none).
  static RadialProfile custom(std::function<double(double)> f, std::string name,
                              double support = std::numeric_limits<double>::infinity());

  double operator()(double r) const;

  ProfileFamily family() const { return family_; }
  int l() const { return l_; }
  int k() const { return k_; }
  /// 1 for Wendland, infinite for Gaussian and unbounded custom profiles.
  double support_radius() const { return support_; }
  /// Radius beyond which |phi| < 1e-20 (the support radius for compact profiles).
  double cutoff_radius() const;
  std::string name() const;

 private:
  RadialProfile() = default;
  ProfileFamily family_ = ProfileFamily::Custom;
  int l_ = 0;
  int k_ = 0;
  double support_ = std::numeric_limits<double>::infinity();
  std::function<double(double)> custom_;
  std::string custom_name_;
};

/// Lambda = integral over S^d of phi(|x - y| / rho) d sigma(x), unit-mass measure.
double normalization_lambda(const RadialProfile& profile, double rho, int d, int panels = 64);

/// Scaled zonal kernel t -> sum_i w_i phi(sqrt(2 - 2t) / (rho s_i)) / Lambda_i.
///
/// Order-2 kernels have a single term (w = 1, s = 1). Higher orders m = 2p combine p
/// normalized copies at scales rho * 2^(-i/2) with weights cancelling the rho^2, ...,
/// rho^(2p-2) terms of 1 - phi_hat(ell), so that |1 - phi_hat(ell)| = O((ell rho)^m).
class ZonalKernel {
 public:
  struct Term {
    double weight;
    double rho;
    double lambda;
  };

  ZonalKernel(RadialProfile profile, double rho, int dim, std::vector<Term> terms, int order);

  double operator()(double t) const;

  const RadialProfile& profile() const { return profile_; }
  double rho() const { return rho_; }
  int dim() const { return dim_; }
  int order() const { return order_; }
  /// Normalization constant of the base (widest) term.
  double lambda() const { return terms_.front().lambda; }
  const std::vector<Term>& terms() const { return terms_; }
  /// Chord length |x - y| beyond which the kernel is (numerically) zero; 2 if never.
  double cutoff_chord() const { return cutoff_chord_; }
  /// Kernel value at t = 1.
  double peak() const { return (*this)(1.0); }

 private:
  RadialProfile profile_;
  double rho_;
  int dim_;
  std::vector<Term> terms_;
  int order_;
  double cutoff_chord_;
};

/// Order-2 normalized kernel phi(|x-y|/rho) / Lambda.
ZonalKernel make_kernel(const RadialProfile& profile, double rho, int d);

/// Order-m kernel, m even >= 2 (see ZonalKernel).
ZonalKernel make_kernel(const RadialProfile& profile, double rho, int d, int order);

/// Weights cancelling the low-order rho^2 terms for p terms at squared scales 1, 1/2, ..., 2^(1-p).
std::vector<double> extrapolation_weights(int terms);

enum class SpectrumMethod { Quadrature, ClosedForm };

struct KernelSpectrum {
  double rho;
  int dim;
  SpectrumMethod method;
  std::vector<double> coeffs;  // phi_hat(0..L_max)

  int L_max() const { return static_cast<int>(coeffs.size()) - 1; }
  double operator[](int ell) const { return coeffs[static_cast<std::size_t>(ell)]; }
};

/// phi_hat(ell) by the Funk-Hecke integral, composite Gauss-Legendre in the polar angle.
KernelSpectrum spectrum_quadrature(const ZonalKernel& kernel, int L_max);

/// Closed-form Wendland coefficient on S^d, d = 2n + 2, as a terminating 3F2 series.
double spectrum_wendland_closed(int ell, double rho, int n, int k);

/// Closed-form spectrum of a Wendland kernel (any order) built by make_kernel.
KernelSpectrum spectrum_closed(const ZonalKernel& kernel, int L_max);

struct AssumptionReport {
  int ell_rho;                 // floor(1/rho - 1)
  double low_degree_ratio;     // max_{1 <= ell <= ell_rho} |1 - phi_hat| / (ell rho)^m
  double high_degree_max;      // max_{ell > ell_rho} phi_hat
  double decay_min;            // min_{ell >= 1} phi_hat (1 + rho ell)^(2s)
  double decay_max;            // max_{ell >= 1} phi_hat (1 + rho ell)^(2s)
};

AssumptionReport assumption_diagnostics(const KernelSpectrum& spectrum, double m, double s);

/// CSV with header `ell,coeff`.
void write_spectrum_csv(const KernelSpectrum& spectrum, const std::filesystem::path& path);

}  // namespace skqi
