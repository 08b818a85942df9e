#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace skqi {

template <typename F>
void CapIndex::visit_cells(PointRef x, double angle, F&& f) const {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double a = angle + 1e-12;
  const double z = std::clamp(x[2], -1.0, 1.0);
  const double theta0 = std::acos(z);
  double phi0 = std::atan2(x[1], x[0]);
  if (phi0 < 0.0) phi0 += two_pi;

  const int b_lo = std::max(0, static_cast<int>(std::floor((theta0 - a) / band_angle_)));
  const int b_hi = std::min(bands_ - 1, static_cast<int>(std::floor((theta0 + a) / band_angle_)));
  const bool covers_pole = theta0 - a <= 0.0 || theta0 + a >= std::numbers::pi;
  double half_width = std::numbers::pi;
  if (!covers_pole) {
    const double s = std::sin(a) / std::sin(theta0);
    half_width = s >= 1.0 ? std::numbers::pi : std::asin(s);
  }

  for (int b = b_lo; b <= b_hi; ++b) {
    const int sectors = sectors_[b];
    const std::size_t first = band_first_[b];
    if (half_width >= std::numbers::pi || sectors == 1) {
      for (int s = 0; s < sectors; ++s) f(first + s);
      continue;
    }
    const double w = two_pi / sectors;
    const long s_lo = static_cast<long>(std::floor((phi0 - half_width) / w));
    const long s_hi = static_cast<long>(std::floor((phi0 + half_width) / w));
    if (s_hi - s_lo + 1 >= sectors) {
      for (int s = 0; s < sectors; ++s) f(first + s);
      continue;
    }
    for (long s = s_lo; s <= s_hi; ++s) {
      long m = s % sectors;
      if (m < 0) m += sectors;
      f(first + static_cast<std::size_t>(m));
    }
  }
}

}  // namespace skqi
