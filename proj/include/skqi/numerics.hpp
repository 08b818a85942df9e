#pragma once

#include <functional>
#include <vector>

namespace skqi::numerics {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;  // sum to 2
};

/// n-point Gauss-Legendre rule via Newton iteration on the Legendre recurrence.
GaussRule gauss_legendre(int n);

/// Composite Gauss-Legendre over [a, b] with `panels` equal panels of `order` points each.
double integrate(const std::function<double(double)>& f, double a, double b, int panels,
                 int order = 20);

}  // namespace skqi::numerics
