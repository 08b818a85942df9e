#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>

namespace skqi {

inline constexpr const char* kVersion = "0.3.0";

using Vec3 = std::array<double, 3>;

/// A point on S^d viewed as its d+1 ambient coordinates.
using PointRef = std::span<const double>;

/// A real-valued function on the sphere.
using SphereFunction = std::function<double(PointRef)>;

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line(line) {}
  std::size_t line;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateKernel : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidSchedule : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error("config field '" + field + "': " + what), field(field) {}
  std::string field;
};

inline double dot(PointRef a, PointRef b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Geodesic distance between unit vectors.
double geodesic(PointRef a, PointRef b);

/// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// SplitMix64 step; used to derive independent per-trial seeds from a base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace skqi
