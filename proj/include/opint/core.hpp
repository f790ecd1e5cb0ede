#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace opint {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

// Bad input: wrong shapes, out-of-range parameters, malformed documents.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation needs something the inputs do not provide (e.g. a partial
// derivative at a coincident spectral point, or Fourier metadata).
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative kernels that failed to converge, grids that alias, etc.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Closed real interval; used for quantities that are only boundable.
struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  bool contains(double v) const { return lower <= v && v <= upper; }
  bool overlaps(const Interval& o) const { return lower <= o.upper && o.lower <= upper; }

  Interval& operator+=(const Interval& o) {
    lower += o.lower;
    upper += o.upper;
    return *this;
  }
  friend Interval operator+(Interval a, const Interval& b) { return a += b; }
  // Nonnegative scale only.
  friend Interval operator*(double s, const Interval& a) { return {s * a.lower, s * a.upper}; }
};

// splitmix64 step; used to derive independent per-trial seeds from a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace opint
