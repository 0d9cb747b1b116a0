#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace kam {

using cplx = std::complex<double>;

/// Regular grid on T^n with N points per axis, theta_j = 2*pi*i_j/N.
/// Points are stored lexicographically with axis 0 varying slowest.
struct GridSpec {
  int dim = 1;
  int points_per_axis = 0;

  std::size_t size() const;
  /// Angle coordinates of point `index`.
  std::vector<double> point(std::size_t index) const;
  bool operator==(const GridSpec&) const = default;
};

/// Multi-dimensional complex DFT on a GridSpec (FFTW backed).
///
/// forward: c_k = N^{-n} sum_x f(x) e^{-i k.x}
/// inverse: f(x) = sum_k c_k e^{i k.x}
/// Both act in place on arrays of grid.size() values. Plans are cached per
/// grid shape; execution is thread-safe and deterministic.
void dft_forward(const GridSpec& grid, std::span<cplx> values);
void dft_inverse(const GridSpec& grid, std::span<cplx> values);

}  // namespace kam
