#pragma once

// Uniform periodic grids and Fourier-based differentiation on them.

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace longwave {

using Field = std::vector<double>;
using Spectrum = std::vector<std::complex<double>>;

/// A uniform periodic grid on a box of given edge lengths. Opposite faces are
/// identified, so only N points per axis are stored. Row-major: axis 0 is the
/// slowest index.
struct GridShape {
  std::vector<double> lengths;
  std::vector<int> points;

  int dim() const noexcept { return static_cast<int>(points.size()); }
  std::size_t size() const noexcept;
  double spacing(int axis) const { return lengths[axis] / points[axis]; }
  double volume() const noexcept;
  double cell_volume() const noexcept;  // volume / size()

  /// Throws ConfigError unless 1 <= d <= 3, lengths > 0, points even and >= 2.
  void validate() const;
};

double grid_mean(std::span<const double> v);
double grid_dot(std::span<const double> a, std::span<const double> b);
/// sqrt(mean(v^2)).
double grid_rms(std::span<const double> v);

/// Real-to-complex transforms on a GridShape with spectral derivatives.
///
/// Derivatives zero the Nyquist component along each axis, which keeps the
/// discrete gradient real and skew-adjoint. Plans are created once and
/// executed with per-call buffers, so a const SpectralGrid may be shared
/// between threads.
class SpectralGrid {
 public:
  explicit SpectralGrid(GridShape shape);
  ~SpectralGrid();
  SpectralGrid(const SpectralGrid&) = delete;
  SpectralGrid& operator=(const SpectralGrid&) = delete;

  const GridShape& shape() const noexcept { return shape_; }
  std::size_t real_size() const noexcept { return real_size_; }
  std::size_t spectral_size() const noexcept { return spectral_size_; }

  Spectrum forward(std::span<const double> v) const;
  /// Normalized inverse: inverse(forward(v)) == v.
  Field inverse(std::span<const std::complex<double>> s) const;

  /// Angular wavenumber 2πm/L of spectral entry `s` along `axis`. With
  /// `derivative` the Nyquist frequency maps to 0.
  double wavenumber(std::size_t s, int axis, bool derivative) const;
  /// Full wavevector of spectral entry `s` (Nyquist kept as -π N/L).
  void wavevector(std::size_t s, std::span<double> k) const;
  /// True for the modes annihilated by every discrete derivative
  /// (each axis at frequency 0 or Nyquist).
  bool is_kernel_mode(std::size_t s) const;
  /// Weight of spectral entry `s` in Parseval sums (1 or 2 for the halved axis).
  double parseval_weight(std::size_t s) const;

  std::vector<Field> gradient(std::span<const double> v) const;
  Field derivative(std::span<const double> v, int axis) const;
  Field divergence(std::span<const Field> flux) const;
  /// Removes the components of v in the kernel of the discrete gradient.
  Field project_out_kernel(std::span<const double> v) const;

 private:
  GridShape shape_;
  std::size_t real_size_ = 0;
  std::size_t spectral_size_ = 0;
  std::vector<int> spectral_dims_;
  // per axis, per spectral entry: derivative and full wavenumbers
  std::vector<std::vector<double>> deriv_k_;
  std::vector<std::vector<double>> full_k_;
  std::vector<unsigned char> kernel_;
  std::vector<double> weight_;
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

}  // namespace longwave
