#include "longwave/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <numeric>
#include <string>

#include "longwave/errors.hpp"

namespace longwave {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Index of spectral entry `s` along `axis` for row-major spectral_dims.
int axis_index(std::size_t s, int axis, const std::vector<int>& dims) {
  for (int a = static_cast<int>(dims.size()) - 1; a > axis; --a) s /= static_cast<std::size_t>(dims[a]);
  return static_cast<int>(s % static_cast<std::size_t>(dims[axis]));
}

}  // namespace

std::size_t GridShape::size() const noexcept {
  std::size_t n = 1;
  for (int p : points) n *= static_cast<std::size_t>(p);
  return n;
}

double GridShape::volume() const noexcept {
  double v = 1.0;
  for (double l : lengths) v *= l;
  return v;
}

double GridShape::cell_volume() const noexcept { return volume() / static_cast<double>(size()); }

void GridShape::validate() const {
  if (points.empty() || points.size() > 3) throw ConfigError("grid dimension must be 1, 2 or 3");
  if (lengths.size() != points.size()) throw ConfigError("grid lengths and point counts differ in dimension");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(lengths[i] > 0.0)) throw ConfigError("grid length along axis " + std::to_string(i + 1) + " must be positive");
    if (points[i] < 2 || points[i] % 2 != 0)
      throw ConfigError("grid points along axis " + std::to_string(i + 1) + " must be even and >= 2");
  }
}

double grid_mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double grid_dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double grid_rms(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::sqrt(grid_dot(v, v) / static_cast<double>(v.size()));
}

struct SpectralGrid::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
  }
};

SpectralGrid::SpectralGrid(GridShape shape) : shape_(std::move(shape)), plans_(std::make_unique<Plans>()) {
  shape_.validate();
  real_size_ = shape_.size();
  spectral_dims_ = shape_.points;
  spectral_dims_.back() = shape_.points.back() / 2 + 1;
  spectral_size_ = 1;
  for (int n : spectral_dims_) spectral_size_ *= static_cast<std::size_t>(n);

  Field in(real_size_);
  Spectrum out(spectral_size_);
  // FFTW_ESTIMATE keeps plans (and hence results) deterministic run to run.
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard lock(planner_mutex());
  plans_->r2c = fftw_plan_dft_r2c(shape_.dim(), shape_.points.data(), in.data(),
                                  reinterpret_cast<fftw_complex*>(out.data()), flags);
  plans_->c2r = fftw_plan_dft_c2r(shape_.dim(), shape_.points.data(),
                                  reinterpret_cast<fftw_complex*>(out.data()), in.data(), flags);
  if (!plans_->r2c || !plans_->c2r) throw NumericalError("FFTW could not create a plan");

  const int d = shape_.dim();
  deriv_k_.assign(d, std::vector<double>(spectral_size_));
  full_k_.assign(d, std::vector<double>(spectral_size_));
  kernel_.assign(spectral_size_, 1);
  weight_.assign(spectral_size_, 1.0);
  for (std::size_t s = 0; s < spectral_size_; ++s) {
    for (int a = 0; a < d; ++a) {
      const int n = shape_.points[a];
      const int idx = axis_index(s, a, spectral_dims_);
      // the halved last axis only stores 0..n/2; elsewhere n/2 is -n/2
      const int m = idx < n / 2 ? idx : (idx == n / 2 ? (a == d - 1 ? n / 2 : -n / 2) : idx - n);
      const double k = 2.0 * std::numbers::pi * m / shape_.lengths[a];
      full_k_[a][s] = k;
      deriv_k_[a][s] = (idx == n / 2) ? 0.0 : k;
      if (idx != 0 && idx != n / 2) kernel_[s] = 0;
      if (a == d - 1 && idx != 0 && idx != n / 2) weight_[s] = 2.0;
    }
  }
}

SpectralGrid::~SpectralGrid() = default;

Spectrum SpectralGrid::forward(std::span<const double> v) const {
  if (v.size() != real_size_) throw ShapeMismatch("SpectralGrid::forward: field size mismatch");
  Spectrum out(spectral_size_);
  // r2c out-of-place leaves the input untouched.
  fftw_execute_dft_r2c(plans_->r2c, const_cast<double*>(v.data()), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

Field SpectralGrid::inverse(std::span<const std::complex<double>> s) const {
  if (s.size() != spectral_size_) throw ShapeMismatch("SpectralGrid::inverse: spectrum size mismatch");
  Spectrum work(s.begin(), s.end());  // c2r destroys its input
  Field out(real_size_);
  fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(work.data()), out.data());
  const double scale = 1.0 / static_cast<double>(real_size_);
  for (double& x : out) x *= scale;
  return out;
}

double SpectralGrid::wavenumber(std::size_t s, int axis, bool derivative) const {
  return derivative ? deriv_k_[axis][s] : full_k_[axis][s];
}

void SpectralGrid::wavevector(std::size_t s, std::span<double> k) const {
  for (int a = 0; a < shape_.dim(); ++a) k[a] = full_k_[a][s];
}

bool SpectralGrid::is_kernel_mode(std::size_t s) const { return kernel_[s] != 0; }

double SpectralGrid::parseval_weight(std::size_t s) const { return weight_[s]; }

Field SpectralGrid::derivative(std::span<const double> v, int axis) const {
  Spectrum s = forward(v);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] *= std::complex<double>(0.0, wavenumber(i, axis, true));
  return inverse(s);
}

std::vector<Field> SpectralGrid::gradient(std::span<const double> v) const {
  const Spectrum s = forward(v);
  std::vector<Field> out;
  out.reserve(static_cast<std::size_t>(shape_.dim()));
  Spectrum work(s.size());
  for (int a = 0; a < shape_.dim(); ++a) {
    for (std::size_t i = 0; i < s.size(); ++i) work[i] = s[i] * std::complex<double>(0.0, wavenumber(i, a, true));
    out.push_back(inverse(work));
  }
  return out;
}

Field SpectralGrid::divergence(std::span<const Field> flux) const {
  if (static_cast<int>(flux.size()) != shape_.dim()) throw ShapeMismatch("divergence: flux needs one field per axis");
  Spectrum acc(spectral_size_, {0.0, 0.0});
  for (int a = 0; a < shape_.dim(); ++a) {
    const Spectrum s = forward(flux[a]);
    for (std::size_t i = 0; i < s.size(); ++i) acc[i] += s[i] * std::complex<double>(0.0, wavenumber(i, a, true));
  }
  return inverse(acc);
}

Field SpectralGrid::project_out_kernel(std::span<const double> v) const {
  Spectrum s = forward(v);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (is_kernel_mode(i)) s[i] = 0.0;
  return inverse(s);
}

}  // namespace longwave
