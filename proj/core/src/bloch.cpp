#include "longwave/bloch.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "longwave/errors.hpp"

namespace longwave {

namespace {

using real_ext = long double;
using complex_ext = std::complex<real_ext>;

}  // namespace

long double bloch_dispersion_1d_extended(const CoefficientField& a, double k, int modes) {
  if (a.dim() != 1) throw ShapeMismatch("bloch_dispersion_1d needs a 1D coefficient");
  if (modes < 1) throw ConfigError("bloch_dispersion_1d needs at least one mode");
  const Field& coef = a.entry(0, 0);
  const std::size_t n = coef.size();
  const real_ext ell = a.shape().lengths[0];
  const real_ext two_pi = 2.0L * std::numbers::pi_v<real_ext>;
  const int size = 2 * modes + 1;

  // â_j = mean(a e^{−2πi j y/ℓ}); frequencies at or beyond the grid Nyquist are dropped
  const int jmax = 2 * modes;
  std::vector<complex_ext> ahat(static_cast<std::size_t>(2 * jmax + 1));
  for (int j = -jmax; j <= jmax; ++j) {
    complex_ext s = 0.0L;
    if (2 * static_cast<std::size_t>(std::abs(j)) < n) {
      for (std::size_t p = 0; p < n; ++p) {
        const real_ext phase = -two_pi * static_cast<real_ext>(j) * static_cast<real_ext>(p) / static_cast<real_ext>(n);
        s += static_cast<real_ext>(coef[p]) * complex_ext(std::cos(phase), std::sin(phase));
      }
      s /= static_cast<real_ext>(n);
    }
    ahat[static_cast<std::size_t>(j + jmax)] = s;
  }
  auto kappa = [&](int m) { return two_pi * static_cast<real_ext>(m) / ell + static_cast<real_ext>(k); };
  auto entry = [&](int m, int q) { return kappa(m) * kappa(q) * ahat[static_cast<std::size_t>(m - q + jmax)]; };

  Eigen::MatrixXcd h(size, size);
  for (int r = 0; r < size; ++r)
    for (int c = 0; c < size; ++c) {
      const complex_ext v = entry(r - modes, c - modes);
      h(r, c) = std::complex<double>(static_cast<double>(v.real()), static_cast<double>(v.imag()));
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("Bloch eigensolve failed");
  const double coarse = es.eigenvalues()(0);

  // λ = H00 − h*(B − λ)^{-1} h with B the block of nonzero modes
  using MatX = Eigen::Matrix<complex_ext, Eigen::Dynamic, Eigen::Dynamic>;
  using VecX = Eigen::Matrix<complex_ext, Eigen::Dynamic, 1>;
  const int nb = size - 1;
  MatX b(nb, nb);
  VecX hv(nb);
  std::vector<int> others;
  for (int m = -modes; m <= modes; ++m)
    if (m != 0) others.push_back(m);
  for (int r = 0; r < nb; ++r) {
    hv(r) = entry(others[r], 0);
    for (int c = 0; c < nb; ++c) b(r, c) = entry(others[r], others[c]);
  }
  const real_ext h00 = entry(0, 0).real();
  real_ext lambda = coarse;
  for (int it = 0; it < 100; ++it) {
    MatX shifted = b;
    for (int r = 0; r < nb; ++r) shifted(r, r) -= lambda;
    Eigen::LLT<MatX> llt(shifted);
    if (llt.info() != Eigen::Success) return static_cast<real_ext>(coarse);
    const VecX x = llt.solve(hv);
    const real_ext next = h00 - (hv.adjoint() * x)(0).real();
    const real_ext change = std::abs(next - lambda);
    lambda = next;
    if (change <= 1e-19L * std::abs(lambda)) break;
  }
  return lambda;
}

double bloch_dispersion_1d(const CoefficientField& a, double k, int modes) {
  return static_cast<double>(bloch_dispersion_1d_extended(a, k, modes));
}

double dispersion_mismatch_1d(const EffectiveModel& model, const CoefficientField& a, double k, int modes) {
  if (model.dim != 1) throw ShapeMismatch("dispersion_mismatch_1d needs a 1D model");
  const real_ext k2 = static_cast<real_ext>(k) * static_cast<real_ext>(k);
  real_ext num = static_cast<real_ext>(model.a0[0]) * k2;
  real_ext den = 1.0L;
  real_ext kp = k2;
  for (const auto& st : model.stages) {
    den += static_cast<real_ext>(st.b2r[0]) * kp;
    kp *= k2;
    num += static_cast<real_ext>(st.a2r[0]) * kp;
  }
  return static_cast<double>(std::abs(num / den - bloch_dispersion_1d_extended(a, k, modes)));
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("loglog_slope needs two or more matching points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(std::abs(x[i]));
    const double ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace longwave
