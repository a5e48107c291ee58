#pragma once

// Reference dispersion of a 1D periodic medium from the Bloch eigenproblem.

#include <span>

#include "longwave/effective.hpp"
#include "longwave/medium.hpp"

namespace longwave {

/// Lowest eigenvalue ω²(k) of −(d/dy + ik) a(y) (d/dy + ik) on Y-periodic
/// functions, discretized with Fourier modes |m| <= `modes`. The Hermitian
/// eigensolve is refined by a Schur-complement fixed point on the constant
/// mode in extended precision, so small-k values keep relative accuracy.
double bloch_dispersion_1d(const CoefficientField& a, double k, int modes = 32);
long double bloch_dispersion_1d_extended(const CoefficientField& a, double k, int modes = 32);

/// |ω²_model(k) − ω²_Bloch(k)| at the cell scale (ε = 1) for a 1D model,
/// evaluated in extended precision so high-order agreement stays visible.
double dispersion_mismatch_1d(const EffectiveModel& model, const CoefficientField& a, double k, int modes = 32);

/// Least-squares slope of log|y| against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace longwave
