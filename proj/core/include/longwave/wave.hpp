#pragma once

// Fine-scale and effective wave propagation on a periodic box Ω.

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "longwave/effective.hpp"
#include "longwave/medium.hpp"
#include "longwave/spectral.hpp"

namespace longwave {

/// Periodic box Ω = Π (lo_i, hi_i) with M_i points per axis, carrying a
/// medium of period ε·ℓ_i.
struct MacroGrid {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<int> points;
  double epsilon = 1.0;
  std::vector<double> cell_lengths;

  int dim() const noexcept { return static_cast<int>(points.size()); }
  GridShape shape() const;
  double spacing(int axis) const { return (hi[axis] - lo[axis]) / points[axis]; }
  double min_spacing() const;
  double coordinate(int axis, int i) const { return lo[axis] + i * spacing(axis); }
};

struct DomainCheck {
  int axis = 0;         // 1-based
  bool ok = false;
  double cells = 0.0;   // (hi − lo)/(ℓε)
  double points_per_cell = 0.0;
  std::string message;
};

/// Per-axis compatibility of Ω with the scaled cell and the grid.
std::vector<DomainCheck> check_domain(const MacroGrid& grid);
/// As check_domain, but throws IncompatibleDomain naming the first bad axis.
std::vector<DomainCheck> validate_domain(const MacroGrid& grid);

/// Pseudo-spectral u ↦ ∇·(a(x/ε)∇u) on a MacroGrid.
class FineOperator {
 public:
  FineOperator(const MacroGrid& grid, const Medium& medium);

  const MacroGrid& macro() const noexcept { return grid_; }
  const SpectralGrid& grid() const noexcept { return spectral_; }
  double lambda() const noexcept { return lambda_; }
  double Lambda() const noexcept { return Lambda_; }
  const std::vector<Field>& coefficient() const noexcept { return a_; }

  Field apply(std::span<const double> u) const;

 private:
  MacroGrid grid_;
  SpectralGrid spectral_;
  std::vector<Field> a_;  // sym_slot order
  double lambda_ = 0.0;
  double Lambda_ = 0.0;
};

Field apply_fine_operator(const FineOperator& op, std::span<const double> u);

struct WaveState {
  double t = 0.0;
  Field u;
  Field v;
};

struct SimConfig {
  double dt = 0.0;         // 0 selects h_min/(4√Λ)
  double t_end = 0.0;
  std::vector<double> output_times;  // rounded to step multiples
  double cfl_safety = 0.5;
  double blowup_factor = 1e6;
};

struct FineResult {
  std::vector<WaveState> states;
  double dt = 0.0;
  long long steps = 0;
  double energy_initial = 0.0;
  double energy_drift = 0.0;  // max |E^n − E^0| / |E^0|
};

/// Largest Δt allowed: safety·h_min/(√Λ·√d).
double cfl_limit(const FineOperator& op, double safety = 0.5);
double default_time_step(const FineOperator& op);

/// Leapfrog with Taylor startup. `progress` (optional) receives the step count.
FineResult fine_solve(const FineOperator& op, std::span<const double> g0, std::span<const double> g1,
                      const SimConfig& cfg, const std::function<void(long long, long long)>& progress = {});

struct Dispersion {
  double H = 1.0;
  double A = 0.0;
  double omega = 0.0;
};

/// ω(k) of the effective model (wavevector in macroscopic units).
Dispersion dispersion_relation(const EffectiveModel& model, std::span<const double> k);

/// Exact propagation of (u, v) by time t, one Fourier mode at a time.
WaveState effective_propagate(const MacroGrid& grid, const EffectiveModel& model, std::span<const double> u,
                              std::span<const double> v, double t);

/// States at each requested time starting from (g0, g1) at t = 0.
std::vector<WaveState> effective_solve(const MacroGrid& grid, const EffectiveModel& model, std::span<const double> g0,
                                       std::span<const double> g1, std::span<const double> times);

/// Per-mode energies H|v̂|² + A|û|² summed with Parseval weights.
double effective_energy(const MacroGrid& grid, const EffectiveModel& model, std::span<const double> u,
                        std::span<const double> v);

/// ‖u − ũ‖ / ‖u‖ in the grid L² norm.
double relative_error(std::span<const double> u, std::span<const double> approx);

/// exp(−β|ν(x − c)|²) with c the center of Ω.
Field gaussian_initial(const MacroGrid& grid, double beta, double nu);

/// Field dump: header `field d=<d> bounds=<lo1,hi1,..> m=<M1,..> t=<t>` then
/// row-major little-endian doubles.
void write_field(const std::filesystem::path& path, const MacroGrid& grid, std::span<const double> u, double t);
struct FieldDump {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<int> points;
  double t = 0.0;
  Field values;
};
FieldDump read_field(const std::filesystem::path& path);

}  // namespace longwave
