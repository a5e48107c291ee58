#pragma once

// Cell problems on the reference cell Y: the periodic elliptic solve and the
// chain of high-order correctors χ¹, χ², ...

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "longwave/medium.hpp"
#include "longwave/spectral.hpp"
#include "longwave/sym_tensor.hpp"

namespace longwave {

/// Right-hand side w ↦ ⟨f1, ∇w⟩ + ⟨f0, w⟩.
struct WeakRhs {
  std::vector<Field> f1;  // one field per axis
  Field f0;
};

double cell_mean(std::span<const double> v);

/// |mean(f0)|; the f1 part never obstructs solvability.
double solvability_residual(const WeakRhs& rhs);

struct CellSolverOptions {
  double tolerance = 1e-12;            // relative CG residual
  double solvability_tolerance = 1e-8; // relative to rms(f0) + Λ
  int max_iterations = 5000;
};

/// Solves ⟨a∇v,∇w⟩ = ⟨f1,∇w⟩ + ⟨f0,w⟩ for zero-mean periodic v with a
/// Fourier pseudo-spectral discretization and preconditioned CG.
class CellSolver {
 public:
  explicit CellSolver(const CoefficientField& a, CellSolverOptions options = {});

  const CoefficientField& coefficient() const noexcept { return *a_; }
  const SpectralGrid& grid() const noexcept { return grid_; }
  const CellSolverOptions& options() const noexcept { return options_; }

  /// v ↦ −∇·(a∇v).
  Field apply(std::span<const double> v) const;
  /// Pointwise a·g for a gradient given per axis.
  std::vector<Field> flux(std::span<const Field> grad) const;

  /// Throws SolvabilityViolated or IterationLimit.
  Field solve(const WeakRhs& rhs) const;

  /// CG iterations of the last solve on this thread.
  static int last_iterations() noexcept;

 private:
  Field precondition(std::span<const double> r) const;

  const CoefficientField* a_;
  CellSolverOptions options_;
  SpectralGrid grid_;
  std::vector<double> mean_a_;
};

/// One order-k corrector: a zero-mean field per canonical multi-index of
/// length k, with cached gradients.
class CorrectorField {
 public:
  CorrectorField(int dim, int order, std::size_t points);

  int dim() const noexcept { return dim_; }
  int order() const noexcept { return order_; }
  std::size_t count() const noexcept { return components_.size(); }

  const Field& component(std::size_t rank) const { return components_[rank]; }
  /// Component at any (possibly unsorted) index of length order().
  const Field& at(std::span<const int> index) const;
  const Field& gradient_at(std::span<const int> index, int axis) const;

  void set(std::size_t rank, Field value, std::vector<Field> gradient);

 private:
  int dim_;
  int order_;
  std::vector<Field> components_;
  std::vector<std::vector<Field>> gradients_;
};

/// Right-hand side of the first-order problem for χ¹_i: f1 = −a e_i, f0 = 0.
WeakRhs rhs_order1(const CoefficientField& a, int axis);

/// χ¹, χ², ... solved order by order. Order k+1 needs p⁰..p^{k−1}.
class CorrectorChain {
 public:
  explicit CorrectorChain(const CellSolver& solver);

  const CellSolver& solver() const noexcept { return *solver_; }
  int max_order() const noexcept { return static_cast<int>(orders_.size()); }
  /// χ^k for 1 <= k <= max_order().
  const CorrectorField& order(int k) const;
  /// Field of χ^k at any index, with χ⁰ = 1.
  const Field& value(int k, std::span<const int> index) const;
  /// Gradient component of χ^k at any index; zero for k = 0.
  const Field& gradient(int k, std::span<const int> index, int axis) const;

  /// Solves the next order; `p` must hold at least p⁰..p^{k−1} for new order k+1.
  void solve_next(std::span<const SymTensor> p);

  std::size_t problems_solved() const noexcept { return solved_; }

 private:
  const CellSolver* solver_;
  std::vector<CorrectorField> orders_;
  Field ones_;
  Field zeros_;
  std::size_t solved_ = 0;
};

/// Symmetrized right-hand side of the problem for χ^{k+1}_idx (k >= 1), built
/// from χ⁰..χ^k of `chain` and p⁰..p^{k−1} (p^m has order m+2).
WeakRhs rhs_higher(const CorrectorChain& chain, int k, std::span<const int> idx, std::span<const SymTensor> p);

/// Supplies p⁰..p^{k−1} when order k+1 is about to be solved.
using PProvider = std::function<std::vector<SymTensor>(int next_order)>;

/// χ¹..χ^{kmax}, one solve per canonical multi-index per order.
CorrectorChain solve_corrector_chain(const CellSolver& solver, int kmax, const PProvider& p_provider);

/// S^{m+2} of ⟨e_{i1}·a(∇χ^{m+1}_{i2..} + e_{i2} χ^m_{i3..})⟩_Y.
/// m = 0 gives the homogenized tensor (flux form), m = 2r gives g^{2r}.
SymTensor corrector_flux_tensor(const CorrectorChain& chain, int m);

/// Max-norm of the symmetrized odd-order tensor g^{2r−1}; vanishes in theory.
double odd_order_residual(const CorrectorChain& chain, int r);

/// Corrector dump: header `corrector k=<k> d=<d> l=<..> n=<..>` then one
/// little-endian field block per canonical multi-index.
void write_corrector_dump(const std::filesystem::path& path, const CorrectorField& chi, const GridShape& shape);

}  // namespace longwave
