#pragma once

// Effective tensors of the dispersive wave equation
//   ∂²ₜũ − a⁰∇²ũ − Σ_r (−1)^r ε^{2r} (a^{2r}∇^{2r+2}ũ − b^{2r}∇^{2r}∂²ₜũ) = Qf
// built stage by stage from the cell correctors.

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "longwave/cell_solver.hpp"
#include "longwave/medium.hpp"
#include "longwave/sym_tensor.hpp"

namespace longwave {

struct EffectiveStage {
  int r = 0;
  SymTensor a2r;     // order 2r+2, PSD
  SymTensor b2r;     // order 2r, PSD
  SymTensor cr;      // order 2r+2
  SymTensor g2r;     // order 2r+2, symmetrized corrector tensor
  SymTensor checkq;  // order 2r+2, constraint right-hand side
  double deltastar = 0.0;  // minimal PSD shift
  double delta = 0.0;      // shift actually used (deltastar + margin)
};

struct EffectiveModel {
  int dim = 1;
  int alpha = 0;
  double epsilon = 1.0;
  SymTensor a0;
  std::vector<EffectiveStage> stages;

  int order() const noexcept { return static_cast<int>(stages.size()); }
  /// Same model keeping only stages 1..s.
  EffectiveModel truncated(int s) const;
};

/// Signed coefficient tensors (−1)^r b^{2r} of the source operator Qf.
struct QfCoefficients {
  std::vector<SymTensor> terms;  // r = 1..s, order 2r
  /// Fourier multiplier 1 + Σ_r ε^{2r} b^{2r} : k^{⊗2r}.
  double multiplier(std::span<const double> k, double epsilon) const;
};

/// Flux form ⟨e_i·a(∇χ¹_j + e_j)⟩_Y, symmetrized; throws if not positive definite.
SymTensor homogenized_tensor(const CorrectorChain& chain);
/// Energy form −⟨a∇χ¹_j·∇χ¹_i⟩_Y + ⟨a_ij⟩_Y (= k⁰).
SymTensor homogenized_tensor_energy(const CorrectorChain& chain);

/// S(g^{2r}) from χ^{2r} and χ^{2r+1}. r = 0 reproduces the homogenized tensor.
SymTensor g_naive(const CorrectorChain& chain, int r);

/// S(g^{2r}) = S((−1)^r k^r + h^r) from χ¹..χ^{r+1} and g⁰..g^{2r−2}.
SymTensor g_reduced(const CorrectorChain& chain, int r, std::span<const SymTensor> g_prev);

/// q̌^r = S((−1)^r g^{2r} + Σ_{ℓ=1}^{r−1} c^ℓ ⊗ b^{2(r−ℓ)}).
/// c_prev holds c¹..c^{r−1}, b_prev holds b²..b^{2(r−1)}.
SymTensor check_q(int r, const SymTensor& g2r, std::span<const SymTensor> c_prev, std::span<const SymTensor> b_prev);

struct PsdCorrection {
  SymTensor a2r;
  SymTensor b2r;
  double deltastar = 0.0;
  double delta = 0.0;
};

/// Smallest shift along S(⊗a⁰) powers making a^{2r}, b^{2r} PSD.
PsdCorrection psd_correction(const SymTensor& checkq, const SymTensor& a0, double margin = 0.0);

/// c^r = a^{2r} − Σ_{ℓ=0}^{r−1} c^ℓ ⊗ b^{2(r−ℓ)}, with c⁰ = a⁰.
/// `earlier` holds the completed stages 1..r−1.
SymTensor c_recursion(const SymTensor& a0, std::span<const EffectiveStage> earlier, const SymTensor& a2r,
                      const SymTensor& b2r);

QfCoefficients qf_coefficients(const EffectiveModel& model);

struct SavingsCount {
  std::size_t solved = 0;
  std::size_t naive = 0;
  std::size_t spared = 0;
};

/// CP(d,k) = binom(k+d, d) − 1 cell problems for χ¹..χ^k.
std::size_t cell_problem_count(int dim, int k);
SavingsCount savings_count(int dim, int s);

struct PipelineOptions {
  CellSolverOptions solver;
  double delta_margin = 0.0;
  double homogenized_agreement = 1e-10;  // energy vs flux form of a⁰
};

/// Owns the cell solver and corrector chain behind one effective model.
class EffectivePipeline {
 public:
  EffectivePipeline(CoefficientField a, int alpha, double epsilon, PipelineOptions options = {});
  EffectivePipeline(const EffectivePipeline&) = delete;
  EffectivePipeline& operator=(const EffectivePipeline&) = delete;

  const EffectiveModel& model() const noexcept { return model_; }
  const CorrectorChain& chain() const noexcept { return *chain_; }
  const CoefficientField& coefficient() const noexcept { return *a_; }
  const CellSolver& solver() const noexcept { return *solver_; }

  /// Flux form of a⁰ computed alongside the energy form.
  const SymTensor& homogenized_flux() const noexcept { return a0_flux_; }
  std::size_t problems_solved() const noexcept { return chain_->problems_solved(); }

  /// p⁰..p^{count−1} from the model (p^{2m} = (−1)^m c^m, odd ones zero).
  std::vector<SymTensor> p_tensors(int count) const;

  /// Solves further correctors with the model's p tensors (order <= 2s+2).
  void extend_chain(int max_order);

 private:
  std::unique_ptr<CoefficientField> a_;
  std::unique_ptr<CellSolver> solver_;
  std::unique_ptr<CorrectorChain> chain_;
  EffectiveModel model_;
  SymTensor a0_flux_;
  PipelineOptions options_;
};

/// Runs the full construction and returns the model.
EffectiveModel algorithm1(const CoefficientField& a, int alpha, double epsilon, const PipelineOptions& options = {});

/// Cross-checks of the reduced formula against the naive one.
struct NaiveCheck {
  std::vector<SymTensor> g_naive;          // r = 1..s
  std::vector<double> max_difference;      // |g_naive − g_reduced|_max
  std::vector<double> odd_residuals;       // Lemma residual for r = 1..s
  std::vector<bool> agrees;                // sym_equal at tolerance
};
NaiveCheck naive_check(EffectivePipeline& pipeline, double tol = 1e-8);

/// Definition-level checks on an emitted model.
struct FamilyCheck {
  bool a0_positive_definite = false;
  bool orders_ok = false;
  bool psd_ok = false;
  bool constraint_ok = false;
  bool deltastar_nonnegative = false;
  double worst_min_eigenvalue = 0.0;
  double worst_constraint_residual = 0.0;
  bool all() const noexcept {
    return a0_positive_definite && orders_ok && psd_ok && constraint_ok && deltastar_nonnegative;
  }
};
FamilyCheck check_family(const EffectiveModel& model, double psd_tol = 1e-12, double constraint_tol = 1e-9);

/// Structured text serialization of EffectiveModel.
void write_model(std::ostream& out, const EffectiveModel& model);
EffectiveModel read_model(std::istream& in);

}  // namespace longwave
