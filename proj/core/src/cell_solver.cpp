#include "longwave/cell_solver.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "longwave/errors.hpp"
#include "longwave/parallel.hpp"

namespace longwave {

namespace {

thread_local int g_last_iterations = 0;

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

void subtract_mean(Field& v) {
  const double m = grid_mean(v);
  for (double& x : v) x -= m;
}

}  // namespace

double cell_mean(std::span<const double> v) { return grid_mean(v); }

double solvability_residual(const WeakRhs& rhs) { return std::abs(cell_mean(rhs.f0)); }

CellSolver::CellSolver(const CoefficientField& a, CellSolverOptions options)
    : a_(&a), options_(options), grid_(a.shape()), mean_a_(a.mean_matrix()) {}

std::vector<Field> CellSolver::flux(std::span<const Field> grad) const {
  const int d = a_->dim();
  const std::size_t n = grid_.real_size();
  std::vector<Field> out(static_cast<std::size_t>(d), Field(n, 0.0));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const Field& aij = a_->entry(i, j);
      const Field& gj = grad[j];
      Field& oi = out[i];
      for (std::size_t p = 0; p < n; ++p) oi[p] += aij[p] * gj[p];
    }
  return out;
}

Field CellSolver::apply(std::span<const double> v) const {
  const auto grad = grid_.gradient(v);
  Field out = grid_.divergence(flux(grad));
  for (double& x : out) x = -x;
  return out;
}

Field CellSolver::precondition(std::span<const double> r) const {
  // inverse of the constant-coefficient operator −∇·(⟨a⟩∇·)
  const int d = a_->dim();
  Spectrum s = grid_.forward(r);
  std::vector<double> k(static_cast<std::size_t>(d));
  for (std::size_t m = 0; m < s.size(); ++m) {
    if (grid_.is_kernel_mode(m)) {
      s[m] = 0.0;
      continue;
    }
    for (int a = 0; a < d; ++a) k[a] = grid_.wavenumber(m, a, true);
    double q = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) q += k[i] * mean_a_[i * d + j] * k[j];
    s[m] /= q;
  }
  return grid_.inverse(s);
}

int CellSolver::last_iterations() noexcept { return g_last_iterations; }

Field CellSolver::solve(const WeakRhs& rhs) const {
  const int d = a_->dim();
  const std::size_t n = grid_.real_size();
  if (static_cast<int>(rhs.f1.size()) != d || rhs.f0.size() != n) throw ShapeMismatch("WeakRhs does not match the cell grid");

  const double residual = solvability_residual(rhs);
  const double scale = grid_rms(rhs.f0) + a_->Lambda();
  if (residual > options_.solvability_tolerance * scale)
    throw SolvabilityViolated("cell problem right-hand side has mean " + std::to_string(residual) +
                              " (tolerance " + std::to_string(options_.solvability_tolerance * scale) + ")");

  // strong form: −∇·(a∇v) = −∇·f1 + f0, restricted to the range of the operator
  Field b = grid_.divergence(rhs.f1);
  for (std::size_t p = 0; p < n; ++p) b[p] = rhs.f0[p] - b[p];
  b = grid_.project_out_kernel(b);

  Field x(n, 0.0);
  const double bnorm = std::sqrt(grid_dot(b, b));
  g_last_iterations = 0;
  if (bnorm == 0.0) return x;

  Field r = b;
  Field z = precondition(r);
  Field p = z;
  double rz = grid_dot(r, z);
  for (int it = 1; it <= options_.max_iterations; ++it) {
    const Field ap = apply(p);
    const double alpha = rz / grid_dot(p, ap);
    axpy(alpha, p, x);
    axpy(-alpha, ap, r);
    subtract_mean(x);
    if (std::sqrt(grid_dot(r, r)) <= options_.tolerance * bnorm) {
      g_last_iterations = it;
      return x;
    }
    z = precondition(r);
    const double rz_next = grid_dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t q = 0; q < n; ++q) p[q] = z[q] + beta * p[q];
  }
  throw IterationLimit("cell problem CG did not reach relative residual " + std::to_string(options_.tolerance) +
                       " in " + std::to_string(options_.max_iterations) + " iterations");
}

CorrectorField::CorrectorField(int dim, int order, std::size_t points)
    : dim_(dim),
      order_(order),
      components_(sym_size(dim, order), Field(points, 0.0)),
      gradients_(sym_size(dim, order), std::vector<Field>(static_cast<std::size_t>(dim), Field(points, 0.0))) {}

const Field& CorrectorField::at(std::span<const int> index) const {
  const MultiIndex c = canonicalize(index);
  return components_[index_rank(dim_, c)];
}

const Field& CorrectorField::gradient_at(std::span<const int> index, int axis) const {
  const MultiIndex c = canonicalize(index);
  return gradients_[index_rank(dim_, c)][axis];
}

void CorrectorField::set(std::size_t rank, Field value, std::vector<Field> gradient) {
  components_[rank] = std::move(value);
  gradients_[rank] = std::move(gradient);
}

WeakRhs rhs_order1(const CoefficientField& a, int axis) {
  const int d = a.dim();
  WeakRhs rhs;
  rhs.f0.assign(a.shape().size(), 0.0);
  for (int i = 0; i < d; ++i) {
    Field f = a.entry(i, axis);
    for (double& x : f) x = -x;
    rhs.f1.push_back(std::move(f));
  }
  return rhs;
}

WeakRhs rhs_higher(const CorrectorChain& chain, int k, std::span<const int> idx, std::span<const SymTensor> p) {
  if (k < 1 || static_cast<int>(idx.size()) != k + 1) throw ShapeMismatch("rhs_higher: index length must be k+1");
  if (chain.max_order() < k) throw ConfigError("rhs_higher: corrector of order " + std::to_string(k) + " missing");
  if (static_cast<int>(p.size()) < k) throw ConfigError("rhs_higher: needs p tensors up to order " + std::to_string(k - 1));
  const CoefficientField& a = chain.solver().coefficient();
  const int d = a.dim();
  const std::size_t n = a.shape().size();

  WeakRhs rhs;
  rhs.f1.assign(static_cast<std::size_t>(d), Field(n, 0.0));
  rhs.f0.assign(n, 0.0);
  std::size_t arrangements = 0;

  for_each_arrangement(idx, [&](std::span<const int> perm) {
    ++arrangements;
    const int i1 = perm[0];
    const auto rest = perm.subspan(1);
    const Field& chi_k = chain.value(k, rest);
    for (int ax = 0; ax < d; ++ax) {
      const Field& a_ax = a.entry(ax, i1);
      const Field& grad = chain.gradient(k, rest, ax);
      Field& f1 = rhs.f1[ax];
      for (std::size_t q = 0; q < n; ++q) {
        f1[q] -= a_ax[q] * chi_k[q];
        rhs.f0[q] += a_ax[q] * grad[q];
      }
    }
    const Field& a12 = a.entry(i1, perm[1]);
    const Field& chi_km1 = chain.value(k - 1, perm.subspan(2));
    for (std::size_t q = 0; q < n; ++q) rhs.f0[q] += a12[q] * chi_km1[q];

    for (int j = 0; j <= k - 1; ++j) {
      const SymTensor& pt = p[static_cast<std::size_t>(k - 1 - j)];
      if (pt.order() != k + 1 - j) throw ShapeMismatch("rhs_higher: p^m must have order m+2");
      const double coeff = pt.at(perm.first(static_cast<std::size_t>(k + 1 - j)));
      if (coeff == 0.0) continue;
      const Field& chi_j = chain.value(j, perm.subspan(static_cast<std::size_t>(k + 1 - j)));
      for (std::size_t q = 0; q < n; ++q) rhs.f0[q] -= coeff * chi_j[q];
    }
  });

  const double inv = 1.0 / static_cast<double>(arrangements);
  for (auto& f : rhs.f1)
    for (double& x : f) x *= inv;
  for (double& x : rhs.f0) x *= inv;
  return rhs;
}

CorrectorChain::CorrectorChain(const CellSolver& solver)
    : solver_(&solver), ones_(solver.grid().real_size(), 1.0), zeros_(solver.grid().real_size(), 0.0) {}

const CorrectorField& CorrectorChain::order(int k) const {
  if (k < 1 || k > max_order()) throw ConfigError("corrector of order " + std::to_string(k) + " has not been solved");
  return orders_[static_cast<std::size_t>(k - 1)];
}

const Field& CorrectorChain::value(int k, std::span<const int> index) const {
  if (k == 0) return ones_;
  return order(k).at(index);
}

const Field& CorrectorChain::gradient(int k, std::span<const int> index, int axis) const {
  if (k == 0) return zeros_;
  return order(k).gradient_at(index, axis);
}

void CorrectorChain::solve_next(std::span<const SymTensor> p) {
  const int next = max_order() + 1;
  const int d = solver_->coefficient().dim();
  const auto indices = multi_index_set(d, next);
  CorrectorField chi(d, next, solver_->grid().real_size());
  parallel_for(indices.size(), [&](std::size_t r) {
    const WeakRhs rhs = next == 1 ? rhs_order1(solver_->coefficient(), indices[r][0])
                                  : rhs_higher(*this, next - 1, indices[r], p);
    Field v = solver_->solve(rhs);
    auto grad = solver_->grid().gradient(v);
    chi.set(r, std::move(v), std::move(grad));
  });
  orders_.push_back(std::move(chi));
  solved_ += indices.size();
}

CorrectorChain solve_corrector_chain(const CellSolver& solver, int kmax, const PProvider& p_provider) {
  CorrectorChain chain(solver);
  for (int k = 1; k <= kmax; ++k) {
    const std::vector<SymTensor> p = k == 1 ? std::vector<SymTensor>{} : p_provider(k);
    chain.solve_next(p);
  }
  return chain;
}

SymTensor corrector_flux_tensor(const CorrectorChain& chain, int m) {
  if (m < 0 || chain.max_order() < m + 1)
    throw ConfigError("corrector_flux_tensor: needs correctors up to order " + std::to_string(m + 1));
  const CoefficientField& a = chain.solver().coefficient();
  const int d = a.dim();
  const double inv_n = 1.0 / static_cast<double>(a.shape().size());
  return symmetrize(d, m + 2, [&](std::span<const int> perm) {
    const int i1 = perm[0];
    const auto rest = perm.subspan(1);
    double sum = 0.0;
    for (int ax = 0; ax < d; ++ax) sum += grid_dot(a.entry(i1, ax), chain.gradient(m + 1, rest, ax));
    sum += grid_dot(a.entry(i1, perm[1]), chain.value(m, perm.subspan(2)));
    return sum * inv_n;
  });
}

double odd_order_residual(const CorrectorChain& chain, int r) {
  if (r < 1) throw ConfigError("odd_order_residual: r must be >= 1");
  return corrector_flux_tensor(chain, 2 * r - 1).max_abs();
}

void write_corrector_dump(const std::filesystem::path& path, const CorrectorField& chi, const GridShape& shape) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write corrector dump " + path.string());
  out << "corrector k=" << chi.order() << " d=" << shape.dim() << " l=" << join_numbers(shape.lengths)
      << " n=" << join_numbers(shape.points) << '\n';
  for (std::size_t r = 0; r < chi.count(); ++r) write_doubles_le(out, chi.component(r));
}

}  // namespace longwave
