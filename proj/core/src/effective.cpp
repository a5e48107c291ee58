#include "longwave/effective.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "longwave/errors.hpp"

namespace longwave {

namespace {

double mean_product(const Field& u, const Field& v) { return grid_dot(u, v) / static_cast<double>(u.size()); }

double mean_triple(const Field& a, const Field& u, const Field& v) {
  double s = 0.0;
  for (std::size_t q = 0; q < u.size(); ++q) s += a[q] * u[q] * v[q];
  return s / static_cast<double>(u.size());
}

// ⟨a∇χ^k_I · ∇χ^k_J⟩_Y
double energy_pairing(const CorrectorChain& chain, int k, std::span<const int> i, std::span<const int> j) {
  const CoefficientField& a = chain.solver().coefficient();
  const int d = a.dim();
  double s = 0.0;
  for (int x = 0; x < d; ++x)
    for (int y = 0; y < d; ++y) s += mean_triple(a.entry(x, y), chain.gradient(k, i, x), chain.gradient(k, j, y));
  return s;
}

void require_order(const SymTensor& t, int order, int dim, const char* what) {
  if (t.order() != order || t.dim() != dim) throw ShapeMismatch(std::string(what) + " has the wrong order or dimension");
}

}  // namespace

EffectiveModel EffectiveModel::truncated(int s) const {
  if (s < 0 || s > order()) throw ConfigError("cannot truncate a model of order " + std::to_string(order()) +
                                              " to " + std::to_string(s));
  EffectiveModel m = *this;
  m.stages.resize(static_cast<std::size_t>(s));
  if (s < order()) m.alpha = 2 * s;
  return m;
}

double QfCoefficients::multiplier(std::span<const double> k, double epsilon) const {
  double h = 1.0;
  double e2 = 1.0;
  for (std::size_t r = 0; r < terms.size(); ++r) {
    e2 *= epsilon * epsilon;
    // (−1)^r b : (ik)^{⊗2r} = b : k^{⊗2r}
    const double sign = (r % 2 == 0) ? -1.0 : 1.0;
    h += e2 * sign * contract_kpow(terms[r], k);
  }
  return h;
}

SymTensor homogenized_tensor(const CorrectorChain& chain) {
  SymTensor a0 = corrector_flux_tensor(chain, 0);
  if (!(min_eigenvalue(matricize(a0)) > 0.0))
    throw NumericalError("homogenized tensor is not positive definite; the corrector solve is broken");
  return a0;
}

SymTensor homogenized_tensor_energy(const CorrectorChain& chain) {
  const CoefficientField& a = chain.solver().coefficient();
  return symmetrize(a.dim(), 2, [&](std::span<const int> idx) {
    return -energy_pairing(chain, 1, idx.first(1), idx.subspan(1)) + grid_mean(a.entry(idx[0], idx[1]));
  });
}

SymTensor g_naive(const CorrectorChain& chain, int r) {
  if (r < 0) throw ConfigError("g_naive: r must be >= 0");
  return corrector_flux_tensor(chain, 2 * r);
}

SymTensor g_reduced(const CorrectorChain& chain, int r, std::span<const SymTensor> g_prev) {
  if (r < 1) throw ConfigError("g_reduced: r must be >= 1");
  if (chain.max_order() < r + 1) throw ConfigError("g_reduced: needs correctors up to order " + std::to_string(r + 1));
  if (static_cast<int>(g_prev.size()) < r) throw ConfigError("g_reduced: needs g^0..g^{2r-2}");
  const CoefficientField& a = chain.solver().coefficient();
  const int d = a.dim();
  const std::size_t n1 = static_cast<std::size_t>(r + 1);
  const double sign = (r % 2 == 0) ? 1.0 : -1.0;
  const int odd_terms = (r + 1) / 2;
  const int even_terms = r / 2;

  return symmetrize(d, 2 * r + 2, [&](std::span<const int> idx) {
    // k^r: first r+1 indices against the last r+1
    double k = -energy_pairing(chain, r + 1, idx.first(n1), idx.subspan(n1));
    k += mean_triple(a.entry(idx[0], idx[n1]), chain.value(r, idx.subspan(1, n1 - 1)), chain.value(r, idx.subspan(n1 + 1)));

    // h^r: g blocks followed by two corrector blocks
    double h = 0.0;
    for (int j = 1; j <= odd_terms; ++j)
      for (int l = 1; l <= odd_terms; ++l) {
        const int m = r - j - l + 1;
        const auto gi = static_cast<std::size_t>(2 * m + 2);
        const auto ji = static_cast<std::size_t>(2 * j - 1);
        const double gv = g_prev[static_cast<std::size_t>(m)].at(idx.first(gi));
        if (gv == 0.0) continue;
        h += gv * mean_product(chain.value(2 * j - 1, idx.subspan(gi, ji)), chain.value(2 * l - 1, idx.subspan(gi + ji)));
      }
    for (int j = 1; j <= even_terms; ++j)
      for (int l = 1; l <= even_terms; ++l) {
        const int m = r - j - l;
        const auto gi = static_cast<std::size_t>(2 * m + 2);
        const auto ji = static_cast<std::size_t>(2 * j);
        const double gv = g_prev[static_cast<std::size_t>(m)].at(idx.first(gi));
        if (gv == 0.0) continue;
        h -= gv * mean_product(chain.value(2 * j, idx.subspan(gi, ji)), chain.value(2 * l, idx.subspan(gi + ji)));
      }
    return sign * k + h;
  });
}

SymTensor check_q(int r, const SymTensor& g2r, std::span<const SymTensor> c_prev, std::span<const SymTensor> b_prev) {
  if (r < 1) throw ConfigError("check_q: r must be >= 1");
  if (static_cast<int>(c_prev.size()) < r - 1 || static_cast<int>(b_prev.size()) < r - 1)
    throw ConfigError("check_q: missing c or b tensors of earlier stages");
  require_order(g2r, 2 * r + 2, g2r.dim(), "g^{2r}");
  SymTensor q = (r % 2 == 0) ? g2r : -g2r;
  for (int l = 1; l <= r - 1; ++l)
    q += tensor_product(c_prev[static_cast<std::size_t>(l - 1)], b_prev[static_cast<std::size_t>(r - l - 1)]);
  return q;
}

PsdCorrection psd_correction(const SymTensor& checkq, const SymTensor& a0, double margin) {
  require_order(a0, 2, checkq.dim(), "a0");
  if (checkq.order() < 4 || checkq.order() % 2 != 0) throw ShapeMismatch("psd_correction: checkq must have even order >= 4");
  if (!(margin >= 0.0)) throw ConfigError("delta margin must be non-negative");
  const int r = checkq.order() / 2 - 1;
  const SymTensor power_hi = sym_power(a0, r + 1);
  const double lambda_a = min_eigenvalue(matricize(power_hi));
  if (!(lambda_a > 0.0)) throw NumericalError("tensor power of the homogenized tensor is not positive definite");
  const double lambda_q = min_eigenvalue(matricize(checkq));

  PsdCorrection out;
  out.deltastar = std::max(0.0, -lambda_q / lambda_a);
  out.delta = out.deltastar + margin;
  out.b2r = sym_power(a0, r) * out.delta;
  out.a2r = checkq + power_hi * out.delta;
  return out;
}

SymTensor c_recursion(const SymTensor& a0, std::span<const EffectiveStage> earlier, const SymTensor& a2r,
                      const SymTensor& b2r) {
  const int r = static_cast<int>(earlier.size()) + 1;
  require_order(a2r, 2 * r + 2, a0.dim(), "a^{2r}");
  require_order(b2r, 2 * r, a0.dim(), "b^{2r}");
  SymTensor c = a2r - tensor_product(a0, b2r);
  for (int l = 1; l <= r - 1; ++l)
    c -= tensor_product(earlier[static_cast<std::size_t>(l - 1)].cr, earlier[static_cast<std::size_t>(r - l - 1)].b2r);
  return c;
}

QfCoefficients qf_coefficients(const EffectiveModel& model) {
  QfCoefficients q;
  for (const auto& st : model.stages) q.terms.push_back(st.r % 2 == 0 ? st.b2r : -st.b2r);
  return q;
}

std::size_t cell_problem_count(int dim, int k) {
  if (dim < 1 || k < 0) throw ConfigError("cell_problem_count: need d >= 1 and k >= 0");
  return binomial(k + dim, dim) - 1;
}

SavingsCount savings_count(int dim, int s) {
  if (dim < 1 || s < 1) throw ConfigError("savings_count: need d >= 1 and s >= 1");
  SavingsCount c;
  c.solved = cell_problem_count(dim, s + 1);
  c.naive = cell_problem_count(dim, 2 * s + 1);
  c.spared = c.naive - c.solved;
  return c;
}

EffectivePipeline::EffectivePipeline(CoefficientField a, int alpha, double epsilon, PipelineOptions options)
    : a_(std::make_unique<CoefficientField>(std::move(a))), options_(options) {
  if (alpha < 0) throw ConfigError("alpha must be >= 0");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  solver_ = std::make_unique<CellSolver>(*a_, options_.solver);
  chain_ = std::make_unique<CorrectorChain>(*solver_);
  const int d = a_->dim();

  model_.dim = d;
  model_.alpha = alpha;
  model_.epsilon = epsilon;

  chain_->solve_next({});
  a0_flux_ = homogenized_tensor(*chain_);
  model_.a0 = homogenized_tensor_energy(*chain_);
  if (!sym_equal(model_.a0, a0_flux_, options_.homogenized_agreement))
    throw NumericalError("energy and flux forms of the homogenized tensor disagree");

  std::vector<SymTensor> g{model_.a0};
  std::vector<SymTensor> c_prev;
  std::vector<SymTensor> b_prev;
  const int s = alpha / 2;
  for (int r = 1; r <= s; ++r) {
    chain_->solve_next(p_tensors(r));
    EffectiveStage st;
    st.r = r;
    st.g2r = g_reduced(*chain_, r, g);
    st.checkq = check_q(r, st.g2r, c_prev, b_prev);
    PsdCorrection psd = psd_correction(st.checkq, model_.a0, options_.delta_margin);
    st.a2r = std::move(psd.a2r);
    st.b2r = std::move(psd.b2r);
    st.deltastar = psd.deltastar;
    st.delta = psd.delta;
    st.cr = c_recursion(model_.a0, model_.stages, st.a2r, st.b2r);
    g.push_back(st.g2r);
    c_prev.push_back(st.cr);
    b_prev.push_back(st.b2r);
    model_.stages.push_back(std::move(st));
  }
}

std::vector<SymTensor> EffectivePipeline::p_tensors(int count) const {
  std::vector<SymTensor> p;
  const int d = model_.dim;
  for (int m = 0; m < count; ++m) {
    if (m % 2 == 1) {
      p.emplace_back(d, m + 2);
      continue;
    }
    const int l = m / 2;
    if (l == 0) {
      p.push_back(model_.a0);
    } else {
      if (l > model_.order()) throw ConfigError("p tensor of order " + std::to_string(m) + " needs stage " +
                                                std::to_string(l) + " of the model");
      const SymTensor& c = model_.stages[static_cast<std::size_t>(l - 1)].cr;
      p.push_back(l % 2 == 0 ? c : -c);
    }
  }
  return p;
}

void EffectivePipeline::extend_chain(int max_order) {
  while (chain_->max_order() < max_order) {
    const int next = chain_->max_order() + 1;
    chain_->solve_next(p_tensors(next - 1));
  }
}

EffectiveModel algorithm1(const CoefficientField& a, int alpha, double epsilon, const PipelineOptions& options) {
  EffectivePipeline p(a, alpha, epsilon, options);
  return p.model();
}

NaiveCheck naive_check(EffectivePipeline& pipeline, double tol) {
  const EffectiveModel& m = pipeline.model();
  const int s = m.order();
  pipeline.extend_chain(2 * s + 1);
  NaiveCheck out;
  for (int r = 1; r <= s; ++r) {
    SymTensor gn = g_naive(pipeline.chain(), r);
    const SymTensor& gr = m.stages[static_cast<std::size_t>(r - 1)].g2r;
    out.max_difference.push_back((gn - gr).max_abs());
    out.agrees.push_back(sym_equal(gn, gr, tol));
    out.odd_residuals.push_back(odd_order_residual(pipeline.chain(), r));
    out.g_naive.push_back(std::move(gn));
  }
  return out;
}

FamilyCheck check_family(const EffectiveModel& model, double psd_tol, double constraint_tol) {
  FamilyCheck f;
  const int d = model.dim;
  f.a0_positive_definite = model.a0.order() == 2 && model.a0.dim() == d && min_eigenvalue(matricize(model.a0)) > 0.0;
  f.orders_ok = model.a0.order() == 2 && model.a0.dim() == d;
  f.psd_ok = true;
  f.constraint_ok = true;
  f.deltastar_nonnegative = true;
  f.worst_min_eigenvalue = 0.0;
  bool first = true;
  for (std::size_t i = 0; i < model.stages.size(); ++i) {
    const auto& st = model.stages[i];
    const int r = static_cast<int>(i) + 1;
    const bool shapes = st.r == r && st.a2r.order() == 2 * r + 2 && st.b2r.order() == 2 * r &&
                        st.cr.order() == 2 * r + 2 && st.checkq.order() == 2 * r + 2 && st.a2r.dim() == d &&
                        st.b2r.dim() == d && st.cr.dim() == d && st.checkq.dim() == d;
    f.orders_ok = f.orders_ok && shapes;
    if (!shapes) continue;
    const double ea = min_eigenvalue(matricize(st.a2r));
    const double eb = min_eigenvalue(matricize(st.b2r));
    const double e = std::min(ea, eb);
    f.worst_min_eigenvalue = first ? e : std::min(f.worst_min_eigenvalue, e);
    first = false;
    f.psd_ok = f.psd_ok && ea >= -psd_tol && eb >= -psd_tol;
    const SymTensor lhs = st.a2r - tensor_product(st.b2r, model.a0);
    const double scale = 1.0 + std::max(lhs.max_abs(), st.checkq.max_abs());
    f.worst_constraint_residual = std::max(f.worst_constraint_residual, (lhs - st.checkq).max_abs() / scale);
    f.constraint_ok = f.constraint_ok && sym_equal(lhs, st.checkq, constraint_tol);
    f.deltastar_nonnegative = f.deltastar_nonnegative && st.deltastar >= 0.0 && st.delta >= st.deltastar;
  }
  return f;
}

void write_model(std::ostream& out, const EffectiveModel& model) {
  const auto old = out.precision(17);
  out << "[model]\n"
      << "d = " << model.dim << '\n'
      << "alpha = " << model.alpha << '\n'
      << "epsilon = " << model.epsilon << '\n'
      << "stages = " << model.order() << '\n';
  out << "[a0]\n";
  write_symtensor(out, model.a0);
  for (const auto& st : model.stages) {
    out << "[stage " << st.r << "]\n"
        << "deltastar = " << st.deltastar << '\n'
        << "delta = " << st.delta << '\n';
    const std::pair<const char*, const SymTensor*> blocks[] = {
        {"a2r", &st.a2r}, {"b2r", &st.b2r}, {"cr", &st.cr}, {"g2r", &st.g2r}, {"checkq", &st.checkq}};
    for (const auto& [name, t] : blocks) {
      out << name << ":\n";
      write_symtensor(out, *t);
    }
  }
  out.precision(old);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool next_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    line = trim(line);
    if (!line.empty() && line[0] != '#') return true;
  }
  return false;
}

std::pair<std::string, std::string> key_value(const std::string& line) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) throw ConfigError("model file: expected key = value, got: " + line);
  return {trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
}

double to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("model file: malformed number: " + s);
  }
}

}  // namespace

EffectiveModel read_model(std::istream& in) {
  EffectiveModel m;
  std::string line;
  if (!next_line(in, line) || line != "[model]") throw ConfigError("model file must start with [model]");
  int declared = -1;
  bool have_a0 = false;
  while (next_line(in, line)) {
    if (line == "[a0]") {
      if (!next_line(in, line)) throw ConfigError("model file: [a0] without tensor");
      m.a0 = read_symtensor_body(in, line);
      have_a0 = true;
      continue;
    }
    if (line.rfind("[stage", 0) == 0) {
      EffectiveStage st;
      try {
        st.r = std::stoi(line.substr(6));
      } catch (const std::exception&) {
        throw ConfigError("model file: malformed stage header: " + line);
      }
      int blocks = 0;
      while (blocks < 5) {
        if (!next_line(in, line)) throw ConfigError("model file: stage " + std::to_string(st.r) + " truncated");
        if (line.back() == ':') {
          const std::string name = line.substr(0, line.size() - 1);
          std::string header;
          if (!next_line(in, header)) throw ConfigError("model file: missing tensor after " + line);
          SymTensor t = read_symtensor_body(in, header);
          if (name == "a2r") st.a2r = std::move(t);
          else if (name == "b2r") st.b2r = std::move(t);
          else if (name == "cr") st.cr = std::move(t);
          else if (name == "g2r") st.g2r = std::move(t);
          else if (name == "checkq") st.checkq = std::move(t);
          else throw ConfigError("model file: unknown tensor block " + name);
          ++blocks;
        } else {
          const auto [k, v] = key_value(line);
          if (k == "deltastar") st.deltastar = to_double(v);
          else if (k == "delta") st.delta = to_double(v);
          else throw ConfigError("model file: unknown stage key " + k);
        }
      }
      if (st.r != m.order() + 1) throw ConfigError("model file: stages out of order");
      m.stages.push_back(std::move(st));
      continue;
    }
    const auto [k, v] = key_value(line);
    if (k == "d") m.dim = static_cast<int>(to_double(v));
    else if (k == "alpha") m.alpha = static_cast<int>(to_double(v));
    else if (k == "epsilon") m.epsilon = to_double(v);
    else if (k == "stages") declared = static_cast<int>(to_double(v));
    else throw ConfigError("model file: unknown key " + k);
  }
  if (!have_a0) throw ConfigError("model file lacks [a0]");
  if (declared >= 0 && declared != m.order()) throw ConfigError("model file: stage count does not match header");
  if (m.a0.dim() != m.dim || m.a0.order() != 2) throw ConfigError("model file: a0 has the wrong shape");
  if (!check_family(m, 1e-9, 1e-7).orders_ok) throw ConfigError("model file: tensor orders are inconsistent");
  return m;
}

}  // namespace longwave
