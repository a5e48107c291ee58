#include "longwave/wave.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "longwave/errors.hpp"

namespace longwave {

namespace {

constexpr double kIntegralTol = 1e-9;

double l2_norm(std::span<const double> v) { return std::sqrt(grid_dot(v, v)); }

}  // namespace

GridShape MacroGrid::shape() const {
  GridShape s;
  for (int a = 0; a < dim(); ++a) s.lengths.push_back(hi[a] - lo[a]);
  s.points = points;
  return s;
}

double MacroGrid::min_spacing() const {
  double h = std::numeric_limits<double>::infinity();
  for (int a = 0; a < dim(); ++a) h = std::min(h, spacing(a));
  return h;
}

std::vector<DomainCheck> check_domain(const MacroGrid& grid) {
  const int d = grid.dim();
  if (d < 1 || d > 3 || static_cast<int>(grid.lo.size()) != d || static_cast<int>(grid.hi.size()) != d ||
      static_cast<int>(grid.cell_lengths.size()) != d)
    throw ShapeMismatch("macro grid: bounds, points and cell lengths must share one dimension in 1..3");
  if (!(grid.epsilon > 0.0)) throw ConfigError("macro grid: epsilon must be positive");
  std::vector<DomainCheck> out;
  for (int a = 0; a < d; ++a) {
    DomainCheck c;
    c.axis = a + 1;
    const double width = grid.hi[a] - grid.lo[a];
    const double period = grid.epsilon * grid.cell_lengths[a];
    std::ostringstream msg;
    if (!(width > 0.0)) {
      msg << "axis " << c.axis << ": empty interval";
    } else if (grid.points[a] < 2 || grid.points[a] % 2 != 0) {
      msg << "axis " << c.axis << ": point count " << grid.points[a] << " must be even and >= 2";
    } else {
      c.cells = width / period;
      c.points_per_cell = period / grid.spacing(a);
      const double n = std::round(c.cells);
      const double ppc = std::round(c.points_per_cell);
      if (n < 1.0 || std::abs(c.cells - n) > kIntegralTol * std::max(1.0, n)) {
        msg << "axis " << c.axis << ": (hi - lo)/(l eps) = " << c.cells << " is not a positive integer";
      } else if (ppc < 1.0 || std::abs(c.points_per_cell - ppc) > kIntegralTol * std::max(1.0, ppc)) {
        msg << "axis " << c.axis << ": grid spacing does not divide the period (" << c.points_per_cell
            << " points per period)";
      } else {
        c.ok = true;
        msg << "axis " << c.axis << ": " << n << " periods, " << ppc << " points per period";
      }
    }
    c.message = msg.str();
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<DomainCheck> validate_domain(const MacroGrid& grid) {
  auto checks = check_domain(grid);
  for (const auto& c : checks)
    if (!c.ok) throw IncompatibleDomain(c.axis, "incompatible domain: " + c.message);
  return checks;
}

FineOperator::FineOperator(const MacroGrid& grid, const Medium& medium)
    : grid_(grid), spectral_((validate_domain(grid), grid.shape())) {
  const int d = grid_.dim();
  if (medium.dim() != d) throw ShapeMismatch("medium and macro grid dimensions differ");
  for (int a = 0; a < d; ++a)
    if (std::abs(medium.cell_lengths()[a] - grid_.cell_lengths[a]) > 1e-12 * medium.cell_lengths()[a])
      throw ShapeMismatch("macro grid cell lengths differ from the medium's");
  const std::size_t n = spectral_.real_size();
  a_.assign(static_cast<std::size_t>(sym_entries(d)), Field(n));
  std::array<double, 3> y{};
  std::array<double, 6> e{};
  for (std::size_t p = 0; p < n; ++p) {
    std::size_t rem = p;
    for (int a = d - 1; a >= 0; --a) {
      const auto np = static_cast<std::size_t>(grid_.points[a]);
      y[a] = grid_.coordinate(a, static_cast<int>(rem % np)) / grid_.epsilon;
      rem /= np;
    }
    medium.evaluate(std::span<const double>(y.data(), static_cast<std::size_t>(d)),
                    std::span<double>(e.data(), static_cast<std::size_t>(sym_entries(d))));
    for (int s = 0; s < sym_entries(d); ++s) a_[s][p] = e[s];
  }
  CoefficientField bounds(grid_.shape(), a_);
  lambda_ = bounds.lambda();
  Lambda_ = bounds.Lambda();
}

Field FineOperator::apply(std::span<const double> u) const {
  const int d = grid_.dim();
  const auto grad = spectral_.gradient(u);
  const std::size_t n = spectral_.real_size();
  std::vector<Field> flux(static_cast<std::size_t>(d), Field(n, 0.0));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const Field& aij = a_[sym_slot(d, i, j)];
      for (std::size_t p = 0; p < n; ++p) flux[i][p] += aij[p] * grad[j][p];
    }
  return spectral_.divergence(flux);
}

Field apply_fine_operator(const FineOperator& op, std::span<const double> u) { return op.apply(u); }

double cfl_limit(const FineOperator& op, double safety) {
  return safety * op.macro().min_spacing() / (std::sqrt(op.Lambda()) * std::sqrt(static_cast<double>(op.macro().dim())));
}

double default_time_step(const FineOperator& op) { return op.macro().min_spacing() / (4.0 * std::sqrt(op.Lambda())); }

FineResult fine_solve(const FineOperator& op, std::span<const double> g0, std::span<const double> g1,
                      const SimConfig& cfg, const std::function<void(long long, long long)>& progress) {
  const std::size_t n = op.grid().real_size();
  if (g0.size() != n || g1.size() != n) throw ShapeMismatch("initial data do not match the macro grid");
  if (!(cfg.t_end >= 0.0)) throw ConfigError("t_end must be non-negative");
  FineResult res;
  res.dt = cfg.dt > 0.0 ? cfg.dt : default_time_step(op);
  const double limit = cfl_limit(op, cfg.cfl_safety);
  if (res.dt > limit) {
    std::ostringstream msg;
    msg << "time step " << res.dt << " exceeds the CFL limit " << limit;
    throw CflViolation(msg.str());
  }
  const double dt = res.dt;
  const long long total = static_cast<long long>(std::llround(cfg.t_end / dt));
  res.steps = total;

  std::vector<long long> out_steps;
  for (double t : cfg.output_times) {
    if (t < 0.0 || t > cfg.t_end * (1.0 + 1e-12)) throw ConfigError("output time outside [0, t_end]");
    out_steps.push_back(std::min(total, static_cast<long long>(std::llround(t / dt))));
  }
  std::vector<std::size_t> order(out_steps.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return out_steps[x] < out_steps[y]; });
  res.states.resize(out_steps.size());
  std::size_t next_out = 0;

  const double ref = std::max({l2_norm(g0), cfg.t_end * l2_norm(g1), std::numeric_limits<double>::min()});
  const double limit_norm = cfg.blowup_factor * ref;
  auto check_blowup = [&](const Field& u, long long step) {
    const double norm = l2_norm(u);
    if (!std::isfinite(norm) || norm > limit_norm) {
      std::ostringstream msg;
      msg << "fine solution blew up at step " << step << " (norm " << norm << ")";
      throw BlowUp(msg.str());
    }
  };

  auto emit = [&](long long step, const Field& u, Field v) {
    while (next_out < order.size() && out_steps[order[next_out]] == step) {
      WaveState& s = res.states[order[next_out]];
      s.t = static_cast<double>(step) * dt;
      s.u = u;
      s.v = v;
      ++next_out;
    }
  };

  Field u_prev(g0.begin(), g0.end());
  emit(0, u_prev, Field(g1.begin(), g1.end()));
  if (total == 0) return res;

  Field lu = op.apply(u_prev);
  Field u(n);
  for (std::size_t p = 0; p < n; ++p) u[p] = g0[p] + dt * g1[p] + 0.5 * dt * dt * lu[p];

  auto energy = [&](const Field& next, const Field& cur, const Field& lcur) {
    double kin = 0.0;
    double pot = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const double w = (next[p] - cur[p]) / dt;
      kin += w * w;
      pot -= next[p] * lcur[p];
    }
    return 0.5 * (kin + pot);
  };
  res.energy_initial = energy(u, u_prev, lu);
  const double e_scale = std::abs(res.energy_initial) > 0.0 ? std::abs(res.energy_initial) : 1.0;

  Field u_next(n);
  for (long long step = 1; step <= total; ++step) {
    lu = op.apply(u);
    for (std::size_t p = 0; p < n; ++p) u_next[p] = 2.0 * u[p] - u_prev[p] + dt * dt * lu[p];
    res.energy_drift = std::max(res.energy_drift, std::abs(energy(u_next, u, lu) - res.energy_initial) / e_scale);
    if (next_out < order.size() && out_steps[order[next_out]] == step) {
      Field v(n);
      for (std::size_t p = 0; p < n; ++p) v[p] = (u_next[p] - u_prev[p]) / (2.0 * dt);
      emit(step, u, std::move(v));
    }
    if (step % 256 == 0 || step == total) check_blowup(u, step);
    if (progress && step % 4096 == 0) progress(step, total);
    std::swap(u_prev, u);
    std::swap(u, u_next);
  }
  return res;
}

Dispersion dispersion_relation(const EffectiveModel& model, std::span<const double> k) {
  if (static_cast<int>(k.size()) != model.dim) throw ShapeMismatch("wavevector and model dimensions differ");
  Dispersion out;
  out.A = contract_kpow(model.a0, k);
  double e2 = 1.0;
  for (const auto& st : model.stages) {
    e2 *= model.epsilon * model.epsilon;
    out.A += e2 * contract_kpow(st.a2r, k);
    out.H += e2 * contract_kpow(st.b2r, k);
  }
  double k2 = 0.0;
  for (double x : k) k2 += x * x;
  const double scale = 1e-12 * (1.0 + std::abs(out.A) + k2);
  if (out.A < -scale || out.H < 1.0 - 1e-12)
    throw NumericalError("effective model violates positivity of its dispersion relation");
  out.A = std::max(out.A, 0.0);
  out.omega = std::sqrt(out.A / out.H);
  return out;
}

namespace {

void check_model_grid(const MacroGrid& grid, const EffectiveModel& model) {
  if (model.dim != grid.dim()) throw ShapeMismatch("effective model and macro grid dimensions differ");
}

}  // namespace

WaveState effective_propagate(const MacroGrid& grid, const EffectiveModel& model, std::span<const double> u,
                              std::span<const double> v, double t) {
  check_model_grid(grid, model);
  const SpectralGrid sg(grid.shape());
  if (u.size() != sg.real_size() || v.size() != sg.real_size()) throw ShapeMismatch("field does not match the macro grid");
  const Spectrum uh = sg.forward(u);
  const Spectrum vh = sg.forward(v);
  Spectrum ut(uh.size());
  Spectrum vt(uh.size());
  std::vector<double> k(static_cast<std::size_t>(grid.dim()));
  for (std::size_t s = 0; s < uh.size(); ++s) {
    sg.wavevector(s, k);
    const double w = dispersion_relation(model, k).omega;
    if (w == 0.0) {
      ut[s] = uh[s] + t * vh[s];
      vt[s] = vh[s];
    } else {
      const double c = std::cos(w * t);
      const double sn = std::sin(w * t);
      ut[s] = c * uh[s] + (sn / w) * vh[s];
      vt[s] = -w * sn * uh[s] + c * vh[s];
    }
  }
  WaveState out;
  out.t = t;
  out.u = sg.inverse(ut);
  out.v = sg.inverse(vt);
  return out;
}

std::vector<WaveState> effective_solve(const MacroGrid& grid, const EffectiveModel& model, std::span<const double> g0,
                                       std::span<const double> g1, std::span<const double> times) {
  std::vector<WaveState> out;
  out.reserve(times.size());
  for (double t : times) {
    if (t == 0.0) {
      out.push_back(WaveState{0.0, Field(g0.begin(), g0.end()), Field(g1.begin(), g1.end())});
      continue;
    }
    out.push_back(effective_propagate(grid, model, g0, g1, t));
  }
  return out;
}

double effective_energy(const MacroGrid& grid, const EffectiveModel& model, std::span<const double> u,
                        std::span<const double> v) {
  check_model_grid(grid, model);
  const SpectralGrid sg(grid.shape());
  const Spectrum uh = sg.forward(u);
  const Spectrum vh = sg.forward(v);
  std::vector<double> k(static_cast<std::size_t>(grid.dim()));
  double e = 0.0;
  for (std::size_t s = 0; s < uh.size(); ++s) {
    sg.wavevector(s, k);
    const Dispersion disp = dispersion_relation(model, k);
    e += sg.parseval_weight(s) * (disp.H * std::norm(vh[s]) + disp.A * std::norm(uh[s]));
  }
  return e;
}

double relative_error(std::span<const double> u, std::span<const double> approx) {
  if (u.size() != approx.size()) throw ShapeMismatch("relative_error: fields differ in size");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t p = 0; p < u.size(); ++p) {
    const double diff = u[p] - approx[p];
    num += diff * diff;
    den += u[p] * u[p];
  }
  if (den == 0.0) throw ConfigError("relative_error: reference field is zero");
  return std::sqrt(num / den);
}

Field gaussian_initial(const MacroGrid& grid, double beta, double nu) {
  if (!(beta > 0.0) || !(nu > 0.0)) throw ConfigError("gaussian_initial: beta and nu must be positive");
  const GridShape shape = grid.shape();
  const int d = grid.dim();
  Field g(shape.size());
  for (std::size_t p = 0; p < g.size(); ++p) {
    std::size_t rem = p;
    double r2 = 0.0;
    for (int a = d - 1; a >= 0; --a) {
      const auto np = static_cast<std::size_t>(grid.points[a]);
      const double x = grid.coordinate(a, static_cast<int>(rem % np)) - 0.5 * (grid.lo[a] + grid.hi[a]);
      rem /= np;
      r2 += nu * nu * x * x;
    }
    g[p] = std::exp(-beta * r2);
  }
  return g;
}

void write_field(const std::filesystem::path& path, const MacroGrid& grid, std::span<const double> u, double t) {
  if (u.size() != grid.shape().size()) throw ShapeMismatch("field does not match the macro grid");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write field dump " + path.string());
  std::vector<double> bounds;
  for (int a = 0; a < grid.dim(); ++a) {
    bounds.push_back(grid.lo[a]);
    bounds.push_back(grid.hi[a]);
  }
  std::ostringstream tt;
  tt.precision(17);
  tt << t;
  out << "field d=" << grid.dim() << " bounds=" << join_numbers(bounds) << " m=" << join_numbers(grid.points)
      << " t=" << tt.str() << '\n';
  write_doubles_le(out, u);
}

FieldDump read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open field dump " + path.string());
  std::string header;
  std::getline(in, header);
  if (header.rfind("field", 0) != 0) throw ConfigError("not a field dump: " + path.string());
  FieldDump f;
  const int d = std::stoi(header_value(header, "d"));
  const auto bounds = parse_number_list(header_value(header, "bounds"));
  for (double m : parse_number_list(header_value(header, "m"))) f.points.push_back(static_cast<int>(m));
  if (static_cast<int>(bounds.size()) != 2 * d || static_cast<int>(f.points.size()) != d)
    throw ConfigError("field dump header is inconsistent: " + header);
  for (int a = 0; a < d; ++a) {
    f.lo.push_back(bounds[2 * a]);
    f.hi.push_back(bounds[2 * a + 1]);
  }
  f.t = parse_number_list(header_value(header, "t")).at(0);
  std::size_t n = 1;
  for (int m : f.points) n *= static_cast<std::size_t>(m);
  f.values.resize(n);
  read_doubles_le(in, f.values);
  return f;
}

}  // namespace longwave
