#include "longwave/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "longwave/errors.hpp"

namespace longwave {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not a number: " + v);
  }
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Run manifest rewritten after every stage, readable by ConfigFile.
class Manifest {
 public:
  explicit Manifest(std::filesystem::path path) : path_(std::move(path)) {}

  void set(const std::string& section, const std::string& key, const std::string& value) {
    auto& entries = sections_[section];
    for (auto& [k, v] : entries)
      if (k == key) {
        v = value;
        return;
      }
    entries.emplace_back(key, value);
    if (std::find(order_.begin(), order_.end(), section) == order_.end()) order_.push_back(section);
  }
  void set(const std::string& section, const std::string& key, double value) { set(section, key, format_double(value)); }

  void flush() const {
    std::ofstream out(path_);
    if (!out) throw ConfigError("cannot write manifest " + path_.string());
    for (const auto& s : order_) {
      out << '[' << s << "]\n";
      for (const auto& [k, v] : sections_.at(s)) out << k << " = " << v << '\n';
    }
  }

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::vector<std::string> order_;
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections_;
};

void log_line(std::ostream* log, const std::string& s) {
  if (log) *log << s << std::endl;
}

std::vector<int> cell_points(const ExperimentConfig& cfg) {
  if (!cfg.cell_grid.empty()) return cfg.cell_grid;
  if (cfg.medium.rfind("builtin:", 0) != 0) return read_coefficient_file(cfg.medium).shape().points;
  return std::vector<int>(static_cast<std::size_t>(cfg.dim), cfg.dim == 1 ? 1024 : 256);
}

void write_models(const std::filesystem::path& dir, const EffectiveModel& model, Manifest& manifest) {
  {
    std::ofstream out(dir / "model.txt");
    if (!out) throw ConfigError("cannot write " + (dir / "model.txt").string());
    write_model(out, model);
  }
  manifest.set("outputs", "model", "model.txt");
  for (int s = 0; s <= model.order(); ++s) {
    const std::string name = "model_s" + std::to_string(s) + ".txt";
    std::ofstream out(dir / name);
    write_model(out, model.truncated(s));
  }
}

template <class Fn>
auto run_stage(Manifest& manifest, const std::string& stage, Fn&& fn) {
  manifest.set("run", "stage", stage);
  manifest.flush();
  try {
    return fn();
  } catch (const std::exception& e) {
    manifest.set("run", "status", "incomplete");
    manifest.set("run", "failed_stage", stage);
    manifest.set("run", "error", e.what());
    manifest.flush();
    throw;
  }
}

}  // namespace

ConfigFile ConfigFile::parse(std::istream& in) {
  ConfigFile cfg;
  std::string section;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    cfg.values_[section.empty() ? key : section + "." + key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse(in);
}

std::string ConfigFile::get(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
  return has(key) ? parse_double(key, get(key, "")) : fallback;
}

int ConfigFile::get_int(const std::string& key, int fallback) const {
  if (!has(key)) return fallback;
  const double v = parse_double(key, get(key, ""));
  if (v != std::floor(v)) throw ConfigError("config key '" + key + "' must be an integer");
  return static_cast<int>(v);
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get(key, "");
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + key + "' must be true or false");
}

std::vector<double> ConfigFile::get_list(const std::string& key, const std::vector<double>& fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get(key, "");
  if (v.empty()) return {};
  return parse_number_list(v);
}

void ExperimentConfig::validate() const {
  if (kind != "longtime" && kind != "highfreq") throw ConfigError("experiment.kind must be longtime or highfreq");
  if (alpha < 0) throw ConfigError("experiment.alpha must be >= 0");
  if (dim < 1 || dim > 3) throw ConfigError("dimension must be 1, 2 or 3");
  if (static_cast<int>(lo.size()) != dim || static_cast<int>(hi.size()) != dim)
    throw ConfigError("domain.lo and domain.hi need one value per axis");
  if (!cell_grid.empty() && static_cast<int>(cell_grid.size()) != dim)
    throw ConfigError("medium.cell_grid needs one value per axis");
  if (!(epsilon > 0.0)) throw ConfigError("domain.epsilon must be positive");
  if (points_per_cell < 2 || points_per_cell % 2 != 0) throw ConfigError("domain.points_per_cell must be even and >= 2");
  if (!(beta > 0.0) || !(nu > 0.0)) throw ConfigError("initial.beta and initial.nu must be positive");
  if (!(t_end > 0.0)) throw ConfigError("time.t_end must be positive");
  if (dt < 0.0) throw ConfigError("time.dt must be >= 0");
  if (output_count < 1) throw ConfigError("time.output_count must be >= 1");
  if (!(t_min > 0.0) || t_min > t_end) throw ConfigError("time.t_min must lie in (0, t_end]");
  if (delta_margin < 0.0) throw ConfigError("model.delta_margin must be >= 0");
  if (kind == "highfreq" && dim != 2) throw ConfigError("highfreq experiments are two-dimensional");
  const std::string prefix = "builtin:";
  if (medium.rfind(prefix, 0) != 0 && !std::filesystem::exists(medium))
    throw ConfigError("medium file does not exist: " + medium);
}

ExperimentConfig experiment_config_from(const ConfigFile& file) {
  static const char* known[] = {"experiment.kind",   "experiment.alpha",     "medium.name",   "medium.cell_grid",
                                "domain.lo",         "domain.hi",            "domain.epsilon", "domain.points_per_cell",
                                "initial.beta",      "initial.nu",           "time.t_end",    "time.dt",
                                "time.output_count", "time.t_min",           "time.extra",    "model.delta_margin",
                                "output.dir",        "output.write_fields"};
  for (const auto& [k, v] : file.values()) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* s) { return k == s; }) == std::end(known))
      throw ConfigError("unknown config key: " + k);
  }
  ExperimentConfig c;
  c.kind = file.get("experiment.kind", c.kind);
  c.alpha = file.get_int("experiment.alpha", c.alpha);
  c.medium = file.get("medium.name", c.medium);
  c.lo = file.get_list("domain.lo", c.lo);
  c.hi = file.get_list("domain.hi", c.hi);
  c.dim = static_cast<int>(c.lo.size());
  for (double n : file.get_list("medium.cell_grid", {})) c.cell_grid.push_back(static_cast<int>(n));
  if (c.cell_grid.size() == 1 && c.dim > 1) c.cell_grid.assign(static_cast<std::size_t>(c.dim), c.cell_grid[0]);
  c.epsilon = file.get_double("domain.epsilon", c.epsilon);
  c.points_per_cell = file.get_int("domain.points_per_cell", c.points_per_cell);
  c.beta = file.get_double("initial.beta", c.beta);
  c.nu = file.get_double("initial.nu", c.nu);
  c.t_end = file.get_double("time.t_end", c.t_end);
  c.dt = file.get_double("time.dt", c.dt);
  c.output_count = file.get_int("time.output_count", c.output_count);
  c.t_min = file.get_double("time.t_min", std::min(c.t_min, c.t_end));
  c.extra_times = file.get_list("time.extra", {});
  c.delta_margin = file.get_double("model.delta_margin", c.delta_margin);
  c.output_dir = file.get("output.dir", c.output_dir.string());
  c.write_fields = file.get_bool("output.write_fields", c.write_fields);
  c.validate();
  return c;
}

ExperimentConfig read_experiment_config(const std::filesystem::path& path) {
  ExperimentConfig c = experiment_config_from(ConfigFile::load(path));
  if (c.medium.rfind("builtin:", 0) != 0 && std::filesystem::path(c.medium).is_relative()) {
    const auto resolved = path.parent_path() / c.medium;
    if (std::filesystem::exists(resolved)) c.medium = resolved.string();
  }
  return c;
}

void apply_paper_scale(ExperimentConfig& cfg) {
  // h = ε/16 on the macro grid; Δt = h/16 (1D) or h/100 (2D)
  cfg.points_per_cell = 16;
  const double h = cfg.epsilon / 16.0;
  if (cfg.kind == "longtime") {
    cfg.lo.assign(static_cast<std::size_t>(cfg.dim), -84.0);
    cfg.hi.assign(static_cast<std::size_t>(cfg.dim), 84.0);
    cfg.t_end = 1e4;
    cfg.dt = h / 16.0;
  } else {
    cfg.t_end = 20.0;
    cfg.dt = h / 100.0;
  }
  cfg.validate();
}

MacroGrid make_macro_grid(const ExperimentConfig& cfg, const Medium& medium) {
  MacroGrid g;
  g.lo = cfg.lo;
  g.hi = cfg.hi;
  g.epsilon = cfg.epsilon;
  g.cell_lengths = medium.cell_lengths();
  if (medium.dim() != cfg.dim) throw ConfigError("medium dimension does not match the domain");
  for (int a = 0; a < cfg.dim; ++a) {
    const double cells = (cfg.hi[a] - cfg.lo[a]) / (cfg.epsilon * g.cell_lengths[a]);
    const double n = std::round(cells);
    if (n < 1.0 || std::abs(cells - n) > 1e-9 * std::max(1.0, n))
      throw IncompatibleDomain(a + 1, "incompatible domain: axis " + std::to_string(a + 1) + " holds " +
                                          format_double(cells) + " periods, not an integer");
    g.points.push_back(static_cast<int>(n) * cfg.points_per_cell);
  }
  validate_domain(g);
  return g;
}

std::vector<double> experiment_times(const ExperimentConfig& cfg) {
  std::vector<double> t;
  const int n = cfg.output_count;
  if (n == 1) {
    t.push_back(cfg.t_end);
  } else {
    const double a = std::log(cfg.t_min);
    const double b = std::log(cfg.t_end);
    for (int i = 0; i < n; ++i) t.push_back(i == n - 1 ? cfg.t_end : std::exp(a + (b - a) * i / (n - 1)));
  }
  for (int p = 1; p <= 3; ++p) {
    const double tp = std::pow(cfg.epsilon, -p);
    if (tp <= cfg.t_end * (1.0 + 1e-12)) t.push_back(std::min(tp, cfg.t_end));
  }
  for (double x : cfg.extra_times)
    if (x > 0.0 && x <= cfg.t_end) t.push_back(x);
  std::sort(t.begin(), t.end());
  std::vector<double> out;
  for (double x : t)
    if (out.empty() || std::abs(x - out.back()) > 1e-12 * x) out.push_back(x);
  return out;
}

void write_curves_csv(const std::filesystem::path& path, const std::vector<double>& times,
                      const std::vector<std::vector<double>>& errors) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "t";
  for (std::size_t s = 0; s < errors.size(); ++s) out << ",err_s" << s;
  out << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < times.size(); ++i) {
    out << times[i];
    for (const auto& e : errors) out << ',' << e.at(i);
    out << '\n';
  }
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* log) {
  cfg.validate();
  if (cfg.kind != "longtime") throw ConfigError("run_experiment handles longtime experiments");
  const auto start = Clock::now();
  std::filesystem::create_directories(cfg.output_dir);
  Manifest manifest(cfg.output_dir / "manifest.txt");
  manifest.set("run", "kind", cfg.kind);
  manifest.set("run", "status", "incomplete");
  manifest.set("run", "medium", cfg.medium);
  manifest.set("run", "alpha", std::to_string(cfg.alpha));
  manifest.set("run", "epsilon", cfg.epsilon);

  ExperimentResult res;
  res.manifest = manifest.path();
  const Medium medium = make_medium(cfg.medium, cfg.dim);

  PipelineOptions popt;
  popt.delta_margin = cfg.delta_margin;
  const auto t0 = Clock::now();
  res.model = run_stage(manifest, "tensors", [&] {
    EffectivePipeline pipeline(CoefficientField(medium, cell_points(cfg)), cfg.alpha, cfg.epsilon, popt);
    res.cell_problems = pipeline.problems_solved();
    return pipeline.model();
  });
  write_models(cfg.output_dir, res.model, manifest);
  manifest.set("model", "dim", std::to_string(res.model.dim));
  manifest.set("model", "stages", std::to_string(res.model.order()));
  manifest.set("model", "cell_problems", std::to_string(res.cell_problems));
  manifest.set("timing", "tensors_seconds", seconds_since(t0));
  log_line(log, "effective tensors: " + std::to_string(res.model.order()) + " stages, " +
                    std::to_string(res.cell_problems) + " cell problems");

  const MacroGrid grid = make_macro_grid(cfg, medium);
  const Field g0 = gaussian_initial(grid, cfg.beta, cfg.nu);
  const Field g1(g0.size(), 0.0);
  const std::vector<double> requested = experiment_times(cfg);

  const auto t1 = Clock::now();
  const FineResult fine = run_stage(manifest, "fine", [&] {
    const FineOperator op(grid, medium);
    SimConfig sim;
    sim.dt = cfg.dt;
    sim.t_end = cfg.t_end;
    sim.output_times = requested;
    log_line(log, "fine solve: " + std::to_string(grid.shape().size()) + " points");
    return fine_solve(op, g0, g1, sim, [&](long long step, long long total) {
      if (log && step % (1 << 16) == 0) *log << "  step " << step << " / " << total << std::endl;
    });
  });
  res.dt = fine.dt;
  res.steps = fine.steps;
  res.energy_drift = fine.energy_drift;
  manifest.set("fine", "dt", fine.dt);
  manifest.set("fine", "steps", std::to_string(fine.steps));
  manifest.set("fine", "points", std::to_string(grid.shape().size()));
  manifest.set("fine", "energy_drift", fine.energy_drift);
  manifest.set("timing", "fine_seconds", seconds_since(t1));

  for (const auto& st : fine.states) res.times.push_back(st.t);
  const auto t2 = Clock::now();
  res.errors = run_stage(manifest, "effective", [&] {
    std::vector<std::vector<double>> errors;
    for (int s = 0; s <= res.model.order(); ++s) {
      const EffectiveModel m = res.model.truncated(s);
      const auto eff = effective_solve(grid, m, g0, g1, res.times);
      std::vector<double> e;
      for (std::size_t i = 0; i < eff.size(); ++i) e.push_back(relative_error(fine.states[i].u, eff[i].u));
      if (cfg.write_fields) {
        write_field(cfg.output_dir / ("effective_s" + std::to_string(s) + "_final.field"), grid, eff.back().u,
                    eff.back().t);
      }
      errors.push_back(std::move(e));
    }
    return errors;
  });
  manifest.set("timing", "effective_seconds", seconds_since(t2));
  if (cfg.write_fields) write_field(cfg.output_dir / "fine_final.field", grid, fine.states.back().u, fine.states.back().t);

  run_stage(manifest, "curves", [&] {
    write_curves_csv(cfg.output_dir / "curves.csv", res.times, res.errors);
    return 0;
  });
  manifest.set("outputs", "curves", "curves.csv");
  for (int s = 0; s <= res.model.order(); ++s)
    manifest.set("errors", "final_s" + std::to_string(s), res.errors[static_cast<std::size_t>(s)].back());
  manifest.set("timing", "total_seconds", seconds_since(start));
  manifest.set("run", "stage", "done");
  manifest.set("run", "status", "complete");
  manifest.flush();
  return res;
}

HighFreqResult run_highfreq_2d(const ExperimentConfig& cfg, std::ostream* log) {
  cfg.validate();
  if (cfg.kind != "highfreq") throw ConfigError("run_highfreq_2d handles highfreq experiments");
  const auto start = Clock::now();
  std::filesystem::create_directories(cfg.output_dir);
  Manifest manifest(cfg.output_dir / "manifest.txt");
  manifest.set("run", "kind", cfg.kind);
  manifest.set("run", "status", "incomplete");
  manifest.set("run", "medium", cfg.medium);
  manifest.set("run", "alpha", std::to_string(cfg.alpha));
  manifest.set("run", "epsilon", cfg.epsilon);
  manifest.set("run", "nu", cfg.nu);

  HighFreqResult res;
  res.manifest = manifest.path();
  const Medium medium = make_medium(cfg.medium, cfg.dim);
  PipelineOptions popt;
  popt.delta_margin = cfg.delta_margin;
  std::size_t problems = 0;
  const auto t0 = Clock::now();
  res.model = run_stage(manifest, "tensors", [&] {
    EffectivePipeline pipeline(CoefficientField(medium, cell_points(cfg)), cfg.alpha, cfg.epsilon, popt);
    problems = pipeline.problems_solved();
    return pipeline.model();
  });
  write_models(cfg.output_dir, res.model, manifest);
  manifest.set("model", "dim", std::to_string(res.model.dim));
  manifest.set("model", "stages", std::to_string(res.model.order()));
  manifest.set("model", "cell_problems", std::to_string(problems));
  manifest.set("timing", "tensors_seconds", seconds_since(t0));

  const MacroGrid grid = make_macro_grid(cfg, medium);
  const Field g0 = gaussian_initial(grid, cfg.beta, cfg.nu);
  const Field g1(g0.size(), 0.0);
  const auto t1 = Clock::now();
  const FineResult fine = run_stage(manifest, "fine", [&] {
    const FineOperator op(grid, medium);
    SimConfig sim;
    sim.dt = cfg.dt;
    sim.t_end = cfg.t_end;
    sim.output_times = {cfg.t_end};
    log_line(log, "fine solve: " + std::to_string(grid.shape().size()) + " points");
    return fine_solve(op, g0, g1, sim, [&](long long step, long long total) {
      if (log && step % (1 << 14) == 0) *log << "  step " << step << " / " << total << std::endl;
    });
  });
  res.t = fine.states.back().t;
  res.energy_drift = fine.energy_drift;
  manifest.set("fine", "dt", fine.dt);
  manifest.set("fine", "steps", std::to_string(fine.steps));
  manifest.set("fine", "energy_drift", fine.energy_drift);
  manifest.set("timing", "fine_seconds", seconds_since(t1));
  const Field& uf = fine.states.back().u;
  write_field(cfg.output_dir / "fine.field", grid, uf, res.t);

  // cut along the grid column closest to x₁ = 0
  const int n1 = grid.points[0];
  const int n2 = grid.points[1];
  const int i1 = std::clamp(static_cast<int>(std::lround(-grid.lo[0] / grid.spacing(0))), 0, n1 - 1);
  res.cut_x1 = grid.coordinate(0, i1);
  std::vector<Field> cuts;
  auto cut_of = [&](const Field& u) {
    Field c(static_cast<std::size_t>(n2));
    for (int j = 0; j < n2; ++j) c[j] = u[static_cast<std::size_t>(i1) * n2 + j];
    return c;
  };
  cuts.push_back(cut_of(uf));

  run_stage(manifest, "effective", [&] {
    for (int s = 0; s <= res.model.order(); ++s) {
      const EffectiveModel m = res.model.truncated(s);
      const WaveState eff = effective_propagate(grid, m, g0, g1, res.t);
      write_field(cfg.output_dir / ("effective_s" + std::to_string(s) + ".field"), grid, eff.u, res.t);
      res.field_errors.push_back(relative_error(uf, eff.u));
      Field c = cut_of(eff.u);
      double rms = 0.0;
      for (int j = 0; j < n2; ++j) rms += (c[j] - cuts[0][j]) * (c[j] - cuts[0][j]);
      res.cut_rms.push_back(std::sqrt(rms / n2));
      cuts.push_back(std::move(c));
    }
    return 0;
  });

  {
    std::ofstream out(cfg.output_dir / "cut.csv");
    out << "x2,u_fine";
    for (int s = 0; s <= res.model.order(); ++s) out << ",u_s" << s;
    out << '\n' << std::setprecision(17);
    for (int j = 0; j < n2; ++j) {
      out << grid.coordinate(1, j);
      for (const auto& c : cuts) out << ',' << c[j];
      out << '\n';
    }
  }
  manifest.set("outputs", "cut", "cut.csv");
  manifest.set("cut", "x1", res.cut_x1);
  for (int s = 0; s <= res.model.order(); ++s) {
    manifest.set("errors", "cut_rms_s" + std::to_string(s), res.cut_rms[static_cast<std::size_t>(s)]);
    manifest.set("errors", "final_s" + std::to_string(s), res.field_errors[static_cast<std::size_t>(s)]);
  }
  manifest.set("timing", "total_seconds", seconds_since(start));
  manifest.set("run", "stage", "done");
  manifest.set("run", "status", "complete");
  manifest.flush();
  return res;
}

std::string report(const std::filesystem::path& manifest_or_dir) {
  const std::filesystem::path manifest_path =
      std::filesystem::is_directory(manifest_or_dir) ? manifest_or_dir / "manifest.txt" : manifest_or_dir;
  const std::filesystem::path dir = manifest_path.parent_path();
  if (!std::filesystem::exists(manifest_path)) return "incomplete: no manifest at " + manifest_path.string() + "\n";
  const ConfigFile m = ConfigFile::load(manifest_path);
  std::ostringstream out;
  out << std::setprecision(6);
  const std::string status = m.get("run.status", "incomplete");
  out << "run: " << m.get("run.kind", "?") << ", medium " << m.get("run.medium", "?") << ", alpha "
      << m.get("run.alpha", "?") << ", epsilon " << m.get("run.epsilon", "?") << '\n';
  out << "status: " << status;
  if (status != "complete") out << " (stage " << m.get("run.failed_stage", m.get("run.stage", "?")) << ")";
  out << '\n';
  if (m.has("run.error")) out << "error: " << m.get("run.error", "") << '\n';

  const std::filesystem::path model_path = dir / m.get("outputs.model", "model.txt");
  if (std::filesystem::exists(model_path)) {
    std::ifstream in(model_path);
    const EffectiveModel model = read_model(in);
    out << "a0:";
    for (double v : model.a0.values()) out << ' ' << v;
    out << '\n';
    if (model.order() == 0) {
      out << "model: homogenized only\n";
    } else {
      for (const auto& st : model.stages)
        out << "stage " << st.r << ": deltastar " << st.deltastar << ", delta " << st.delta << ", |a2r| "
            << st.a2r.max_abs() << ", |b2r| " << st.b2r.max_abs() << '\n';
      const SavingsCount c = savings_count(model.dim, model.order());
      out << "cell problems: " << c.solved << " solved / " << c.naive << " naive / " << c.spared << " spared\n";
    }
  } else {
    out << "incomplete: missing model file (stage tensors)\n";
  }

  if (m.get("run.kind", "") == "highfreq") {
    const std::filesystem::path cut = dir / m.get("outputs.cut", "cut.csv");
    if (!std::filesystem::exists(cut)) out << "incomplete: missing cut file (stage effective)\n";
    for (const auto& [k, v] : m.values())
      if (k.rfind("errors.", 0) == 0) out << k.substr(7) << " = " << v << '\n';
  } else {
    const std::filesystem::path curves = dir / m.get("outputs.curves", "curves.csv");
    if (!std::filesystem::exists(curves)) {
      out << "incomplete: missing curve file (stage " << m.get("run.failed_stage", "curves") << ")\n";
    } else {
      std::ifstream in(curves);
      std::string line;
      out << "error table:\n";
      while (std::getline(in, line)) {
        std::replace(line.begin(), line.end(), ',', '\t');
        out << "  " << line << '\n';
      }
    }
  }
  if (m.has("fine.energy_drift")) out << "fine energy drift: " << m.get("fine.energy_drift", "") << '\n';
  if (m.has("timing.total_seconds")) out << "wall clock: " << m.get("timing.total_seconds", "") << " s\n";
  return out.str();
}

}  // namespace longwave
