// longwave: effective dispersive wave equations for periodic media.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "longwave/bloch.hpp"
#include "longwave/cell_solver.hpp"
#include "longwave/effective.hpp"
#include "longwave/errors.hpp"
#include "longwave/experiment.hpp"
#include "longwave/medium.hpp"
#include "longwave/wave.hpp"

namespace lw = longwave;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::vector<int> grid_points(const std::vector<int>& given, int dim) {
  if (given.size() == 1) return std::vector<int>(static_cast<std::size_t>(dim), given[0]);
  if (static_cast<int>(given.size()) != dim) throw lw::ConfigError("--grid needs 1 or d values");
  return given;
}

int medium_dim(const std::string& spec, int dim_hint) {
  if (spec.rfind("builtin:constant:", 0) == 0) return dim_hint;
  return lw::make_medium(spec, dim_hint).dim();
}

struct TensorsArgs {
  std::string medium = "builtin:cos1d";
  int alpha = 2;
  double epsilon = 0.1;
  std::vector<int> grid;
  int dim = 1;
  std::string out;
  bool naive_check = false;
  double delta_margin = 0.0;
  std::string corrector_dir;
};

int run_tensors(const TensorsArgs& a) {
  const int d = medium_dim(a.medium, a.dim);
  const lw::Medium medium = lw::make_medium(a.medium, d);
  const bool from_file = a.medium.rfind("builtin:", 0) != 0;
  std::vector<int> pts;
  if (a.grid.empty())
    pts = from_file ? lw::read_coefficient_file(a.medium).shape().points : std::vector<int>(d, d == 1 ? 1024 : 256);
  else
    pts = grid_points(a.grid, d);
  lw::PipelineOptions opt;
  opt.delta_margin = a.delta_margin;
  lw::EffectivePipeline pipeline(lw::CoefficientField(medium, pts), a.alpha, a.epsilon, opt);
  const lw::EffectiveModel& model = pipeline.model();

  std::cout << std::setprecision(12);
  std::cout << "medium " << medium.name() << ", d = " << d << ", alpha = " << a.alpha << ", stages = " << model.order()
            << '\n';
  std::cout << "a0:";
  for (double v : model.a0.values()) std::cout << ' ' << v;
  std::cout << '\n';
  for (const auto& st : model.stages)
    std::cout << "stage " << st.r << ": deltastar = " << st.deltastar << ", delta = " << st.delta << '\n';
  std::cout << "cell problems solved: " << pipeline.problems_solved() << '\n';
  if (model.order() > 0) {
    const auto c = lw::savings_count(d, model.order());
    std::cout << "reduced vs naive: " << c.solved << " solved / " << c.naive << " naive / " << c.spared << " spared\n";
  }
  const lw::FamilyCheck fam = lw::check_family(model);
  std::cout << "family checks: " << (fam.all() ? "pass" : "FAIL") << " (worst min eigenvalue "
            << fam.worst_min_eigenvalue << ", worst constraint residual " << fam.worst_constraint_residual << ")\n";

  if (!a.out.empty()) {
    std::ofstream out(a.out);
    if (!out) throw lw::ConfigError("cannot write " + a.out);
    lw::write_model(out, model);
  }

  bool ok = fam.all();
  if (a.naive_check && model.order() > 0) {
    const lw::NaiveCheck nc = lw::naive_check(pipeline);
    for (std::size_t i = 0; i < nc.agrees.size(); ++i) {
      std::cout << "r = " << i + 1 << ": |g_naive - g_reduced| = " << nc.max_difference[i]
                << ", odd residual = " << nc.odd_residuals[i] << (nc.agrees[i] ? "  ok" : "  MISMATCH") << '\n';
      ok = ok && nc.agrees[i];
    }
  }
  if (!a.corrector_dir.empty()) {
    std::filesystem::create_directories(a.corrector_dir);
    for (int k = 1; k <= pipeline.chain().max_order(); ++k)
      lw::write_corrector_dump(std::filesystem::path(a.corrector_dir) / ("chi" + std::to_string(k) + ".bin"),
                               pipeline.chain().order(k), pipeline.coefficient().shape());
  }
  return ok ? 0 : kExitNumerical;
}

struct FineArgs {
  std::string config;
  bool paper_scale = false;
  std::string out_dir;
};

lw::ExperimentConfig load_config(const std::string& path, bool paper_scale, const std::string& out_dir) {
  lw::ExperimentConfig cfg = lw::read_experiment_config(path);
  if (paper_scale) lw::apply_paper_scale(cfg);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  return cfg;
}

std::vector<double> requested_times(const lw::ExperimentConfig& cfg) {
  return cfg.kind == "highfreq" ? std::vector<double>{cfg.t_end} : lw::experiment_times(cfg);
}

std::string time_tag(double t) {
  std::ostringstream os;
  os << std::setprecision(10) << t;
  return os.str();
}

int run_simulate_fine(const FineArgs& a) {
  const lw::ExperimentConfig cfg = load_config(a.config, a.paper_scale, a.out_dir);
  const lw::Medium medium = lw::make_medium(cfg.medium, cfg.dim);
  const lw::MacroGrid grid = lw::make_macro_grid(cfg, medium);
  const lw::FineOperator op(grid, medium);
  const lw::Field g0 = lw::gaussian_initial(grid, cfg.beta, cfg.nu);
  const lw::Field g1(g0.size(), 0.0);
  lw::SimConfig sim;
  sim.dt = cfg.dt;
  sim.t_end = cfg.t_end;
  sim.output_times = requested_times(cfg);
  const lw::FineResult res = lw::fine_solve(op, g0, g1, sim, [](long long step, long long total) {
    if (step % (1 << 16) == 0) std::cerr << "step " << step << " / " << total << '\n';
  });
  std::filesystem::create_directories(cfg.output_dir);
  for (const auto& st : res.states)
    lw::write_field(cfg.output_dir / ("fine_t" + time_tag(st.t) + ".field"), grid, st.u, st.t);
  std::cout << "dt = " << res.dt << ", steps = " << res.steps << ", energy drift = " << res.energy_drift << '\n';
  std::cout << "wrote " << res.states.size() << " field dumps to " << cfg.output_dir.string() << '\n';
  return 0;
}

struct EffectiveArgs {
  std::string model;
  std::string config;
  bool paper_scale = false;
  std::string out_dir;
};

int run_simulate_effective(const EffectiveArgs& a) {
  const lw::ExperimentConfig cfg = load_config(a.config, a.paper_scale, a.out_dir);
  std::ifstream in(a.model);
  if (!in) throw lw::ConfigError("cannot open model file " + a.model);
  const lw::EffectiveModel model = lw::read_model(in);
  const lw::Medium medium = lw::make_medium(cfg.medium, cfg.dim);
  const lw::MacroGrid grid = lw::make_macro_grid(cfg, medium);
  const lw::Field g0 = lw::gaussian_initial(grid, cfg.beta, cfg.nu);
  const lw::Field g1(g0.size(), 0.0);
  const std::vector<double> times = requested_times(cfg);
  const auto states = lw::effective_solve(grid, model, g0, g1, times);
  std::filesystem::create_directories(cfg.output_dir);
  const std::string tag = "effective_s" + std::to_string(model.order());
  for (const auto& st : states)
    lw::write_field(cfg.output_dir / (tag + "_t" + time_tag(st.t) + ".field"), grid, st.u, st.t);
  std::cout << "wrote " << states.size() << " field dumps to " << cfg.output_dir.string() << '\n';
  return 0;
}

struct CompareArgs {
  std::string config;
  bool paper_scale = false;
  std::string out;
  std::string out_dir;
};

int run_compare(const CompareArgs& a) {
  lw::ExperimentConfig cfg = load_config(a.config, a.paper_scale, a.out_dir);
  if (cfg.kind == "highfreq") {
    const lw::HighFreqResult r = lw::run_highfreq_2d(cfg, &std::cerr);
    std::cout << std::setprecision(6) << "t = " << r.t << ", cut at x1 = " << r.cut_x1 << '\n';
    for (std::size_t s = 0; s < r.cut_rms.size(); ++s)
      std::cout << "s = " << s << ": cut rms " << r.cut_rms[s] << ", field error " << r.field_errors[s] << '\n';
    return 0;
  }
  const lw::ExperimentResult r = lw::run_experiment(cfg, &std::cerr);
  if (!a.out.empty()) lw::write_curves_csv(a.out, r.times, r.errors);
  std::cout << std::setprecision(6) << "final errors at t = " << r.times.back() << ":";
  for (std::size_t s = 0; s < r.errors.size(); ++s) std::cout << " s" << s << " = " << r.errors[s].back();
  std::cout << "\nenergy drift " << r.energy_drift << ", manifest " << r.manifest.string() << '\n';
  return 0;
}

struct BlochArgs {
  std::string medium = "builtin:cos1d";
  int grid = 1024;
  int modes = 32;
  std::vector<double> k;
  double k_min = 1e-2;
  double k_max = 1e-1;
  int count = 9;
  std::string model;
  std::string out;
};

int run_bloch(const BlochArgs& a) {
  const lw::Medium medium = lw::make_medium(a.medium, 1);
  if (medium.dim() != 1) throw lw::ConfigError("bloch needs a 1D medium");
  const lw::CoefficientField field(medium, {a.grid});
  std::vector<double> ks = a.k;
  if (ks.empty()) {
    if (!(a.k_min > 0.0) || !(a.k_max > a.k_min) || a.count < 2) throw lw::ConfigError("need 0 < k-min < k-max, count >= 2");
    for (int i = 0; i < a.count; ++i)
      ks.push_back(std::exp(std::log(a.k_min) + (std::log(a.k_max) - std::log(a.k_min)) * i / (a.count - 1)));
  }
  std::optional<lw::EffectiveModel> model;
  if (!a.model.empty()) {
    std::ifstream in(a.model);
    if (!in) throw lw::ConfigError("cannot open model file " + a.model);
    model = lw::read_model(in);
    // compare at the cell scale
    model->epsilon = 1.0;
  }
  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw lw::ConfigError("cannot write " + a.out);
  }
  std::ostream& out = a.out.empty() ? std::cout : file;
  out << std::setprecision(17) << "k,omega2_bloch" << (model ? ",omega2_model,difference" : "") << '\n';
  std::vector<double> diffs;
  for (double k : ks) {
    const double wb = lw::bloch_dispersion_1d(field, k, a.modes);
    out << k << ',' << wb;
    if (model) {
      const double kk[1] = {k};
      const lw::Dispersion disp = lw::dispersion_relation(*model, kk);
      const double mismatch = lw::dispersion_mismatch_1d(*model, field, k, a.modes);
      out << ',' << disp.A / disp.H << ',' << mismatch;
      diffs.push_back(mismatch);
    }
    out << '\n';
  }
  if (model && ks.size() >= 2) std::cerr << "log-log slope of the difference: " << lw::loglog_slope(ks, diffs) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Effective dispersive wave equations for periodic media"};
  app.require_subcommand(1);

  TensorsArgs ta;
  auto* tensors = app.add_subcommand("tensors", "Compute the effective tensors of a medium");
  tensors->add_option("--medium", ta.medium, "builtin:<name> or coefficient file")->capture_default_str();
  tensors->add_option("--alpha", ta.alpha, "Target timescale exponent")->capture_default_str();
  tensors->add_option("--epsilon", ta.epsilon, "Period of the medium")->capture_default_str();
  tensors->add_option("--grid", ta.grid, "Cell grid points (one value or one per axis)")->delimiter(',');
  tensors->add_option("--dim", ta.dim, "Dimension for builtin:constant media")->capture_default_str();
  tensors->add_option("--out", ta.out, "Model output file");
  tensors->add_flag("--naive-check", ta.naive_check, "Cross-check g against the naive formula");
  tensors->add_option("--delta-margin", ta.delta_margin, "Extra shift added to deltastar")->capture_default_str();
  tensors->add_option("--corrector-dir", ta.corrector_dir, "Write corrector dumps to this directory");

  FineArgs fa;
  auto* fine = app.add_subcommand("simulate-fine", "Simulate the wave in the periodic medium");
  fine->add_option("--config", fa.config, "Experiment config")->required();
  fine->add_flag("--paper-scale", fa.paper_scale, "Use the full-size reference parameters");
  fine->add_option("--out-dir", fa.out_dir, "Override output directory");

  EffectiveArgs ea;
  auto* eff = app.add_subcommand("simulate-effective", "Propagate the effective wave of a model");
  eff->add_option("--model", ea.model, "Model file")->required();
  eff->add_option("--config", ea.config, "Experiment config")->required();
  eff->add_flag("--paper-scale", ea.paper_scale, "Use the full-size reference parameters");
  eff->add_option("--out-dir", ea.out_dir, "Override output directory");

  CompareArgs ca;
  auto* cmp = app.add_subcommand("compare", "Run an experiment and write error curves");
  cmp->add_option("--config", ca.config, "Experiment config")->required();
  cmp->add_option("--out", ca.out, "Extra copy of the error curves CSV");
  cmp->add_option("--out-dir", ca.out_dir, "Override output directory");
  cmp->add_flag("--paper-scale", ca.paper_scale, "Use the full-size reference parameters");

  BlochArgs ba;
  auto* bloch = app.add_subcommand("bloch", "Bloch dispersion of a 1D medium");
  bloch->add_option("--medium", ba.medium, "builtin:<name> or coefficient file")->capture_default_str();
  bloch->add_option("--grid", ba.grid, "Cell grid points")->capture_default_str();
  bloch->add_option("--modes", ba.modes, "Fourier modes |m| <= modes")->capture_default_str();
  bloch->add_option("--k", ba.k, "Explicit wavenumbers")->delimiter(',');
  bloch->add_option("--k-min", ba.k_min)->capture_default_str();
  bloch->add_option("--k-max", ba.k_max)->capture_default_str();
  bloch->add_option("--count", ba.count)->capture_default_str();
  bloch->add_option("--model", ba.model, "Compare against this model");
  bloch->add_option("--out", ba.out, "CSV output (default stdout)");

  std::string manifest;
  auto* rep = app.add_subcommand("report", "Summarize a run");
  rep->add_option("manifest", manifest, "Run directory or manifest file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*tensors) return run_tensors(ta);
    if (*fine) return run_simulate_fine(fa);
    if (*eff) return run_simulate_effective(ea);
    if (*cmp) return run_compare(ca);
    if (*bloch) return run_bloch(ba);
    if (*rep) {
      std::cout << lw::report(manifest);
      return 0;
    }
  } catch (const lw::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const lw::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
