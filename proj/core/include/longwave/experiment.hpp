#pragma once

// Experiment configuration, orchestration and persistence.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "longwave/effective.hpp"
#include "longwave/wave.hpp"

namespace longwave {

/// Flat `[section]` + `key = value` text; keys are addressed as "section.key".
class ConfigFile {
 public:
  static ConfigFile parse(std::istream& in);
  static ConfigFile load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

struct ExperimentConfig {
  std::string kind = "longtime";  // longtime | highfreq
  int alpha = 4;
  std::string medium = "builtin:cos1d";
  int dim = 1;
  std::vector<int> cell_grid;       // per axis; default 1024 (1D) or 256
  std::vector<double> lo{-21.0};
  std::vector<double> hi{21.0};
  double epsilon = 0.1;
  int points_per_cell = 8;          // macro points per ε-period on each axis
  double beta = 4.0;
  double nu = 1.0;
  double t_end = 1000.0;
  double dt = 0.0;                  // 0 selects the default step
  int output_count = 40;            // log-spaced outputs in [t_min, t_end]
  double t_min = 1.0;
  std::vector<double> extra_times;
  double delta_margin = 0.0;
  std::filesystem::path output_dir = "longwave-out";
  bool write_fields = false;

  /// Throws ConfigError on inconsistent values.
  void validate() const;
};

/// Reads an ExperimentConfig; unknown keys are rejected.
ExperimentConfig read_experiment_config(const std::filesystem::path& path);
ExperimentConfig experiment_config_from(const ConfigFile& file);

/// Switches to the full-size parameters of the reference runs.
void apply_paper_scale(ExperimentConfig& cfg);

MacroGrid make_macro_grid(const ExperimentConfig& cfg, const Medium& medium);

/// Log-spaced times in [t_min, t_end] plus ε⁻¹, ε⁻², ε⁻³ (when <= t_end) and extras.
std::vector<double> experiment_times(const ExperimentConfig& cfg);

/// `t,err_s0,...,err_sS` with 17 significant digits.
void write_curves_csv(const std::filesystem::path& path, const std::vector<double>& times,
                      const std::vector<std::vector<double>>& errors);

struct ExperimentResult {
  EffectiveModel model;
  std::vector<double> times;
  std::vector<std::vector<double>> errors;  // [s][time]
  double energy_drift = 0.0;
  double dt = 0.0;
  long long steps = 0;
  std::size_t cell_problems = 0;
  std::filesystem::path manifest;
};

/// Long-time comparison: one fine run, effective runs for s = 0..⌊α/2⌋.
/// Writes model files, curves.csv and manifest.txt under cfg.output_dir.
ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

struct HighFreqResult {
  EffectiveModel model;
  double t = 0.0;
  double cut_x1 = 0.0;
  std::vector<double> cut_rms;         // per order s, against the fine cut
  std::vector<double> field_errors;    // per order s, relative L² on Ω
  double energy_drift = 0.0;
  std::filesystem::path manifest;
};

/// 2D high-frequency run: fields at t_end and the cut along x₁ = 0.
HighFreqResult run_highfreq_2d(const ExperimentConfig& cfg, std::ostream* log = nullptr);

/// Human-readable summary of a run directory or manifest file.
std::string report(const std::filesystem::path& manifest_or_dir);

}  // namespace longwave
