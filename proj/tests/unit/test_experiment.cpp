#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "longwave/errors.hpp"
#include "longwave/experiment.hpp"

using namespace longwave;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("longwave_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_cosine(const fs::path& dir) {
  ExperimentConfig cfg;
  cfg.medium = "builtin:cos1d";
  cfg.cell_grid = {128};
  cfg.lo = {-2.0};
  cfg.hi = {2.0};
  cfg.epsilon = 0.1;
  cfg.t_end = 3.0;
  cfg.output_count = 4;
  cfg.t_min = 0.5;
  cfg.output_dir = dir;
  return cfg;
}

ConfigFile parse(const std::string& text) {
  std::istringstream in(text);
  return ConfigFile::parse(in);
}

}  // namespace

TEST(ConfigFile, ParsesSectionsAndLists) {
  const ConfigFile f = parse("# comment\n[domain]\nlo = -1, -2\nepsilon = 0.5  # trailing\n[experiment]\nkind = highfreq\n");
  EXPECT_EQ(f.get("experiment.kind", ""), "highfreq");
  EXPECT_DOUBLE_EQ(f.get_double("domain.epsilon", 0.0), 0.5);
  EXPECT_EQ(f.get_list("domain.lo", {}), (std::vector<double>{-1.0, -2.0}));
  EXPECT_EQ(f.get_int("missing.key", 7), 7);
}

TEST(ConfigFile, RejectsMalformedLines) {
  EXPECT_THROW(parse("[domain]\nepsilon 0.5\n"), ConfigError);
  EXPECT_THROW(parse("[domain\nepsilon = 0.5\n"), ConfigError);
  EXPECT_THROW(parse("[domain]\nepsilon = abc\n").get_double("domain.epsilon", 0.0), ConfigError);
}

TEST(ExperimentConfig, UnknownKeysAreRejected) {
  EXPECT_THROW(experiment_config_from(parse("[domain]\nepsilon = 0.1\nwidth = 3\n")), ConfigError);
}

TEST(ExperimentConfig, ValuesAreRead) {
  const ExperimentConfig cfg = experiment_config_from(
      parse("[experiment]\nalpha = 2\n[domain]\nlo = -1\nhi = 1\nepsilon = 0.05\npoints_per_cell = 4\n[time]\nt_end = 50\n"));
  EXPECT_EQ(cfg.alpha, 2);
  EXPECT_EQ(cfg.lo, std::vector<double>{-1.0});
  EXPECT_DOUBLE_EQ(cfg.epsilon, 0.05);
  EXPECT_EQ(cfg.points_per_cell, 4);
  EXPECT_DOUBLE_EQ(cfg.t_end, 50.0);
}

TEST(ExperimentConfig, InvalidValuesAreRejected) {
  ExperimentConfig cfg;
  cfg.alpha = -1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  ExperimentConfig bad_eps;
  bad_eps.epsilon = 0.0;
  EXPECT_THROW(bad_eps.validate(), ConfigError);
  ExperimentConfig bad_domain;
  bad_domain.hi = {1.05};
  bad_domain.lo = {0.0};
  EXPECT_THROW(make_macro_grid(bad_domain, make_medium(bad_domain.medium)), ConfigError);
}

TEST(ExperimentConfig, MissingMediumFileIsAConfigError) {
  EXPECT_THROW(make_medium("/nonexistent/medium.cellcoef"), ConfigError);
}

TEST(ExperimentConfig, PaperScalePreset) {
  ExperimentConfig cfg;
  apply_paper_scale(cfg);
  EXPECT_EQ(cfg.lo, std::vector<double>{-84.0});
  EXPECT_EQ(cfg.hi, std::vector<double>{84.0});
  EXPECT_EQ(cfg.points_per_cell, 16);
  EXPECT_DOUBLE_EQ(cfg.t_end, 1e4);
  EXPECT_DOUBLE_EQ(cfg.dt, 0.1 / 16 / 16);
  const MacroGrid g = make_macro_grid(cfg, make_medium(cfg.medium));
  EXPECT_EQ(g.points[0], 1680 * 16);
}

TEST(ExperimentTimes, IncludeScaleTimes) {
  ExperimentConfig cfg;
  cfg.output_count = 5;
  const auto t = experiment_times(cfg);
  EXPECT_TRUE(std::is_sorted(t.begin(), t.end()));
  for (double want : {1.0, 10.0, 100.0, 1000.0})
    EXPECT_TRUE(std::any_of(t.begin(), t.end(), [&](double x) { return std::abs(x - want) < 1e-9 * want; })) << want;
}

TEST(RunExperiment, ConstantMediumErrorsAreNoise) {
  const fs::path dir = fresh_dir("constant");
  ExperimentConfig cfg;
  cfg.medium = "builtin:constant:1";
  cfg.lo = {-4.0};
  cfg.hi = {4.0};
  cfg.epsilon = 0.5;
  cfg.points_per_cell = 16;
  cfg.t_end = 2.0;
  cfg.dt = 1e-4;
  cfg.output_count = 3;
  cfg.t_min = 0.5;
  cfg.output_dir = dir;
  const ExperimentResult res = run_experiment(cfg);
  ASSERT_EQ(res.errors.size(), 3u);
  for (const auto& curve : res.errors)
    for (double e : curve) EXPECT_LT(e, 1e-6);
  EXPECT_TRUE(fs::exists(dir / "curves.csv"));
  EXPECT_TRUE(fs::exists(dir / "model_s2.txt"));
  fs::remove_all(dir);
}

TEST(RunExperiment, OutputsAreDeterministic) {
  const fs::path d1 = fresh_dir("det1"), d2 = fresh_dir("det2");
  run_experiment(small_cosine(d1));
  run_experiment(small_cosine(d2));
  const std::string a = slurp(d1 / "curves.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(d2 / "curves.csv"));
  EXPECT_EQ(slurp(d1 / "model.txt"), slurp(d2 / "model.txt"));
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST(RunExperiment, TruncatedModelsShareStages) {
  const fs::path dir = fresh_dir("trunc");
  run_experiment(small_cosine(dir));
  std::ifstream f1(dir / "model_s1.txt"), f2(dir / "model_s2.txt");
  const EffectiveModel m1 = read_model(f1), m2 = read_model(f2);
  ASSERT_EQ(m1.order(), 1);
  ASSERT_EQ(m2.order(), 2);
  EXPECT_EQ(m1.a0[0], m2.a0[0]);
  EXPECT_EQ(m1.stages[0].a2r[0], m2.stages[0].a2r[0]);
  EXPECT_EQ(m1.stages[0].b2r[0], m2.stages[0].b2r[0]);
  EXPECT_EQ(m1.stages[0].cr[0], m2.stages[0].cr[0]);
  fs::remove_all(dir);
}

TEST(Report, SummarizesCompletedRun) {
  const fs::path dir = fresh_dir("report");
  run_experiment(small_cosine(dir));
  const std::string text = report(dir);
  EXPECT_NE(text.find("status: complete"), std::string::npos);
  EXPECT_NE(text.find("stage 1: deltastar"), std::string::npos);
  EXPECT_NE(text.find("3 solved / 5 naive / 2 spared"), std::string::npos);
  EXPECT_NE(text.find("error table"), std::string::npos);
  EXPECT_NE(text.find("wall clock"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Report, HomogenizedOnlyModel) {
  const fs::path dir = fresh_dir("report_hom");
  ExperimentConfig cfg = small_cosine(dir);
  cfg.alpha = 0;
  run_experiment(cfg);
  EXPECT_NE(report(dir).find("homogenized only"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Report, SavingsForTwoDimensionalThirdOrderModel) {
  const fs::path dir = fresh_dir("report_2d");
  fs::create_directories(dir);
  const EffectiveModel m = algorithm1(CoefficientField(constant_medium(2, 1.0), {8, 8}), 6, 0.1);
  {
    std::ofstream out(dir / "model.txt");
    write_model(out, m);
    std::ofstream man(dir / "manifest.txt");
    man << "[run]\nkind = longtime\nstatus = complete\n[outputs]\nmodel = model.txt\ncurves = curves.csv\n";
    std::ofstream curves(dir / "curves.csv");
    curves << "t,err_s0\n1,0\n";
  }
  EXPECT_NE(report(dir).find("14 solved / 35 naive / 21 spared"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Report, MissingCurveFileIsIncomplete) {
  const fs::path dir = fresh_dir("report_missing");
  run_experiment(small_cosine(dir));
  fs::remove(dir / "curves.csv");
  const std::string text = report(dir);
  EXPECT_NE(text.find("incomplete: missing curve file (stage"), std::string::npos);
  fs::remove_all(dir);
}
