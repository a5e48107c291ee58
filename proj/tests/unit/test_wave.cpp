#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "longwave/effective.hpp"
#include "longwave/errors.hpp"
#include "longwave/wave.hpp"

using namespace longwave;

namespace {

constexpr double kPi = std::numbers::pi;

MacroGrid grid_1d(double lo, double hi, int points, double eps) { return MacroGrid{{lo}, {hi}, {points}, eps, {1.0}}; }

EffectiveModel trivial_model(double a0) {
  EffectiveModel m;
  m.dim = 1;
  m.epsilon = 0.1;
  m.a0 = SymTensor(1, 2);
  m.a0[0] = a0;
  return m;
}

Field random_field(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Field v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

// Max error of the leapfrog solution against cos(kt)cos(kx) at t = 5.
double mode_error(double dt) {
  const MacroGrid g = grid_1d(0.0, 2 * kPi, 64, 2 * kPi / 8);
  const FineOperator op(g, constant_medium(1, 1.0));
  Field g0(64), g1(64, 0.0);
  for (int i = 0; i < 64; ++i) g0[static_cast<std::size_t>(i)] = std::cos(3 * g.coordinate(0, i));
  SimConfig cfg;
  cfg.dt = dt;
  cfg.t_end = 5.0;
  cfg.output_times = {5.0};
  const FineResult res = fine_solve(op, g0, g1, cfg);
  double err = 0.0;
  for (std::size_t i = 0; i < 64; ++i) err = std::max(err, std::abs(res.states[0].u[i] - std::cos(15.0) * g0[i]));
  return err;
}

}  // namespace

TEST(Domain, PaperDomainIsCompatible) {
  const MacroGrid g = grid_1d(-84.0, 84.0, 1680 * 16, 0.1);
  const auto checks = validate_domain(g);
  ASSERT_EQ(checks.size(), 1u);
  EXPECT_TRUE(checks[0].ok);
  EXPECT_NEAR(checks[0].cells, 1680.0, 1e-9);
  EXPECT_NEAR(checks[0].points_per_cell, 16.0, 1e-9);
}

TEST(Domain, FractionalCellCountFails) {
  const MacroGrid g = grid_1d(0.0, 1.05, 84, 0.1);
  const auto checks = check_domain(g);
  EXPECT_FALSE(checks[0].ok);
  EXPECT_THROW(validate_domain(g), IncompatibleDomain);
}

TEST(Domain, TwoDimensionalFailureNamesAxis) {
  const MacroGrid g{{0.0, 0.0}, {1.0, 1.05}, {80, 84}, 0.1, {1.0, 1.0}};
  try {
    validate_domain(g);
    FAIL() << "expected IncompatibleDomain";
  } catch (const IncompatibleDomain& e) {
    EXPECT_EQ(e.axis(), 2);
  }
}

TEST(Domain, OddPointCountFails) {
  EXPECT_FALSE(check_domain(grid_1d(0.0, 1.0, 81, 0.1))[0].ok);
  // 10 cells on 64 points: spacing does not divide the cell
  EXPECT_FALSE(check_domain(grid_1d(0.0, 1.0, 64, 0.1))[0].ok);
  EXPECT_TRUE(check_domain(grid_1d(0.0, 1.0, 50, 0.1))[0].ok);
}

TEST(FineOperator, ConstantCoefficientModeIsExact) {
  const double c = 1.5;
  const MacroGrid g = grid_1d(0.0, 2 * kPi, 64, 2 * kPi / 8);
  const FineOperator op(g, constant_medium(1, c));
  Field u(64);
  for (int i = 0; i < 64; ++i) u[static_cast<std::size_t>(i)] = std::sin(5 * g.coordinate(0, i));
  const Field lu = apply_fine_operator(op, u);
  for (std::size_t i = 0; i < 64; ++i) EXPECT_NEAR(lu[i], -25 * c * u[i], 1e-13 * 25 * c);
  const Field zero = op.apply(Field(64, 3.0));
  for (double v : zero) EXPECT_NEAR(v, 0.0, 1e-13);
}

TEST(FineOperator, IsSelfAdjoint) {
  std::mt19937_64 rng(3);
  const MacroGrid g{{-1.0, -1.0}, {1.0, 1.0}, {80, 80}, 0.25, {1.0, 1.0}};
  const FineOperator op(g, laminate2d_medium());
  const Field u = random_field(6400, rng), w = random_field(6400, rng);
  const double lhs = grid_dot(op.apply(u), w);
  const double rhs = grid_dot(u, op.apply(w));
  EXPECT_LE(std::abs(lhs - rhs), 1e-11 * std::abs(lhs));
}

TEST(FineSolve, SecondOrderInTime) {
  const double e1 = mode_error(0.02), e2 = mode_error(0.01), e3 = mode_error(0.005);
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.1);
  EXPECT_NEAR(std::log2(e2 / e3), 2.0, 0.1);
}

TEST(FineSolve, EnergyIsConserved) {
  const MacroGrid g = grid_1d(-2.0, 2.0, 320, 0.1);
  const FineOperator op(g, cos1d_medium());
  const Field g0 = gaussian_initial(g, 4.0, 1.0);
  SimConfig cfg;
  cfg.t_end = 2e4 * default_time_step(op);
  cfg.output_times = {cfg.t_end};
  const FineResult res = fine_solve(op, g0, Field(320, 0.0), cfg);
  EXPECT_EQ(res.steps, 20000);
  EXPECT_LE(res.energy_drift, 1e-6);
}

TEST(FineSolve, RejectsCflViolation) {
  const MacroGrid g = grid_1d(-2.0, 2.0, 320, 0.1);
  const FineOperator op(g, cos1d_medium());
  SimConfig cfg;
  cfg.dt = 2 * cfl_limit(op);
  cfg.t_end = 1.0;
  EXPECT_THROW(fine_solve(op, Field(320, 0.0), Field(320, 0.0), cfg), CflViolation);
}

TEST(FineSolve, BlowUpDetectorFires) {
  const MacroGrid g = grid_1d(-2.0, 2.0, 320, 0.1);
  const FineOperator op(g, cos1d_medium());
  SimConfig cfg;
  cfg.t_end = 2.0;
  cfg.blowup_factor = 0.5;
  // g1 dominates the reference norm; u grows past half of it
  Field g1(320, 1.0);
  EXPECT_THROW(fine_solve(op, Field(320, 0.0), g1, cfg), BlowUp);
}

TEST(FineSolve, PulseSplitsIntoTwoPackets) {
  const MacroGrid g = grid_1d(-21.0, 21.0, 3360, 0.1);
  const FineOperator op(g, cos1d_medium());
  const Field g0 = gaussian_initial(g, 4.0, 1.0);
  SimConfig cfg;
  cfg.t_end = 10.0;
  cfg.output_times = {10.0};
  const Field u = fine_solve(op, g0, Field(g0.size(), 0.0), cfg).states[0].u;
  std::size_t left = 0, right = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (g.coordinate(0, static_cast<int>(i)) < 0 && u[i] > u[left]) left = i;
    if (g.coordinate(0, static_cast<int>(i)) >= 0 && u[i] > u[right]) right = i;
  }
  EXPECT_NEAR(g.coordinate(0, static_cast<int>(left)), -10.0, 0.2);
  EXPECT_NEAR(g.coordinate(0, static_cast<int>(right)), 10.0, 0.2);
  EXPECT_NEAR(u[left], 0.5, 0.05);
  EXPECT_NEAR(u[right], 0.5, 0.05);
}

TEST(Dispersion, Examples) {
  EffectiveModel m = trivial_model(2.0);
  const double k[1] = {3.0};
  const Dispersion d0 = dispersion_relation(m, k);
  EXPECT_DOUBLE_EQ(d0.omega, std::sqrt(18.0));
  const double zero[1] = {0.0};
  const Dispersion dz = dispersion_relation(m, zero);
  EXPECT_EQ(dz.H, 1.0);
  EXPECT_EQ(dz.A, 0.0);
  EXPECT_EQ(dz.omega, 0.0);
  EffectiveStage st;
  st.r = 1;
  st.a2r = SymTensor(1, 4);
  st.a2r[0] = 0.3;
  st.b2r = SymTensor(1, 2);
  st.b2r[0] = 0.2;
  m.stages.push_back(st);
  m.alpha = 2;
  const Dispersion d1 = dispersion_relation(m, k);
  const double eps2 = 0.01;
  EXPECT_NEAR(d1.omega * d1.omega, (2.0 * 9 + eps2 * 0.3 * 81) / (1 + eps2 * 0.2 * 9), 1e-13);
}

TEST(Dispersion, NegativeSymbolIsRejected) {
  EffectiveModel m = trivial_model(1.0);
  EffectiveStage st;
  st.r = 1;
  st.a2r = SymTensor(1, 4);
  st.a2r[0] = -50.0;
  st.b2r = SymTensor(1, 2);
  m.stages.push_back(st);
  const double k[1] = {10.0};
  EXPECT_THROW(dispersion_relation(m, k), NumericalError);
}

TEST(Dispersion, SymbolsAreRealAndElliptic) {
  const CoefficientField a(cos1d_medium(), {1024});
  const EffectiveModel m = algorithm1(a, 4, 0.1);
  const MacroGrid g = grid_1d(-21.0, 21.0, 3360, 0.1);
  const SpectralGrid sg(g.shape());
  for (std::size_t s = 0; s < sg.spectral_size(); ++s) {
    double k[1];
    sg.wavevector(s, k);
    const Dispersion d = dispersion_relation(m, k);
    EXPECT_GE(d.H, 1.0);
    EXPECT_GE(d.A, a.lambda() * k[0] * k[0] * (1 - 1e-10));
  }
}

TEST(EffectiveSolve, TrivialModelGivesCosine) {
  const MacroGrid g = grid_1d(0.0, 2 * kPi, 32, 2 * kPi / 4);
  Field g0(32);
  for (int i = 0; i < 32; ++i) g0[static_cast<std::size_t>(i)] = std::cos(g.coordinate(0, i));
  const double times[2] = {0.0, 2.0};
  const auto states = effective_solve(g, trivial_model(1.0), g0, Field(32, 0.0), times);
  for (std::size_t i = 0; i < 32; ++i) {
    EXPECT_EQ(states[0].u[i], g0[i]);
    EXPECT_EQ(states[0].v[i], 0.0);
    EXPECT_NEAR(states[1].u[i], std::cos(2.0) * g0[i], 1e-14);
  }
}

TEST(EffectiveSolve, TimeReversalAndEnergy) {
  std::mt19937_64 rng(9);
  const EffectiveModel m = algorithm1(CoefficientField(cos1d_medium(), {256}), 4, 0.1);
  const MacroGrid g = grid_1d(-4.0, 4.0, 640, 0.1);
  const Field u0 = gaussian_initial(g, 4.0, 1.0);
  Field v0 = random_field(640, rng);
  for (auto& x : v0) x *= 1e-2;
  const WaveState fwd = effective_propagate(g, m, u0, v0, 37.0);
  const WaveState back = effective_propagate(g, m, fwd.u, fwd.v, -37.0);
  for (std::size_t i = 0; i < u0.size(); ++i) {
    EXPECT_NEAR(back.u[i], u0[i], 1e-12);
    EXPECT_NEAR(back.v[i], v0[i], 1e-12);
  }
  const double e0 = effective_energy(g, m, u0, v0);
  EXPECT_NEAR(effective_energy(g, m, fwd.u, fwd.v), e0, 1e-12 * e0);
}

TEST(EffectiveSolve, AgreesWithFineSolveOnConstantMedium) {
  const MacroGrid g = grid_1d(-4.0, 4.0, 128, 0.5);
  const FineOperator op(g, constant_medium(1, 1.0));
  const Field g0 = gaussian_initial(g, 4.0, 1.0);
  const Field g1(g0.size(), 0.0);
  SimConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_end = 10.0;
  cfg.output_times = {10.0};
  const Field fine = fine_solve(op, g0, g1, cfg).states[0].u;
  const double t[1] = {10.0};
  const auto eff = effective_solve(g, trivial_model(1.0), g0, g1, t);
  EXPECT_LE(relative_error(fine, eff[0].u), 1e-6);
}

TEST(RelativeError, Examples) {
  const Field u{1.0, -2.0, 3.0};
  EXPECT_EQ(relative_error(u, u), 0.0);
  EXPECT_DOUBLE_EQ(relative_error(u, Field(3, 0.0)), 1.0);
  EXPECT_DOUBLE_EQ(relative_error(u, Field{2.0, -4.0, 6.0}), 1.0);
  EXPECT_THROW(relative_error(Field(3, 0.0), u), ConfigError);
}

TEST(Gaussian, CenteredAndScaled) {
  const MacroGrid g = grid_1d(-21.0, 21.0, 3360, 0.1);
  const Field v = gaussian_initial(g, 4.0, 1.0);
  EXPECT_DOUBLE_EQ(v[1680], 1.0);
  const double x = g.coordinate(0, 1700);
  EXPECT_NEAR(v[1700], std::exp(-4 * x * x), 1e-15);
  const MacroGrid g2{{-1.0, -1.0}, {1.0, 1.0}, {80, 80}, 0.1, {1.0, 1.0}};
  const double nu = std::cbrt(5.0);
  const Field w = gaussian_initial(g2, 20.0, nu);
  EXPECT_DOUBLE_EQ(w[40 * 80 + 40], 1.0);
  const double y = g2.coordinate(1, 44);
  EXPECT_NEAR(w[40 * 80 + 44], std::exp(-20 * nu * nu * y * y), 1e-15);
}

TEST(FieldDump, RoundTripIsExact) {
  std::mt19937_64 rng(1);
  const MacroGrid g{{-1.0, 0.0}, {1.0, 2.0}, {20, 40}, 0.1, {1.0, 1.0}};
  const Field u = random_field(800, rng);
  const auto path = std::filesystem::temp_directory_path() / "longwave_field_roundtrip.field";
  write_field(path, g, u, 12.5);
  const FieldDump d = read_field(path);
  std::filesystem::remove(path);
  EXPECT_EQ(d.points, (std::vector<int>{20, 40}));
  EXPECT_EQ(d.lo, (std::vector<double>{-1.0, 0.0}));
  EXPECT_EQ(d.hi, (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(d.t, 12.5);
  EXPECT_EQ(d.values, u);
}
