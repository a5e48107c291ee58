#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "longwave/errors.hpp"
#include "longwave/sym_tensor.hpp"

using namespace longwave;

namespace {

SymTensor random_tensor(int dim, int order, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SymTensor t(dim, order);
  for (auto& v : t.values()) v = u(rng);
  return t;
}

SymTensor random_spd(int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> b(static_cast<std::size_t>(dim * dim));
  for (auto& v : b) v = u(rng);
  SymTensor a(dim, 2);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      double s = i == j ? 0.1 : 0.0;
      for (int k = 0; k < dim; ++k) s += b[static_cast<std::size_t>(i * dim + k)] * b[static_cast<std::size_t>(j * dim + k)];
      const int idx[2] = {i, j};
      a.set(idx, s);
    }
  return a;
}

// Sum over every raw index in {0..d-1}^{2n} of q_{IJ} xi_I xi_J.
double brute_quadratic_form(const SymTensor& q, const SymTensor& xi) {
  const int d = xi.dim();
  const int n = xi.order();
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(d);
  std::vector<int> I(static_cast<std::size_t>(n)), J(static_cast<std::size_t>(n)), IJ(static_cast<std::size_t>(2 * n));
  double sum = 0.0;
  for (std::size_t a = 0; a < total; ++a) {
    std::size_t ra = a;
    for (int p = 0; p < n; ++p) { I[static_cast<std::size_t>(p)] = static_cast<int>(ra % static_cast<std::size_t>(d)); ra /= static_cast<std::size_t>(d); }
    for (std::size_t b = 0; b < total; ++b) {
      std::size_t rb = b;
      for (int p = 0; p < n; ++p) { J[static_cast<std::size_t>(p)] = static_cast<int>(rb % static_cast<std::size_t>(d)); rb /= static_cast<std::size_t>(d); }
      std::copy(I.begin(), I.end(), IJ.begin());
      std::copy(J.begin(), J.end(), IJ.begin() + n);
      sum += q.at(IJ) * xi.at(I) * xi.at(J);
    }
  }
  return sum;
}

}  // namespace

TEST(SymTensor, SizesMatchBinomials) {
  EXPECT_EQ(sym_size(1, 7), 1u);
  EXPECT_EQ(sym_size(2, 2), 3u);
  EXPECT_EQ(sym_size(2, 4), 5u);
  EXPECT_EQ(sym_size(3, 2), 6u);
  EXPECT_EQ(sym_size(3, 4), 15u);
  EXPECT_EQ(sym_size(3, 0), 1u);
  EXPECT_EQ(binomial(10, 3), 120u);
  EXPECT_EQ(binomial(3, 5), 0u);
}

TEST(SymTensor, MultiIndexSetIsLexicographic) {
  const auto set = multi_index_set(2, 2);
  ASSERT_EQ(set.size(), 3u);
  EXPECT_EQ(set[0], (MultiIndex{0, 0}));
  EXPECT_EQ(set[1], (MultiIndex{0, 1}));
  EXPECT_EQ(set[2], (MultiIndex{1, 1}));
  const auto empty = multi_index_set(3, 0);
  ASSERT_EQ(empty.size(), 1u);
  EXPECT_TRUE(empty[0].empty());
  for (std::size_t r = 0; r < set.size(); ++r) EXPECT_EQ(index_rank(2, set[r]), r);
}

TEST(SymTensor, MultiplicityExamples) {
  EXPECT_EQ(multiplicity(MultiIndex{0, 0, 1}), 3u);
  EXPECT_EQ(multiplicity(MultiIndex{0, 1, 2}), 6u);
  EXPECT_EQ(multiplicity(MultiIndex{1, 1, 1, 1}), 1u);
  EXPECT_EQ(multiplicity(MultiIndex{0, 0, 1, 1}), 6u);
}

TEST(SymTensor, MultiplicitiesSumToRawCount) {
  for (int d = 1; d <= 3; ++d)
    for (int n = 0; n <= 6; ++n) {
      std::size_t sum = 0;
      for (const auto& idx : multi_index_set(d, n)) sum += multiplicity(idx);
      std::size_t raw = 1;
      for (int i = 0; i < n; ++i) raw *= static_cast<std::size_t>(d);
      EXPECT_EQ(sum, raw) << "d=" << d << " n=" << n;
    }
}

TEST(SymTensor, ArrangementsCountEqualsMultiplicity) {
  const MultiIndex idx{0, 0, 1, 2, 2};
  std::size_t count = 0;
  for_each_arrangement(idx, [&](std::span<const int> p) {
    ++count;
    EXPECT_EQ(canonicalize(p), idx);
  });
  EXPECT_EQ(count, multiplicity(idx));
}

TEST(SymTensor, SetAtIsPermutationInvariant) {
  SymTensor t(3, 3);
  const int raw[3] = {2, 0, 1};
  t.set(raw, 4.5);
  const int other[3] = {1, 2, 0};
  EXPECT_EQ(t.at(other), 4.5);
  EXPECT_EQ(t[index_rank(3, MultiIndex{0, 1, 2})], 4.5);
}

TEST(SymTensor, SymmetrizeAveragesArrangements) {
  // raw entry = first axis index: S gives the mean of the first slot
  const auto s = symmetrize(2, 2, [](std::span<const int> idx) { return static_cast<double>(idx[0]); });
  EXPECT_DOUBLE_EQ(s.at(MultiIndex{0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(s.at(MultiIndex{0, 1}), 0.5);
  EXPECT_DOUBLE_EQ(s.at(MultiIndex{1, 1}), 1.0);
}

TEST(SymTensor, SymEqualUsesRelativeTolerance) {
  SymTensor a(2, 2), b(2, 2);
  a[0] = 1e6;
  b[0] = 1e6 + 1e-5;
  EXPECT_TRUE(sym_equal(a, b, 1e-10));
  b[1] = 1.0;
  EXPECT_FALSE(sym_equal(a, b, 1e-10));
  EXPECT_THROW(sym_equal(a, SymTensor(2, 4)), ConfigError);
}

TEST(SymTensor, TensorProductOfIdentities) {
  const SymTensor id = SymTensor::identity(2);
  const SymTensor p = tensor_product(id, id);
  // S(δ⊗δ)_{1111} = 1, _{1122} = 1/3
  EXPECT_NEAR(p.at(MultiIndex{0, 0, 0, 0}), 1.0, 1e-15);
  EXPECT_NEAR(p.at(MultiIndex{0, 0, 1, 1}), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(p.at(MultiIndex{0, 0, 0, 1}), 0.0, 1e-15);
}

TEST(SymTensor, SymPowerContractsToPowerOfQuadraticForm) {
  std::mt19937_64 rng(11);
  for (int d = 1; d <= 3; ++d) {
    const SymTensor a = random_spd(d, rng);
    std::vector<double> k(static_cast<std::size_t>(d));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& v : k) v = u(rng);
    const double base = contract_kpow(a, k);
    for (int s = 1; s <= 3; ++s) EXPECT_NEAR(contract_kpow(sym_power(a, s), k), std::pow(base, s), 1e-12 * std::pow(std::abs(base) + 1, s));
  }
  EXPECT_THROW(sym_power(SymTensor::identity(2), 0), ConfigError);
}

TEST(SymTensor, IdentityContraction) {
  const double k[3] = {1.0, 2.0, -2.0};
  EXPECT_DOUBLE_EQ(contract_kpow(SymTensor::identity(3), k), 9.0);
  EXPECT_NEAR(contract_kpow(sym_power(SymTensor::identity(3), 2), k), 81.0, 1e-12);
}

TEST(SymTensor, MatricizationMatchesBruteForceQuadraticForm) {
  std::mt19937_64 rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + trial % 3;
    const int n = 1 + (trial / 3) % 3;
    const SymTensor q = random_tensor(d, 2 * n, rng);
    const SymTensor xi = random_tensor(d, n, rng);
    const auto m = matricize(q);
    const auto v = vectorize(xi);
    double form = 0.0;
    for (std::size_t r = 0; r < v.size(); ++r)
      for (std::size_t s = 0; s < v.size(); ++s) form += v[r] * m(r, s) * v[s];
    const double brute = brute_quadratic_form(q, xi);
    EXPECT_NEAR(form, brute, 1e-11 * (1.0 + std::abs(brute)));
    EXPECT_NEAR(quadratic_form(q, xi), brute, 1e-11 * (1.0 + std::abs(brute)));
    ++checked;
  }
  EXPECT_EQ(checked, 200);
}

TEST(SymTensor, PowersOfSpdArePositiveDefinite) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 2;
    const SymTensor a = random_spd(d, rng);
    for (int n = 1; n <= 3; ++n) EXPECT_GT(min_eigenvalue(matricize(sym_power(a, n))), 0.0) << "trial " << trial << " n " << n;
  }
}

TEST(SymTensor, MinEigenvalueOfKnownMatrix) {
  SymTensor a(2, 2);
  a.set(MultiIndex{0, 0}, 2.0);
  a.set(MultiIndex{0, 1}, 1.0);
  a.set(MultiIndex{1, 1}, 2.0);
  EXPECT_NEAR(min_eigenvalue(matricize(a)), 1.0, 1e-14);
  EXPECT_TRUE(is_psd(a, 0.0));
  a.set(MultiIndex{0, 1}, 3.0);
  EXPECT_NEAR(min_eigenvalue(matricize(a)), -1.0, 1e-14);
  EXPECT_FALSE(is_psd(a, 1e-12));
}

TEST(SymTensor, MatricizeRejectsOddOrder) {
  EXPECT_THROW(matricize(SymTensor(2, 3)), ConfigError);
}

TEST(SymTensor, NonFiniteEntriesAreRejected) {
  SymTensor a = SymTensor::identity(2);
  a[0] = std::nan("");
  EXPECT_THROW(min_eigenvalue(matricize(a)), NumericalError);
}

TEST(SymTensor, TextRoundTripIsExact) {
  std::mt19937_64 rng(5);
  const SymTensor t = random_tensor(3, 4, rng);
  std::stringstream ss;
  write_symtensor(ss, t);
  const SymTensor back = read_symtensor(ss);
  ASSERT_EQ(back.dim(), 3);
  ASSERT_EQ(back.order(), 4);
  for (std::size_t r = 0; r < t.size(); ++r) EXPECT_EQ(back[r], t[r]);
}

TEST(SymTensor, MalformedTextIsAConfigError) {
  std::stringstream ss("symtensor d=2 n=2\n1 1 1.0\n1 2 oops\n");
  EXPECT_THROW(read_symtensor(ss), ConfigError);
}
