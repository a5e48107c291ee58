#pragma once

// Symmetric tensors of arbitrary order over R^d, stored by their distinct
// entries (non-decreasing multi-indices in lexicographic order).
//
// Axes are 0-based in memory; the text format writes them 1-based.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace longwave {

/// Sorted (non-decreasing) list of 0-based axes.
using MultiIndex = std::vector<int>;

/// binom(n, k) as an exact integer; 0 when k > n.
std::size_t binomial(int n, int k);

/// Number of distinct entries of a symmetric order-n tensor in dimension d.
std::size_t sym_size(int dim, int order);

/// All non-decreasing n-tuples over 0..d-1, lexicographic.
std::vector<MultiIndex> multi_index_set(int dim, int order);

/// Number of raw indices in {0..d-1}^n equal to `index` up to permutation.
std::size_t multiplicity(std::span<const int> index);

/// Position of a canonical index inside multi_index_set(dim, index.size()).
std::size_t index_rank(int dim, std::span<const int> index);

/// Sorted copy of an arbitrary index.
MultiIndex canonicalize(std::span<const int> index);

/// Calls `fn` on every distinct rearrangement of `index` (a multiset
/// permutation). Averaging over these equals averaging over all n! permutations.
void for_each_arrangement(std::span<const int> index,
                          const std::function<void(std::span<const int>)>& fn);

class SymTensor {
 public:
  SymTensor() = default;
  SymTensor(int dim, int order);

  static SymTensor scalar(int dim, double value);
  static SymTensor identity(int dim);

  int dim() const noexcept { return dim_; }
  int order() const noexcept { return order_; }
  std::size_t size() const noexcept { return values_.size(); }

  double operator[](std::size_t rank) const { return values_[rank]; }
  double& operator[](std::size_t rank) { return values_[rank]; }

  /// Entry at any (possibly unsorted) index.
  double at(std::span<const int> index) const;
  void set(std::span<const int> index, double value);

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  double max_abs() const noexcept;

  SymTensor& operator+=(const SymTensor& other);
  SymTensor& operator-=(const SymTensor& other);
  SymTensor& operator*=(double s);

  friend SymTensor operator+(SymTensor a, const SymTensor& b) { return a += b; }
  friend SymTensor operator-(SymTensor a, const SymTensor& b) { return a -= b; }
  friend SymTensor operator*(SymTensor a, double s) { return a *= s; }
  friend SymTensor operator*(double s, SymTensor a) { return a *= s; }
  friend SymTensor operator-(SymTensor a) { return a *= -1.0; }

 private:
  void require_same_shape(const SymTensor& other) const;

  int dim_ = 1;
  int order_ = 0;
  std::vector<double> values_ = {0.0};
};

/// Dense symmetric matrix; entry (r,s) and (s,r) share storage.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(std::size_t n = 0) : n_(n), packed_(n * (n + 1) / 2, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t r, std::size_t s) const { return packed_[slot(r, s)]; }
  double& operator()(std::size_t r, std::size_t s) { return packed_[slot(r, s)]; }

 private:
  std::size_t slot(std::size_t r, std::size_t s) const noexcept {
    if (r > s) std::swap(r, s);
    return s * (s + 1) / 2 + r;
  }

  std::size_t n_;
  std::vector<double> packed_;
};

/// Full symmetrization of a tensor given entrywise on raw indices.
SymTensor symmetrize(int dim, int order,
                     const std::function<double(std::span<const int>)>& raw);

/// True iff max|p - q| <= tol * (1 + max(|p|, |q|)).
bool sym_equal(const SymTensor& p, const SymTensor& q, double tol = 1e-10);

/// S^{m+n}(p ⊗ q).
SymTensor tensor_product(const SymTensor& p, const SymTensor& q);

/// S^{2s}(q ⊗ ... ⊗ q), s >= 1.
SymTensor sym_power(const SymTensor& q, int s);

/// q ξ : ξ summed over all raw indices.
double quadratic_form(const SymTensor& q, const SymTensor& xi);

/// q : k^{⊗n}.
double contract_kpow(const SymTensor& q, std::span<const double> k);

/// M(q)_{rs} = z(l(r)) z(l(s)) q_{l(r) l(s)} for an even-order tensor.
SymmetricMatrix matricize(const SymTensor& q);

/// Canonical entries of ξ in lexicographic order (the vector ν(ξ)).
std::vector<double> vectorize(const SymTensor& xi);

double min_eigenvalue(const SymmetricMatrix& m);

bool is_psd(const SymTensor& q, double tol);

/// Text form: header `symtensor d=<d> n=<n>` and one line per canonical
/// index with 1-based axes followed by the value (17 significant digits).
void write_symtensor(std::ostream& out, const SymTensor& t);
/// Reads a block written by write_symtensor. `header` may be given when the
/// caller already consumed the header line.
SymTensor read_symtensor(std::istream& in);
SymTensor read_symtensor_body(std::istream& in, const std::string& header);

}  // namespace longwave
