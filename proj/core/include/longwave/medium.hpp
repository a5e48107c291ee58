#pragma once

// Periodic media a(y): analytic builtins or grid-sampled data, and their
// samples on a cell grid (CoefficientField).

#include <array>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "longwave/spectral.hpp"

namespace longwave {

/// Number of stored entries of a symmetric d×d matrix.
constexpr int sym_entries(int d) { return d * (d + 1) / 2; }
/// Slot of (i,j) in canonical order 11,12,..,1d,22,..,dd (0-based axes).
int sym_slot(int d, int i, int j);

/// A Y-periodic symmetric coefficient a(y).
class Medium {
 public:
  using Evaluator = std::function<void(std::span<const double> y, std::span<double> entries)>;

  Medium(std::string name, std::vector<double> cell_lengths, Evaluator eval);

  const std::string& name() const noexcept { return name_; }
  int dim() const noexcept { return static_cast<int>(cell_lengths_.size()); }
  const std::vector<double>& cell_lengths() const noexcept { return cell_lengths_; }

  /// Writes the d(d+1)/2 entries of a(y); y is reduced modulo the cell.
  void evaluate(std::span<const double> y, std::span<double> entries) const;

 private:
  std::string name_;
  std::vector<double> cell_lengths_;
  Evaluator eval_;
};

/// `constant:c` in dimension d: a = c I.
Medium constant_medium(int dim, double c);
/// a(y) = √2 − cos(2πy) on Y = (0,1).
Medium cos1d_medium();
/// a(y) = (1 − 0.5 cos(2π y₂)) I on Y = (0,1)².
Medium laminate2d_medium();

/// Resolves `builtin:<name>` (constant:c, cos1d, laminate2d) or a coefficient
/// file path. `dim` is only used by constant media.
Medium make_medium(const std::string& spec, int dim = 1);

/// Samples of a(y) on a cell grid with ellipticity bounds.
class CoefficientField {
 public:
  /// Samples `medium` at the nodes of `shape` (lengths must match the cell).
  CoefficientField(const Medium& medium, const std::vector<int>& points);
  /// Takes ownership of raw samples: entries[slot][point].
  CoefficientField(GridShape shape, std::vector<Field> entries);

  const GridShape& shape() const noexcept { return shape_; }
  int dim() const noexcept { return shape_.dim(); }
  /// Field of entry a_ij (0-based, symmetric).
  const Field& entry(int i, int j) const { return entries_[sym_slot(dim(), i, j)]; }
  const std::vector<Field>& entries() const noexcept { return entries_; }

  double lambda() const noexcept { return lambda_; }
  double Lambda() const noexcept { return Lambda_; }
  /// Grid mean of a, as a dense row-major d×d matrix.
  std::vector<double> mean_matrix() const;

 private:
  void check_ellipticity();

  GridShape shape_;
  std::vector<Field> entries_;
  double lambda_ = 0.0;
  double Lambda_ = 0.0;
};

/// Coefficient file: text header `cellcoef d=<d> l=<l1,..> n=<N1,..>` then
/// row-major little-endian doubles, d(d+1)/2 entries per point.
void write_coefficient_file(const std::filesystem::path& path, const CoefficientField& a);
CoefficientField read_coefficient_file(const std::filesystem::path& path);

/// Medium that looks up a grid-sampled coefficient at exact grid nodes.
/// Evaluation off the nodes throws ConfigError.
Medium sampled_medium(std::string name, CoefficientField field);

// Shared helpers for the binary block formats.
void write_doubles_le(std::ostream& out, std::span<const double> values);
void read_doubles_le(std::istream& in, std::span<double> values);
std::string join_numbers(std::span<const double> v);
std::string join_numbers(std::span<const int> v);
/// Value of `key=...` in a whitespace separated header (up to next space).
std::string header_value(const std::string& header, const std::string& key);
std::vector<double> parse_number_list(const std::string& s);

}  // namespace longwave
