#include "longwave/sym_tensor.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "longwave/errors.hpp"

namespace longwave {

std::size_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
  return r;
}

std::size_t sym_size(int dim, int order) { return binomial(dim + order - 1, order); }

std::vector<MultiIndex> multi_index_set(int dim, int order) {
  std::vector<MultiIndex> out;
  out.reserve(sym_size(dim, order));
  MultiIndex idx(static_cast<std::size_t>(order), 0);
  if (order == 0) {
    out.push_back(idx);
    return out;
  }
  while (true) {
    out.push_back(idx);
    int p = order - 1;
    while (p >= 0 && idx[p] == dim - 1) --p;
    if (p < 0) break;
    ++idx[p];
    for (int q = p + 1; q < order; ++q) idx[q] = idx[p];
  }
  return out;
}

std::size_t multiplicity(std::span<const int> index) {
  const int n = static_cast<int>(index.size());
  MultiIndex sorted(index.begin(), index.end());
  std::sort(sorted.begin(), sorted.end());
  // n! / prod(count!) computed as a product of binomials
  std::size_t z = 1;
  int remaining = n;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const int c = static_cast<int>(j - i);
    z *= binomial(remaining, c);
    remaining -= c;
    i = j;
  }
  return z;
}

std::size_t index_rank(int dim, std::span<const int> index) {
  // Count canonical tuples that are lexicographically smaller.
  const int n = static_cast<int>(index.size());
  std::size_t rank = 0;
  int lower = 0;
  for (int p = 0; p < n; ++p) {
    for (int v = lower; v < index[p]; ++v) rank += sym_size(dim - v, n - p - 1);
    lower = index[p];
  }
  return rank;
}

MultiIndex canonicalize(std::span<const int> index) {
  MultiIndex out(index.begin(), index.end());
  std::sort(out.begin(), out.end());
  return out;
}

void for_each_arrangement(std::span<const int> index,
                          const std::function<void(std::span<const int>)>& fn) {
  MultiIndex perm = canonicalize(index);
  do {
    fn(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

SymTensor::SymTensor(int dim, int order)
    : dim_(dim), order_(order), values_(sym_size(dim, order), 0.0) {
  if (dim < 1 || order < 0) throw ShapeMismatch("SymTensor: need dim >= 1 and order >= 0");
}

SymTensor SymTensor::scalar(int dim, double value) {
  SymTensor t(dim, 0);
  t.values_[0] = value;
  return t;
}

SymTensor SymTensor::identity(int dim) {
  SymTensor t(dim, 2);
  for (int i = 0; i < dim; ++i) {
    const int idx[2] = {i, i};
    t.set(idx, 1.0);
  }
  return t;
}

double SymTensor::at(std::span<const int> index) const {
  if (static_cast<int>(index.size()) != order_) throw ShapeMismatch("SymTensor::at: wrong index length");
  if (std::is_sorted(index.begin(), index.end())) return values_[index_rank(dim_, index)];
  const MultiIndex c = canonicalize(index);
  return values_[index_rank(dim_, c)];
}

void SymTensor::set(std::span<const int> index, double value) {
  if (static_cast<int>(index.size()) != order_) throw ShapeMismatch("SymTensor::set: wrong index length");
  const MultiIndex c = canonicalize(index);
  values_[index_rank(dim_, c)] = value;
}

double SymTensor::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

void SymTensor::require_same_shape(const SymTensor& other) const {
  if (dim_ != other.dim_ || order_ != other.order_)
    throw ShapeMismatch("SymTensor: dimension/order mismatch (" + std::to_string(dim_) + "," +
                        std::to_string(order_) + ") vs (" + std::to_string(other.dim_) + "," +
                        std::to_string(other.order_) + ")");
}

SymTensor& SymTensor::operator+=(const SymTensor& other) {
  require_same_shape(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

SymTensor& SymTensor::operator-=(const SymTensor& other) {
  require_same_shape(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

SymTensor& SymTensor::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

SymTensor symmetrize(int dim, int order,
                     const std::function<double(std::span<const int>)>& raw) {
  SymTensor out(dim, order);
  const auto indices = multi_index_set(dim, order);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    double sum = 0.0;
    std::size_t count = 0;
    for_each_arrangement(indices[r], [&](std::span<const int> perm) {
      sum += raw(perm);
      ++count;
    });
    out[r] = sum / static_cast<double>(count);
  }
  return out;
}

bool sym_equal(const SymTensor& p, const SymTensor& q, double tol) {
  if (p.dim() != q.dim() || p.order() != q.order())
    throw ShapeMismatch("sym_equal: dimension/order mismatch");
  double diff = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) diff = std::max(diff, std::abs(p[i] - q[i]));
  return diff <= tol * (1.0 + std::max(p.max_abs(), q.max_abs()));
}

SymTensor tensor_product(const SymTensor& p, const SymTensor& q) {
  if (p.dim() != q.dim()) throw ShapeMismatch("tensor_product: dimension mismatch");
  const int m = p.order();
  const int n = q.order();
  return symmetrize(p.dim(), m + n, [&](std::span<const int> idx) {
    return p.at(idx.first(m)) * q.at(idx.subspan(m));
  });
}

SymTensor sym_power(const SymTensor& q, int s) {
  if (s < 1) throw ConfigError("sym_power: exponent must be >= 1");
  SymTensor out = q;
  for (int i = 1; i < s; ++i) out = tensor_product(out, q);
  return out;
}

double quadratic_form(const SymTensor& q, const SymTensor& xi) {
  if (q.dim() != xi.dim() || q.order() != 2 * xi.order())
    throw ShapeMismatch("quadratic_form: order of q must be twice the order of xi");
  const int d = q.dim();
  const int n = xi.order();
  const int total = 2 * n;
  std::vector<int> raw(static_cast<std::size_t>(total), 0);
  double sum = 0.0;
  // odometer over {0..d-1}^{2n}
  while (true) {
    const std::span<const int> all(raw);
    sum += q.at(all) * xi.at(all.first(n)) * xi.at(all.subspan(n));
    int p = total - 1;
    while (p >= 0 && raw[p] == d - 1) raw[p--] = 0;
    if (p < 0) break;
    ++raw[p];
  }
  return sum;
}

double contract_kpow(const SymTensor& q, std::span<const double> k) {
  if (static_cast<int>(k.size()) != q.dim()) throw ShapeMismatch("contract_kpow: wavevector dimension");
  const auto indices = multi_index_set(q.dim(), q.order());
  double sum = 0.0;
  for (std::size_t r = 0; r < indices.size(); ++r) {
    double prod = static_cast<double>(multiplicity(indices[r])) * q[r];
    for (int axis : indices[r]) prod *= k[static_cast<std::size_t>(axis)];
    sum += prod;
  }
  return sum;
}

SymmetricMatrix matricize(const SymTensor& q) {
  if (q.order() % 2 != 0) throw ShapeMismatch("matricize: tensor order must be even");
  const int n = q.order() / 2;
  const auto indices = multi_index_set(q.dim(), n);
  std::vector<double> z(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) z[r] = static_cast<double>(multiplicity(indices[r]));
  SymmetricMatrix m(indices.size());
  MultiIndex joined(static_cast<std::size_t>(2 * n));
  for (std::size_t r = 0; r < indices.size(); ++r) {
    for (std::size_t s = r; s < indices.size(); ++s) {
      std::copy(indices[r].begin(), indices[r].end(), joined.begin());
      std::copy(indices[s].begin(), indices[s].end(), joined.begin() + n);
      m(r, s) = z[r] * z[s] * q.at(joined);
    }
  }
  return m;
}

std::vector<double> vectorize(const SymTensor& xi) {
  return {xi.values().begin(), xi.values().end()};
}

double min_eigenvalue(const SymmetricMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.size());
  if (n == 0) throw ShapeMismatch("min_eigenvalue: empty matrix");
  Eigen::MatrixXd dense(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index s = 0; s < n; ++s) {
      const double v = m(static_cast<std::size_t>(r), static_cast<std::size_t>(s));
      if (!std::isfinite(v)) throw NumericalError("min_eigenvalue: non-finite matrix entry");
      dense(r, s) = v;
    }
  if (n == 1) return dense(0, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("min_eigenvalue: eigensolver failed");
  return solver.eigenvalues().minCoeff();
}

bool is_psd(const SymTensor& q, double tol) { return min_eigenvalue(matricize(q)) >= -tol; }

void write_symtensor(std::ostream& out, const SymTensor& t) {
  out << "symtensor d=" << t.dim() << " n=" << t.order() << '\n';
  const auto indices = multi_index_set(t.dim(), t.order());
  const auto old_precision = out.precision(17);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    for (int axis : indices[r]) out << axis + 1 << ' ';
    out << t[r] << '\n';
  }
  out.precision(old_precision);
}

namespace {

int header_int(const std::string& header, const std::string& key) {
  const auto pos = header.find(key + "=");
  if (pos == std::string::npos) throw ConfigError("symtensor header lacks '" + key + "': " + header);
  try {
    return std::stoi(header.substr(pos + key.size() + 1));
  } catch (const std::exception&) {
    throw ConfigError("symtensor header has a malformed '" + key + "': " + header);
  }
}

}  // namespace

SymTensor read_symtensor_body(std::istream& in, const std::string& header) {
  if (header.rfind("symtensor", 0) != 0) throw ConfigError("expected 'symtensor' header, got: " + header);
  const int d = header_int(header, "d");
  const int n = header_int(header, "n");
  if (d < 1 || n < 0) throw ConfigError("symtensor header out of range: " + header);
  SymTensor t(d, n);
  const auto indices = multi_index_set(d, n);
  std::string line;
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (!std::getline(in, line)) throw ConfigError("symtensor block truncated");
    std::istringstream row(line);
    MultiIndex idx(static_cast<std::size_t>(n));
    for (int& axis : idx) {
      if (!(row >> axis) || axis < 1 || axis > d) throw ConfigError("symtensor: bad index in line: " + line);
      --axis;
    }
    double v = 0.0;
    if (!(row >> v)) throw ConfigError("symtensor: missing value in line: " + line);
    if (!std::is_sorted(idx.begin(), idx.end())) throw ConfigError("symtensor: index not canonical: " + line);
    t[index_rank(d, idx)] = v;
  }
  return t;
}

SymTensor read_symtensor(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ConfigError("symtensor: missing header");
  return read_symtensor_body(in, header);
}

}  // namespace longwave
