#include "longwave/medium.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

#include "longwave/errors.hpp"

namespace longwave {

int sym_slot(int d, int i, int j) {
  if (i > j) std::swap(i, j);
  // rows 0..i-1 hold d, d-1, ... entries
  return i * d - i * (i - 1) / 2 + (j - i);
}

Medium::Medium(std::string name, std::vector<double> cell_lengths, Evaluator eval)
    : name_(std::move(name)), cell_lengths_(std::move(cell_lengths)), eval_(std::move(eval)) {
  if (cell_lengths_.empty() || cell_lengths_.size() > 3) throw ConfigError("medium dimension must be 1, 2 or 3");
  for (double l : cell_lengths_)
    if (!(l > 0.0)) throw ConfigError("medium cell lengths must be positive");
}

void Medium::evaluate(std::span<const double> y, std::span<double> entries) const {
  std::array<double, 3> reduced{};
  for (int i = 0; i < dim(); ++i) {
    const double l = cell_lengths_[i];
    double r = std::fmod(y[i], l);
    if (r < 0.0) r += l;
    reduced[i] = r;
  }
  eval_(std::span<const double>(reduced.data(), static_cast<std::size_t>(dim())), entries);
}

Medium constant_medium(int dim, double c) {
  if (!(c > 0.0)) throw ConfigError("constant medium needs a positive value");
  return Medium("constant:" + std::to_string(c), std::vector<double>(static_cast<std::size_t>(dim), 1.0),
                [dim, c](std::span<const double>, std::span<double> e) {
                  for (int i = 0; i < dim; ++i)
                    for (int j = i; j < dim; ++j) e[sym_slot(dim, i, j)] = (i == j) ? c : 0.0;
                });
}

Medium cos1d_medium() {
  return Medium("cos1d", {1.0}, [](std::span<const double> y, std::span<double> e) {
    e[0] = std::numbers::sqrt2 - std::cos(2.0 * std::numbers::pi * y[0]);
  });
}

Medium laminate2d_medium() {
  return Medium("laminate2d", {1.0, 1.0}, [](std::span<const double> y, std::span<double> e) {
    const double v = 1.0 - 0.5 * std::cos(2.0 * std::numbers::pi * y[1]);
    e[0] = v;
    e[1] = 0.0;
    e[2] = v;
  });
}

Medium make_medium(const std::string& spec, int dim) {
  const std::string prefix = "builtin:";
  if (spec.rfind(prefix, 0) == 0) {
    const std::string name = spec.substr(prefix.size());
    if (name == "cos1d") return cos1d_medium();
    if (name == "laminate2d") return laminate2d_medium();
    if (name.rfind("constant:", 0) == 0) {
      double c = 0.0;
      try {
        c = std::stod(name.substr(9));
      } catch (const std::exception&) {
        throw ConfigError("malformed constant medium: " + spec);
      }
      return constant_medium(dim, c);
    }
    throw ConfigError("unknown builtin medium: " + spec);
  }
  return sampled_medium(spec, read_coefficient_file(spec));
}

CoefficientField::CoefficientField(const Medium& medium, const std::vector<int>& points) {
  if (static_cast<int>(points.size()) != medium.dim()) throw ShapeMismatch("coefficient grid dimension mismatch");
  shape_ = GridShape{medium.cell_lengths(), points};
  shape_.validate();
  const int d = medium.dim();
  const std::size_t n = shape_.size();
  entries_.assign(static_cast<std::size_t>(sym_entries(d)), Field(n));
  std::array<double, 3> y{};
  std::array<double, 6> e{};
  for (std::size_t p = 0; p < n; ++p) {
    std::size_t rem = p;
    for (int a = d - 1; a >= 0; --a) {
      const auto np = static_cast<std::size_t>(points[a]);
      y[a] = static_cast<double>(rem % np) * shape_.spacing(a);
      rem /= np;
    }
    medium.evaluate(std::span<const double>(y.data(), static_cast<std::size_t>(d)),
                    std::span<double>(e.data(), static_cast<std::size_t>(sym_entries(d))));
    for (int s = 0; s < sym_entries(d); ++s) entries_[s][p] = e[s];
  }
  check_ellipticity();
}

CoefficientField::CoefficientField(GridShape shape, std::vector<Field> entries)
    : shape_(std::move(shape)), entries_(std::move(entries)) {
  shape_.validate();
  if (static_cast<int>(entries_.size()) != sym_entries(shape_.dim()))
    throw ShapeMismatch("coefficient field needs d(d+1)/2 entry fields");
  for (const auto& f : entries_)
    if (f.size() != shape_.size()) throw ShapeMismatch("coefficient entry field has the wrong size");
  check_ellipticity();
}

void CoefficientField::check_ellipticity() {
  const int d = dim();
  lambda_ = std::numeric_limits<double>::infinity();
  Lambda_ = 0.0;
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  for (std::size_t p = 0; p < shape_.size(); ++p) {
    double lo = 0.0;
    double hi = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const double v = entries_[sym_slot(d, i, j)][p];
        if (!std::isfinite(v)) throw ConfigError("coefficient field has non-finite entries");
        m(i, j) = v;
      }
    if (d == 1) {
      lo = hi = m(0, 0);
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.topLeftCorner(d, d), Eigen::EigenvaluesOnly);
      lo = es.eigenvalues().minCoeff();
      hi = es.eigenvalues().maxCoeff();
    }
    lambda_ = std::min(lambda_, lo);
    Lambda_ = std::max(Lambda_, hi);
  }
  if (!(lambda_ > 0.0)) throw ConfigError("coefficient field is not uniformly elliptic (min eigenvalue " +
                                          std::to_string(lambda_) + ")");
}

std::vector<double> CoefficientField::mean_matrix() const {
  const int d = dim();
  std::vector<double> m(static_cast<std::size_t>(d * d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m[i * d + j] = grid_mean(entry(i, j));
  return m;
}

void write_doubles_le(std::ostream& out, std::span<const double> values) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size_bytes()));
  } else {
    for (double v : values) {
      auto bits = std::bit_cast<std::uint64_t>(v);
      char bytes[8];
      for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xff);
      out.write(bytes, 8);
    }
  }
}

void read_doubles_le(std::istream& in, std::span<double> values) {
  if constexpr (std::endian::native == std::endian::little) {
    in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size_bytes()));
  } else {
    for (double& v : values) {
      unsigned char bytes[8];
      in.read(reinterpret_cast<char*>(bytes), 8);
      std::uint64_t bits = 0;
      for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
      v = std::bit_cast<double>(bits);
    }
  }
  if (!in) throw ConfigError("binary block truncated");
}

std::string join_numbers(std::span<const double> v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

std::string join_numbers(std::span<const int> v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

std::string header_value(const std::string& header, const std::string& key) {
  std::istringstream is(header);
  std::string token;
  while (is >> token)
    if (token.rfind(key + "=", 0) == 0) return token.substr(key.size() + 1);
  throw ConfigError("header lacks '" + key + "': " + header);
}

std::vector<double> parse_number_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("malformed number list: " + s);
    }
  }
  return out;
}

void write_coefficient_file(const std::filesystem::path& path, const CoefficientField& a) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write coefficient file " + path.string());
  const auto& shape = a.shape();
  out << "cellcoef d=" << shape.dim() << " l=" << join_numbers(shape.lengths) << " n=" << join_numbers(shape.points)
      << '\n';
  const int d = a.dim();
  std::vector<double> row(static_cast<std::size_t>(sym_entries(d)));
  for (std::size_t p = 0; p < shape.size(); ++p) {
    for (int s = 0; s < sym_entries(d); ++s) row[s] = a.entries()[s][p];
    write_doubles_le(out, row);
  }
}

CoefficientField read_coefficient_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open coefficient file " + path.string());
  std::string header;
  std::getline(in, header);
  if (header.rfind("cellcoef", 0) != 0) throw ConfigError("not a cellcoef file: " + path.string());
  const int d = std::stoi(header_value(header, "d"));
  GridShape shape;
  shape.lengths = parse_number_list(header_value(header, "l"));
  for (double n : parse_number_list(header_value(header, "n"))) shape.points.push_back(static_cast<int>(n));
  if (shape.dim() != d) throw ConfigError("cellcoef header dimension mismatch");
  shape.validate();
  std::vector<Field> entries(static_cast<std::size_t>(sym_entries(d)), Field(shape.size()));
  std::vector<double> row(static_cast<std::size_t>(sym_entries(d)));
  for (std::size_t p = 0; p < shape.size(); ++p) {
    read_doubles_le(in, row);
    for (int s = 0; s < sym_entries(d); ++s) entries[s][p] = row[s];
  }
  return CoefficientField(std::move(shape), std::move(entries));
}

Medium sampled_medium(std::string name, CoefficientField field) {
  const GridShape shape = field.shape();
  auto entries = std::make_shared<const std::vector<Field>>(field.entries());
  return Medium(std::move(name), shape.lengths, [shape, entries](std::span<const double> y, std::span<double> e) {
    std::size_t p = 0;
    for (int a = 0; a < shape.dim(); ++a) {
      const double x = y[a] / shape.spacing(a);
      const double node = std::round(x);
      if (std::abs(x - node) > 1e-9 * std::max(1.0, std::abs(x)))
        throw ConfigError("grid-sampled medium evaluated off its nodes");
      const auto n = static_cast<std::size_t>(shape.points[a]);
      p = p * n + static_cast<std::size_t>(static_cast<long long>(node)) % n;
    }
    for (std::size_t s = 0; s < entries->size(); ++s) e[s] = (*entries)[s][p];
  });
}

}  // namespace longwave
