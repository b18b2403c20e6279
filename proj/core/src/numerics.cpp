#include "robustl1/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace robustl1 {

namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument(std::string(what) + ": non-finite entry");
    }
  }
}

void require_same_length(std::span<const double> a, std::span<const double> b,
                         const char* what) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(what) + ": length mismatch (" +
                         std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
}

// Order by descending magnitude, then ascending index.
std::vector<std::size_t> abs_ranked_prefix(std::span<const double> v, std::size_t count,
                                           bool largest) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto cmp = [&](std::size_t a, std::size_t b) {
    const double fa = std::fabs(v[a]);
    const double fb = std::fabs(v[b]);
    if (fa != fb) return largest ? fa > fb : fa < fb;
    return a < b;
  };
  if (count < order.size()) {
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count),
                     order.end(), cmp);
  }
  order.resize(count);
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), entries_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows * cols) {
    throw DimensionError("DenseMatrix: expected " + std::to_string(rows * cols) +
                         " entries, got " + std::to_string(entries_.size()));
  }
  require_finite(entries_, "DenseMatrix");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> diag) {
  DenseMatrix out(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) out(i, i) = diag[i];
  return out;
}

DenseMatrix DenseMatrix::column(std::span<const double> column) {
  return DenseMatrix(column.size(), 1, std::vector<double>(column.begin(), column.end()));
}

DenseMatrix DenseMatrix::select_rows(std::span<const std::size_t> indices) const {
  DenseMatrix out(indices.size(), cols_);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto src = row(indices[r]);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

Vector matvec(const DenseMatrix& a, std::span<const double> v) {
  if (a.cols() != v.size()) {
    throw DimensionError("matvec: matrix has " + std::to_string(a.cols()) +
                         " columns, vector has length " + std::to_string(v.size()));
  }
  Vector out(a.rows());
  const std::size_t n = a.cols();
  const double* x = v.data();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* r = a.row(i).data();
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += r[j] * x[j];
    out[i] = acc;
  }
  return out;
}

Vector matvec_transpose(const DenseMatrix& a, std::span<const double> v) {
  if (a.rows() != v.size()) {
    throw DimensionError("matvec_transpose: matrix has " + std::to_string(a.rows()) +
                         " rows, vector has length " + std::to_string(v.size()));
  }
  const std::size_t n = a.cols();
  Vector out(n, 0.0);
  double* o = out.data();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double s = v[i];
    if (s == 0.0) continue;
    const double* r = a.row(i).data();
    for (std::size_t j = 0; j < n; ++j) o[j] += s * r[j];
  }
  return out;
}

DenseMatrix weighted_gram(const DenseMatrix& a, std::span<const double> weights) {
  if (weights.size() != a.rows()) {
    throw DimensionError("weighted_gram: weight count does not match rows");
  }
  const std::size_t n = a.cols();
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double w = weights[i];
    if (w == 0.0) continue;
    const double* r = a.row(i).data();
    for (std::size_t p = 0; p < n; ++p) {
      const double s = w * r[p];
      double* o = out.row(p).data();
      for (std::size_t q = p; q < n; ++q) o[q] += s * r[q];
    }
  }
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < p; ++q) out(p, q) = out(q, p);
  return out;
}

DenseMatrix gram(const DenseMatrix& a) {
  return weighted_gram(a, Vector(a.rows(), 1.0));
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matmul: inner dimensions differ");
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* o = out.row(i).data();
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double s = a(i, k);
      const double* r = b.row(k).data();
      for (std::size_t j = 0; j < b.cols(); ++j) o[j] += s * r[j];
    }
  }
  return out;
}

double compensated_sum(std::span<const double> values) {
  double sum = 0.0;
  double carry = 0.0;
  for (double x : values) {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

double l1_norm(std::span<const double> v) {
  Vector abs_values(v.size());
  std::transform(v.begin(), v.end(), abs_values.begin(), [](double x) { return std::fabs(x); });
  return compensated_sum(abs_values);
}

double l2_norm(std::span<const double> v) {
  // Scaled to avoid overflow on large entries.
  const double peak = linf_norm(v);
  if (peak == 0.0 || !std::isfinite(peak)) return peak;
  double acc = 0.0;
  for (double x : v) {
    const double s = x / peak;
    acc += s * s;
  }
  return peak * std::sqrt(acc);
}

double linf_norm(std::span<const double> v) {
  double out = 0.0;
  for (double x : v) out = std::max(out, std::fabs(x));
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_length(a, b, "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

Vector add(std::span<const double> a, std::span<const double> b) {
  require_same_length(a, b, "add");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vector subtract(std::span<const double> a, std::span<const double> b) {
  require_same_length(a, b, "subtract");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Vector scale(std::span<const double> v, double factor) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * factor;
  return out;
}

std::size_t fraction_floor(double eta, std::size_t m) {
  if (!(eta >= 0.0) || eta > 1.0) {
    throw std::invalid_argument("fraction must lie in [0, 1]");
  }
  const double raw = eta * static_cast<double>(m);
  const auto count = static_cast<std::size_t>(std::floor(raw * (1.0 + 1e-9) + 1e-9));
  return std::min(count, m);
}

PartialSums top_abs_partial_sums(std::span<const double> v, std::size_t count) {
  if (count > v.size()) {
    throw std::out_of_range("top_abs_partial_sums: count " + std::to_string(count) +
                            " exceeds length " + std::to_string(v.size()));
  }
  const auto top = abs_ranked_prefix(v, count, true);
  std::vector<char> in_top(v.size(), 0);
  for (std::size_t i : top) in_top[i] = 1;
  Vector top_abs;
  Vector rest_abs;
  top_abs.reserve(count);
  rest_abs.reserve(v.size() - count);
  for (std::size_t i = 0; i < v.size(); ++i) {
    (in_top[i] ? top_abs : rest_abs).push_back(std::fabs(v[i]));
  }
  return {compensated_sum(top_abs), compensated_sum(rest_abs)};
}

std::vector<std::size_t> top_abs_indices(std::span<const double> v, std::size_t count) {
  if (count > v.size()) throw std::out_of_range("top_abs_indices: count exceeds length");
  return abs_ranked_prefix(v, count, true);
}

std::vector<std::size_t> bottom_abs_indices(std::span<const double> v, std::size_t count) {
  if (count > v.size()) throw std::out_of_range("bottom_abs_indices: count exceeds length");
  return abs_ranked_prefix(v, count, false);
}

// ---------------------------------------------------------------------------
// Factorizations

SpdFactor::SpdFactor(const DenseMatrix& a) : n_(a.rows()), lower_(a.rows() * a.rows(), 0.0) {
  if (a.rows() != a.cols()) throw DimensionError("SpdFactor: matrix is not square");
  const std::size_t n = n_;
  for (std::size_t j = 0; j < n; ++j) {
    double* lj = &lower_[j * n];
    double diag = a(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= lj[k] * lj[k];
    if (!(diag > 0.0)) {
      throw NotPositiveDefiniteError("SpdFactor: nonpositive pivot at column " +
                                     std::to_string(j));
    }
    const double ljj = std::sqrt(diag);
    lj[j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double* li = &lower_[i * n];
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
      li[j] = s / ljj;
    }
  }
}

Vector SpdFactor::solve(std::span<const double> b) const {
  Vector x(b.begin(), b.end());
  solve_in_place(x);
  return x;
}

void SpdFactor::solve_in_place(std::span<double> x) const {
  if (x.size() != n_) throw DimensionError("SpdFactor::solve: right-hand side length mismatch");
  const std::size_t n = n_;
  for (std::size_t i = 0; i < n; ++i) {
    const double* li = &lower_[i * n];
    double s = x[i];
    for (std::size_t k = 0; k < i; ++k) s -= li[k] * x[k];
    x[i] = s / li[i];
  }
  // Back substitution with Lᵀ, column-oriented so L is read row by row.
  for (std::size_t ii = n; ii-- > 0;) {
    const double* li = &lower_[ii * n];
    x[ii] /= li[ii];
    const double xi = x[ii];
    for (std::size_t k = 0; k < ii; ++k) x[k] -= li[k] * xi;
  }
}

LuFactor::LuFactor(const DenseMatrix& a, double pivot_tolerance)
    : n_(a.rows()), lu_(a.data().begin(), a.data().end()), perm_(a.rows()) {
  if (a.rows() != a.cols()) throw DimensionError("LuFactor: matrix is not square");
  const std::size_t n = n_;
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  const double scale_ref = std::max(linf_norm(lu_), 1e-300);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    double best = std::fabs(lu_[k * n + k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double c = std::fabs(lu_[i * n + k]);
      if (c > best) {
        best = c;
        pivot = i;
      }
    }
    if (best <= pivot_tolerance * scale_ref) {
      throw SingularMatrixError("LuFactor: matrix is numerically singular");
    }
    if (pivot != k) {
      std::swap_ranges(lu_.begin() + static_cast<std::ptrdiff_t>(k * n),
                       lu_.begin() + static_cast<std::ptrdiff_t>((k + 1) * n),
                       lu_.begin() + static_cast<std::ptrdiff_t>(pivot * n));
      std::swap(perm_[k], perm_[pivot]);
    }
    const double diag = lu_[k * n + k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = lu_[i * n + k] / diag;
      lu_[i * n + k] = f;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu_[i * n + j] -= f * lu_[k * n + j];
    }
  }
}

Vector LuFactor::solve(std::span<const double> b) const {
  if (b.size() != n_) throw DimensionError("LuFactor::solve: right-hand side length mismatch");
  const std::size_t n = n_;
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[perm_[i]];
    for (std::size_t k = 0; k < i; ++k) s -= lu_[i * n + k] * x[k];
    x[i] = s;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= lu_[ii * n + k] * x[k];
    x[ii] = s / lu_[ii * n + ii];
  }
  return x;
}

// ---------------------------------------------------------------------------
// CSV

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_matrix_csv(std::ostream& out, const DenseMatrix& a) {
  out << "# " << a.rows() << ',' << a.cols() << '\n';
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (j) out << ',';
      out << format_double(a(i, j));
    }
    out << '\n';
  }
}

DenseMatrix read_matrix_csv(std::istream& in) {
  std::string line;
  std::size_t declared_rows = 0;
  std::size_t declared_cols = 0;
  bool has_header = false;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::vector<double> entries;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (rows == 0 && !has_header) {
        if (std::sscanf(line.c_str(), "# %zu,%zu", &declared_rows, &declared_cols) == 2) {
          has_header = true;
        }
      }
      continue;
    }
    std::size_t count = 0;
    std::stringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      char* end = nullptr;
      const double value = std::strtod(field.c_str(), &end);
      while (end && (*end == ' ' || *end == '\t')) ++end;
      if (end == field.c_str() || (end && *end != '\0')) {
        throw std::invalid_argument("CSV line " + std::to_string(line_no) +
                                    ": cannot parse '" + field + "'");
      }
      entries.push_back(value);
      ++count;
    }
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      throw DimensionError("CSV line " + std::to_string(line_no) + ": expected " +
                           std::to_string(cols) + " fields, got " + std::to_string(count));
    }
    ++rows;
  }
  if (has_header && (declared_rows != rows || (rows > 0 && declared_cols != cols))) {
    throw DimensionError("CSV header declares " + std::to_string(declared_rows) + "x" +
                         std::to_string(declared_cols) + " but body is " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  }
  if (has_header && rows == 0) cols = declared_cols;
  return DenseMatrix(rows, cols, std::move(entries));
}

void write_matrix_csv(const std::string& path, const DenseMatrix& a) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_matrix_csv(out, a);
  if (!out) throw std::runtime_error("write failed: " + path);
}

DenseMatrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_matrix_csv(in);
}

void write_vector_csv(const std::string& path, std::span<const double> v) {
  write_matrix_csv(path, DenseMatrix::column(v));
}

Vector read_vector_csv(const std::string& path) {
  const DenseMatrix m = read_matrix_csv(path);
  if (m.cols() > 1) throw DimensionError(path + ": expected a single column");
  return Vector(m.data().begin(), m.data().end());
}

}  // namespace robustl1
