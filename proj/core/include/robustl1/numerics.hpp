#pragma once

// Dense linear algebra used by the estimators: row-major matrices, products,
// Cholesky and LU factorizations, compensated sums and sorted partial sums.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace robustl1 {

using Vector = std::vector<double>;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a Cholesky pivot is not strictly positive.
class NotPositiveDefiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Row-major dense matrix with finite entries.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(std::span<const double> diag);
  /// Builds a single-column matrix from `column`.
  static DenseMatrix column(std::span<const double> column);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return entries_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {entries_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {entries_.data() + i * cols_, cols_};
  }

  std::span<const double> data() const { return entries_; }
  std::span<double> data() { return entries_; }

  /// Copy of the rows listed in `indices`, in the given order.
  DenseMatrix select_rows(std::span<const std::size_t> indices) const;
  DenseMatrix transpose() const;

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

Vector matvec(const DenseMatrix& a, std::span<const double> v);
/// Aᵀv without forming the transpose.
Vector matvec_transpose(const DenseMatrix& a, std::span<const double> v);
/// AᵀA.
DenseMatrix gram(const DenseMatrix& a);
/// Aᵀ diag(weights) A.
DenseMatrix weighted_gram(const DenseMatrix& a, std::span<const double> weights);
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

/// Neumaier-compensated sum.
double compensated_sum(std::span<const double> values);
double l1_norm(std::span<const double> v);
double l2_norm(std::span<const double> v);
double linf_norm(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);

Vector add(std::span<const double> a, std::span<const double> b);
Vector subtract(std::span<const double> a, std::span<const double> b);
Vector scale(std::span<const double> v, double factor);

/// Number of samples in an `eta` fraction of `m`, rounded down. A relative
/// guard of 1e-9 keeps products such as 0.29 * 100 from dropping to 28.
std::size_t fraction_floor(double eta, std::size_t m);

struct PartialSums {
  double top_sum = 0.0;   // the `count` largest |v_i|
  double rest_sum = 0.0;  // everything else
};

/// Splits ‖v‖₁ into the `count` largest absolute entries and the rest.
/// Equal magnitudes are ranked by lower index first.
PartialSums top_abs_partial_sums(std::span<const double> v, std::size_t count);

/// Indices of the `count` largest |v_i|, ties to the lower index, returned in
/// ascending index order.
std::vector<std::size_t> top_abs_indices(std::span<const double> v, std::size_t count);
/// Indices of the `count` smallest |v_i|, ties to the lower index, ascending.
std::vector<std::size_t> bottom_abs_indices(std::span<const double> v, std::size_t count);

/// Cholesky factor of a symmetric positive-definite matrix. Immutable once
/// built, so one factor can serve concurrent solves.
class SpdFactor {
 public:
  /// Throws NotPositiveDefiniteError on a nonpositive pivot and
  /// DimensionError on a non-square input.
  explicit SpdFactor(const DenseMatrix& a);

  std::size_t size() const { return n_; }
  Vector solve(std::span<const double> b) const;
  void solve_in_place(std::span<double> x) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> lower_;  // row-major lower triangle, full n*n storage
};

/// LU factorization with partial pivoting for square systems.
class LuFactor {
 public:
  /// Throws SingularMatrixError when a pivot falls below `pivot_tolerance`
  /// times the largest entry magnitude.
  explicit LuFactor(const DenseMatrix& a, double pivot_tolerance = 1e-13);

  Vector solve(std::span<const double> b) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> lu_;
  std::vector<std::size_t> perm_;
};

// CSV text format: optional "# m,n" header, then one comma-separated row per
// line with 17 significant digits. Vectors are stored as single columns.
void write_matrix_csv(std::ostream& out, const DenseMatrix& a);
DenseMatrix read_matrix_csv(std::istream& in);
void write_matrix_csv(const std::string& path, const DenseMatrix& a);
DenseMatrix read_matrix_csv(const std::string& path);

void write_vector_csv(const std::string& path, std::span<const double> v);
Vector read_vector_csv(const std::string& path);

/// Formats with 17 significant digits so the text round-trips bit-exactly.
std::string format_double(double value);

}  // namespace robustl1
