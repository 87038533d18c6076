#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace twophase {

struct Triplet {
  int row;
  int col;
  double value;
};

/// Compressed-row sparse matrix with sorted, unique column indices per row.
///
/// The sparsity pattern is fixed after construction; values may be updated in
/// place through values_mut(). Explicit zeros are kept if they were supplied.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  /// Takes ownership of CSR arrays. Throws ValidationError on malformed input
  /// (offsets not monotone, indices out of range, unsorted or duplicate
  /// columns within a row).
  SparseMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx,
               std::vector<double> values);

  /// Builds from coordinate entries; duplicates are summed.
  static SparseMatrix from_triplets(int rows, int cols, std::span<const Triplet> entries);
  static SparseMatrix identity(int n);
  static SparseMatrix diagonal(std::span<const double> d);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int nnz() const { return static_cast<int>(values_.size()); }

  std::span<const int> row_ptr() const { return row_ptr_; }
  std::span<const int> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values_mut() { return values_; }

  std::span<const int> row_cols(int i) const {
    return {col_idx_.data() + row_ptr_[i], static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i])};
  }
  std::span<const double> row_values(int i) const {
    return {values_.data() + row_ptr_[i], static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i])};
  }

  /// Position of (i, j) in the value array, or -1 when structurally absent.
  int find(int i, int j) const;
  /// Entry value, 0 when structurally absent.
  double coeff(int i, int j) const;
  /// Diagonal entries (0 where absent).
  std::vector<double> diagonal_values() const;

  /// y = A x. Accumulation is per row in column order.
  void multiply(std::span<const double> x, std::span<double> y) const;

  bool operator==(const SparseMatrix&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x);

SparseMatrix transpose(const SparseMatrix& a);

/// C = A B (Gustavson). Structural zeros produced by cancellation are kept.
SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);

/// C = alpha A + beta B on the union pattern.
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha = 1.0,
                 double beta = 1.0);

/// Scales column j of A by d[j].
SparseMatrix scale_columns(const SparseMatrix& a, std::span<const double> d);

/// B = P A P^T where new index perm[i] holds old index i.
SparseMatrix permute_symmetric(const SparseMatrix& a, std::span<const int> perm);

/// Extracts A(rows, cols) for index lists; entries outside are dropped.
SparseMatrix submatrix(const SparseMatrix& a, std::span<const int> rows, std::span<const int> cols);

/// Removes entries with |a_ij| <= tol, keeping diagonals.
SparseMatrix drop_small(const SparseMatrix& a, double tol = 0.0);

double norm_inf(const SparseMatrix& a);
double norm_frobenius(const SparseMatrix& a);

/// MatrixMarket coordinate real general.
void write_matrix_market(const SparseMatrix& a, std::ostream& out);
SparseMatrix read_matrix_market(std::istream& in);

}  // namespace twophase
