#pragma once

#include "twophase/errors.hpp"
#include "twophase/linear_operator.hpp"
#include "twophase/sparse.hpp"

namespace twophase {

class ZeroPivotError : public SolverError {
 public:
  explicit ZeroPivotError(int row)
      : SolverError("ILU(0): zero pivot in row " + std::to_string(row)), row_(row) {}
  int row() const { return row_; }

 private:
  int row_;
};

/// Incomplete LU factorization with zero fill. L (unit lower) and U share the
/// sparsity pattern of the input matrix; apply() performs the two triangular
/// solves, i.e. y = (LU)^{-1} x.
class Ilu0 final : public LinearOperator {
 public:
  explicit Ilu0(const SparseMatrix& a);

  int size() const override { return factors_.rows(); }
  void apply(std::span<const double> x, std::span<double> y) const override;

  /// Combined L\U storage on the pattern of the input.
  const SparseMatrix& factors() const { return factors_; }
  SparseMatrix lower() const;  // unit diagonal made explicit
  SparseMatrix upper() const;

 private:
  SparseMatrix factors_;
  std::vector<int> diag_pos_;
};

}  // namespace twophase
