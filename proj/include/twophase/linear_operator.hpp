#pragma once

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <vector>

#include "twophase/sparse.hpp"

namespace twophase {

/// Square linear map y = Op(x) of fixed dimension.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual int size() const = 0;
  virtual void apply(std::span<const double> x, std::span<double> y) const = 0;

  std::vector<double> operator()(std::span<const double> x) const {
    std::vector<double> y(size());
    apply(x, y);
    return y;
  }
};

class IdentityOperator final : public LinearOperator {
 public:
  explicit IdentityOperator(int n) : n_(n) {}
  int size() const override { return n_; }
  void apply(std::span<const double> x, std::span<double> y) const override;

 private:
  int n_;
};

/// Non-owning view of a sparse matrix as an operator.
class MatrixOperator final : public LinearOperator {
 public:
  explicit MatrixOperator(const SparseMatrix& a);
  int size() const override { return a_->rows(); }
  void apply(std::span<const double> x, std::span<double> y) const override { a_->multiply(x, y); }

 private:
  const SparseMatrix* a_;
};

/// Exact inverse via dense LU with partial pivoting.
class DenseDirectSolve final : public LinearOperator {
 public:
  explicit DenseDirectSolve(const SparseMatrix& a);
  explicit DenseDirectSolve(const Eigen::MatrixXd& a);
  int size() const override { return static_cast<int>(lu_.rows()); }
  void apply(std::span<const double> x, std::span<double> y) const override;

 private:
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

/// y = outer(inner(x)).
class ComposedOperator final : public LinearOperator {
 public:
  ComposedOperator(const LinearOperator& outer, const LinearOperator& inner);
  int size() const override { return outer_->size(); }
  void apply(std::span<const double> x, std::span<double> y) const override;

 private:
  const LinearOperator* outer_;
  const LinearOperator* inner_;
};

/// Runs an operator defined in a permuted index space: y = P^T Op(P x),
/// where (P x)[perm[i]] = x[i].
class PermutedOperator final : public LinearOperator {
 public:
  PermutedOperator(std::unique_ptr<LinearOperator> op, std::vector<int> perm);
  int size() const override { return op_->size(); }
  void apply(std::span<const double> x, std::span<double> y) const override;
  const LinearOperator& inner() const { return *op_; }

 private:
  std::unique_ptr<LinearOperator> op_;
  std::vector<int> perm_;
};

Eigen::MatrixXd to_dense(const SparseMatrix& a);
SparseMatrix from_dense(const Eigen::MatrixXd& a, double drop_tol = 0.0);

/// Materializes an operator column by column by applying it to unit vectors.
Eigen::MatrixXd materialize(const LinearOperator& op);

}  // namespace twophase
