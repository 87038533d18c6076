#include "twophase/linear_operator.hpp"

#include <algorithm>
#include <cmath>

#include "twophase/errors.hpp"

namespace twophase {

void IdentityOperator::apply(std::span<const double> x, std::span<double> y) const {
  std::copy(x.begin(), x.end(), y.begin());
}

MatrixOperator::MatrixOperator(const SparseMatrix& a) : a_(&a) {
  if (a.rows() != a.cols()) throw DimensionError("MatrixOperator needs a square matrix");
}

DenseDirectSolve::DenseDirectSolve(const SparseMatrix& a) : DenseDirectSolve(to_dense(a)) {}

DenseDirectSolve::DenseDirectSolve(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw DimensionError("DenseDirectSolve needs a square matrix");
  lu_.compute(a);
}

void DenseDirectSolve::apply(std::span<const double> x, std::span<double> y) const {
  Eigen::Map<const Eigen::VectorXd> rhs(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::Map<Eigen::VectorXd> out(y.data(), static_cast<Eigen::Index>(y.size()));
  out = lu_.solve(rhs);
}

ComposedOperator::ComposedOperator(const LinearOperator& outer, const LinearOperator& inner)
    : outer_(&outer), inner_(&inner) {
  if (outer.size() != inner.size()) throw DimensionError("composed operators differ in size");
}

void ComposedOperator::apply(std::span<const double> x, std::span<double> y) const {
  std::vector<double> tmp(inner_->size());
  inner_->apply(x, tmp);
  outer_->apply(tmp, y);
}

PermutedOperator::PermutedOperator(std::unique_ptr<LinearOperator> op, std::vector<int> perm)
    : op_(std::move(op)), perm_(std::move(perm)) {
  if (static_cast<int>(perm_.size()) != op_->size())
    throw DimensionError("permutation size differs from operator size");
}

void PermutedOperator::apply(std::span<const double> x, std::span<double> y) const {
  std::vector<double> px(perm_.size()), py(perm_.size());
  for (std::size_t i = 0; i < perm_.size(); ++i) px[perm_[i]] = x[i];
  op_->apply(px, py);
  for (std::size_t i = 0; i < perm_.size(); ++i) y[i] = py[perm_[i]];
}

Eigen::MatrixXd to_dense(const SparseMatrix& a) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i) {
    auto cols = a.row_cols(i);
    auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) d(i, cols[k]) = vals[k];
  }
  return d;
}

SparseMatrix from_dense(const Eigen::MatrixXd& a, double drop_tol) {
  std::vector<Triplet> t;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (std::abs(a(i, j)) > drop_tol || i == j)
        t.push_back({static_cast<int>(i), static_cast<int>(j), a(i, j)});
  return SparseMatrix::from_triplets(static_cast<int>(a.rows()), static_cast<int>(a.cols()), t);
}

Eigen::MatrixXd materialize(const LinearOperator& op) {
  const int n = op.size();
  Eigen::MatrixXd d(n, n);
  std::vector<double> e(n, 0.0), col(n);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    op.apply(e, col);
    for (int i = 0; i < n; ++i) d(i, j) = col[i];
    e[j] = 0.0;
  }
  return d;
}

}  // namespace twophase
